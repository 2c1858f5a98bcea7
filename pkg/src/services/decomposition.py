"""
Splitting conjunctions of binary choice events into cells of at most three events.

Over weighted utility preferences, and expected utility as the pivot at
infinity, the event ``p ≿ q`` is the closed half-space ``Y . n >= 0`` of
homogeneous vectors, so a conjunction of events is a polyhedral cone ``K``.
A cell is a cone with at most three facets. ``K`` is cut by planes
``Y . c = 0`` where ``c = (r,1) x (s,1)`` for two lotteries ``r, s`` of the
simplex; each cut becomes the pair of events ``r ≿ s`` and ``s ≿ r`` and two
resulting cells overlap only where ``r ∼ s``.

Four-event inputs are first classified by the number of faces of the planar
region cut out by the half-planes (Cases 1 to 4 and their subcases) and cut
along the line that case prescribes. Whatever still has four or more facets
is cut along a diagonal whose line crosses the simplex, or fanned from a
point of the region that lies inside the simplex.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from src.conf.config import config
from src.entity.models import Chart, Lottery
from src.services.exceptions import DecompositionError, InvalidMenuError
from src.services.geometry import (
    E3,
    cone_generators,
    cross3,
    dot3,
    essential,
    has_interior,
    in_simplex,
    interior_point,
    lift,
    line_intersection,
    neg3,
    parallel,
    region_from_normals,
    same_line,
    simplex_chord,
)
from src.services.joint_choice import BinaryEvent, Cell, Decomposition, Relation

logger = logging.getLogger(__name__)

LEAF_CASES = ('1', '2-1', '2-2', '2-3', '2-4', '3-1', '3-2', '3-3', '3-4', '4-1', '4-2')
MODES = ('generic', 'parallel', 'two-pairs', 'all-parallel')
MODE_WEIGHTS = (0.55, 0.25, 0.1, 0.1)

# Y1 >= 0, Y2 >= 0, Y3 >= Y1 + Y2: the cone over the simplex.
SIMPLEX_CONE = (
    (Fraction(1), Fraction(0), Fraction(0)),
    (Fraction(0), Fraction(1), Fraction(0)),
    (Fraction(-1), Fraction(-1), Fraction(1)),
)


@dataclass(frozen=True)
class Constraint:
    normal: tuple
    event: BinaryEvent

    @classmethod
    def of(cls, event: BinaryEvent) -> Constraint:
        return cls(event.normal(), event)


@dataclass
class Configuration:
    """
    Case label of a four-event configuration and the cut that case prescribes.

    ``normals`` are re-signed so that the region they cut out is nonempty;
    ``chain`` lists the face indices in boundary order.
    """
    label: str
    normals: list = field(default_factory=list)
    chain: list = field(default_factory=list)
    sign: int = 1
    bounded: bool = False
    path: list = field(default_factory=list)
    split: tuple | None = None
    anchor: tuple | None = None


@dataclass
class _Run:
    depth_limit: int
    witnesses: list = field(default_factory=list)

    def witness(self, event: BinaryEvent):
        pair = (event.p, event.q)
        if pair not in self.witnesses and (event.q, event.p) not in self.witnesses:
            self.witnesses.append(pair)


# -- events as exact constraints -------------------------------------------

def _exact_lottery(p: Lottery) -> Lottery:
    if p.chart is not Chart.MM:
        raise InvalidMenuError('Joint events are decomposed in the MM chart')
    return p if p.exact else Lottery(Fraction(p.x), Fraction(p.y))


def _constraints(events: Sequence[BinaryEvent]) -> list[Constraint]:
    constraints = []
    for e in events:
        if e.relation is Relation.INDIFFERENT:
            raise InvalidMenuError(f'Indifference event {e} has no interior and cannot be decomposed')
        exact = BinaryEvent(_exact_lottery(e.p), _exact_lottery(e.q), e.relation)
        constraints.append(Constraint.of(exact))
    return constraints


def _collapse(constraints: list[Constraint]) -> tuple[list[Constraint], bool]:
    """
    Merges events on a common line.

    :return: tuple: (constraints on pairwise distinct lines, whether two events face opposite sides of one line)
    """
    kept = []
    for c in constraints:
        twin = next((i for i, k in enumerate(kept) if same_line(k.normal, c.normal)), None)
        if twin is None:
            kept.append(c)
        elif dot3(kept[twin].normal, c.normal) < 0:
            return kept, True
        elif c.event.relation is Relation.STRICT:
            kept[twin] = c
    return kept, False


def _normals(constraints: Sequence[Constraint]) -> list:
    return [c.normal for c in constraints]


def _reduce(constraints: Sequence[Constraint]) -> list[Constraint]:
    return [constraints[k] for k in essential(_normals(constraints))]


def aux_event(c, anchor=None) -> BinaryEvent | None:
    """
    Weak event ``r ≿ s`` with ``(r,1) x (s,1)`` a positive multiple of ``c``.

    ``r`` is the anchor when it lies on the line and in the simplex, else the
    midpoint of the chord the line cuts from the simplex; ``s`` is the chord
    midpoint, or a chord endpoint when the midpoint is already taken.

    :param c: tuple: Homogeneous line
    :param anchor: tuple | None: Preferred point of the line
    :return: BinaryEvent | None: None when the line does not cross the simplex
    """
    if not any(c) or (c[0] == 0 and c[1] == 0):
        return None
    chord = simplex_chord(c)
    if chord is None:
        return None
    e1, e2 = chord
    mid = ((e1[0] + e2[0]) / 2, (e1[1] + e2[1]) / 2)
    r = anchor if anchor is not None and dot3(c, lift(anchor)) == 0 and in_simplex(anchor) else mid
    s = mid if mid != tuple(r) else e2
    if dot3(cross3(lift(r), lift(s)), c) < 0:
        r, s = s, r
    for point in (r, s):
        if not in_simplex(point):
            raise DecompositionError(f'Auxiliary lottery {point} left the simplex')
    return BinaryEvent(Lottery(*r), Lottery(*s), Relation.WEAK)


def _halves(constraints: list[Constraint], event: BinaryEvent | None) -> list[list[Constraint]]:
    if event is None:
        return []
    halves = [constraints + [Constraint.of(event)], constraints + [Constraint.of(event.reversed())]]
    if not all(has_interior(_normals(h)) for h in halves):
        return []
    return halves


# -- generic refinement ------------------------------------------------------

def _rays(constraints: Sequence[Constraint]) -> list:
    rays, lineality = cone_generators(_normals(constraints))
    return [] if lineality else rays


def _adjacent(constraints: Sequence[Constraint], u, v) -> bool:
    return any(dot3(c.normal, u) == 0 and dot3(c.normal, v) == 0 for c in constraints)


def _diagonal(constraints: list[Constraint], anchor) -> BinaryEvent | None:
    rays = _rays(constraints)
    candidates = []
    for i, u in enumerate(rays):
        for v in rays[i + 1:]:
            if not _adjacent(constraints, u, v):
                c = cross3(u, v)
                through_anchor = anchor is not None and dot3(c, lift(anchor)) == 0
                candidates.append((0 if through_anchor else 1, len(candidates), c))
    for _, _, c in sorted(candidates, key=lambda item: item[:2]):
        event = aux_event(c, anchor)
        if event is not None:
            return event
    return None


def _fan(constraints: list[Constraint], run: _Run) -> list[Cell]:
    """
    Cells cone(z, v, w), one per facet, around a vector z inside both the cone and the simplex cone.
    """
    normals = _normals(constraints)
    z = interior_point(normals + list(SIMPLEX_CONE)) or interior_point(normals + [neg3(n) for n in SIMPLEX_CONE])
    if z is None:
        raise DecompositionError(f'No constructible cut for a cone with {len(constraints)} facets')
    f = (z[0] / z[2], z[1] / z[2])
    spokes = {}
    rays = _rays(constraints)

    def spoke(v, w):
        key = rays.index(v)
        if key not in spokes:
            event = aux_event(cross3(z, v), f)
            if event is None:
                raise DecompositionError('Fan line through an interior simplex point missed the simplex')
            run.witness(event)
            spokes[key] = event
        event = spokes[key]
        return event if dot3(event.normal(), w) > 0 else event.reversed()

    cells = []
    for constraint in constraints:
        on = [v for v in rays if dot3(constraint.normal, v) == 0]
        if len(on) != 2:
            raise DecompositionError(f'Facet {constraint.event} meets {len(on)} extreme rays')
        v, w = on
        cells.append(Cell((constraint.event, spoke(v, w), spoke(w, v))))
    logger.debug('fan from %s: %d cells', f, len(cells))
    return cells


def _refine(constraints: list[Constraint], anchor, run: _Run, depth: int) -> list[Cell]:
    if depth > run.depth_limit:
        raise DecompositionError(f'Decomposition exceeded the recursion depth of {run.depth_limit}')
    kept = _reduce(constraints)
    if len(kept) <= 3:
        return [Cell(tuple(c.event for c in kept))]
    halves = _halves(kept, _diagonal(kept, anchor))
    if not halves:
        return _fan(kept, run)
    run.witness(halves[0][-1].event)
    return [cell for half in halves for cell in _refine(half, anchor, run, depth + 1)]


# -- case dispatch -----------------------------------------------------------

def _face_chain(region, normals: list) -> list[int]:
    faces = list(region.faces)
    if len(faces) <= 2 or not region.vertices:
        return faces
    links = {i: [] for i in faces}
    for v in region.vertices:
        on = [i for i in faces if dot3(normals[i], lift(v)) == 0]
        if len(on) == 2:
            a, b = on
            links[a].append(b)
            links[b].append(a)
    ends = [i for i in faces if len(links[i]) == 1]
    chain = [ends[0] if ends else faces[0]]
    while len(chain) < len(faces):
        following = [j for j in links[chain[-1]] if j not in chain]
        if not following:
            return faces
        chain.append(following[0])
    return chain


def _meet(n, m) -> tuple:
    return cross3(n, m)


def _through_parallel(point_h, n) -> tuple:
    """
    Line through a homogeneous point, parallel to the line n.
    """
    return cross3(point_h, cross3(n, E3))


def _classify_signed(normals: list, events: list[BinaryEvent]) -> Configuration:
    region = region_from_normals(normals)
    if region.empty:
        return Configuration('empty', normals)
    chain = _face_chain(region, normals)
    others = [i for i in range(len(normals)) if i not in chain]
    cfg = Configuration('', normals, chain, bounded=region.bounded)
    N = normals
    if len(chain) == 1:
        cfg.label = '1'
    elif len(chain) == 2:
        a, b = chain
        c, d = others
        if parallel(N[a], N[b]):
            cfg.label = '2-1'
        elif parallel(N[c], N[d]):
            cfg.label = '2-2'
        else:
            apex = line_intersection(N[a], N[b])
            cfg.label = '2-3' if in_simplex(apex, strict=True) else '2-4'
            _case_two_split(cfg, events, others)
    elif len(chain) == 3:
        l1, l2, l3 = chain
        l4 = others[0]
        if region.bounded or parallel(N[l1], N[l3]):
            cfg.label = '3-1'
        else:
            x = line_intersection(N[l1], N[l3])
            if dot3(N[l4], lift(x)) <= 0:
                cfg.label = '3-2'
            else:
                corners = [line_intersection(N[l2], N[l3]), line_intersection(N[l1], N[l2])]
                cfg.label = '3-3' if any(in_simplex(p) for p in corners) else '3-4'
                _case_three_split(cfg, events, l4)
    else:
        l1, l2, l3, l4 = chain
        if region.bounded:
            cfg.label = '4-1'
            first = _meet(_meet(N[l2], N[l3]), _meet(N[l1], N[l4]))
            second = _meet(_meet(N[l1], N[l2]), _meet(N[l3], N[l4]))
            cfg.split = first if aux_event(first) is not None else second
        elif parallel(N[l1], N[l4]):
            cfg.label = '4-2'
            cfg.split = _through_parallel(_meet(N[l2], N[l3]), N[l1])
        else:
            cfg.label = '4-3'
    cfg.path = [cfg.label]
    return cfg


def _case_two_split(cfg: Configuration, events: list[BinaryEvent], others: list[int]):
    N = cfg.normals
    a, b = cfg.chain
    c, d = others
    if cfg.label == '2-3':
        far = _meet(N[c], N[d])
        if far[2] != 0 and all(dot3(N[k], far) * far[2] < 0 for k in (a, b)):
            cfg.anchor = line_intersection(N[a], N[b])
            cfg.split = _meet(_meet(N[a], N[b]), far)
        return
    for first, second in ((a, b), (b, a)):
        p, q = events[second].p, events[second].q
        if dot3(N[first], lift(p)) >= 0 and dot3(N[first], lift(q)) >= 0:
            r = ((p.x + q.x) / 2, (p.y + q.y) / 2)
            cfg.anchor = r
            cfg.split = _through_parallel(lift(r), N[first])
            return


def _case_three_split(cfg: Configuration, events: list[BinaryEvent], l4: int):
    N = cfg.normals
    l1, l2, l3 = cfg.chain
    if cfg.label == '3-3':
        options = [(line_intersection(N[l2], N[l3]), _meet(N[l1], N[l4])),
                   (line_intersection(N[l1], N[l2]), _meet(N[l3], N[l4]))]
        inside = [o for o in options if in_simplex(o[0], strict=True)] or [o for o in options if in_simplex(o[0])]
        r, target = inside[0]
        cfg.anchor = r
        cfg.split = cross3(lift(r), target)
        return
    p, q = events[l2].p, events[l2].q
    if dot3(N[l3], lift(p)) <= 0 and dot3(N[l3], lift(q)) <= 0:
        cfg.split = _through_parallel(_meet(N[l2], N[l3]), N[l1])
    else:
        cfg.split = _through_parallel(_meet(N[l1], N[l2]), N[l3])


def _classify(constraints: list[Constraint]) -> Configuration:
    events = [c.event for c in constraints]
    normals = _normals(constraints)
    cfg = _classify_signed(normals, events)
    if cfg.label == 'empty':
        cfg = _classify_signed([neg3(n) for n in normals], events)
        cfg.sign = -1
    if cfg.label == '4-3':
        mirrored = _classify_signed([neg3(n) for n in cfg.normals], events)
        if mirrored.label != 'empty':
            cfg.split, cfg.anchor = mirrored.split, mirrored.anchor
            cfg.path = ['4-3', mirrored.label]
    return cfg


def classify_configuration(events: Sequence[BinaryEvent]) -> Configuration:
    """
    Case label of four binary events on pairwise distinct lines.

    :param events: Sequence[BinaryEvent]: Four events
    :return: Configuration: ``label`` is one of the leaf cases or '4-3'; 'coincident' or 'empty' for degenerate input
    """
    constraints, opposite = _collapse(_constraints(events))
    if opposite or len(constraints) < 4:
        return Configuration('coincident', path=['coincident'])
    if not has_interior(_normals(constraints)):
        return Configuration('empty', path=['empty'])
    return _classify(constraints)


# -- public entry points -----------------------------------------------------

def _decompose(events: Sequence[BinaryEvent], depth_limit: int) -> Decomposition:
    events = tuple(events)
    constraints, opposite = _collapse(_constraints(events))
    if opposite:
        return Decomposition(events, case='coincident', path=['coincident'])
    if not has_interior(_normals(constraints)):
        return Decomposition(events, case='empty', path=['empty'])
    if len(constraints) < len(events):
        cfg = Configuration('coincident', path=['coincident'])
    elif len(constraints) == 4:
        cfg = _classify(constraints)
    else:
        cfg = Configuration('trivial', path=['trivial'])
    run = _Run(depth_limit)
    kept = _reduce(constraints)
    if len(kept) <= 3:
        cells = [Cell(tuple(c.event for c in kept))]
    else:
        halves = _halves(kept, aux_event(cfg.split, cfg.anchor) if cfg.split is not None else None)
        if halves:
            run.witness(halves[0][-1].event)
            logger.debug('case %s: cut along %s', cfg.label, halves[0][-1].event)
            cells = [cell for half in halves for cell in _refine(half, cfg.anchor, run, 1)]
        else:
            cells = _refine(kept, cfg.anchor, run, 0)
    return Decomposition(events, cells, run.witnesses, cfg.label, cfg.path)


def decompose4(events: Sequence[BinaryEvent], depth_limit: int | None = None) -> Decomposition:
    """
    Splits the conjunction of four strict binary events into cells of at most three events.

    :param events: Sequence[BinaryEvent]: Four strict events
    :param depth_limit: int | None: Recursion guard
    :return: Decomposition
    """
    if len(events) != 4:
        raise InvalidMenuError(f'decompose4 expects four events, got {len(events)}')
    if any(e.relation is not Relation.STRICT for e in events):
        raise InvalidMenuError('decompose4 expects strict events')
    d = _decompose(events, config.recursion_depth if depth_limit is None else depth_limit)
    logger.info('decompose4: case %s, %d cells, %d witnesses', '/'.join(d.path), len(d.cells),
                len(d.tie_overlap_witnesses))
    return d


def reduce_joint_event(events: Sequence[BinaryEvent], depth_limit: int | None = None) -> Decomposition:
    """
    Cells of at most three events for a conjunction of any number of binary events.

    Four events are decomposed first; every further event is conjoined with
    each cell so far and the four-event conjunction is decomposed again.

    :param events: Sequence[BinaryEvent]: Binary events, strict or weak
    :param depth_limit: int | None: Recursion guard
    :return: Decomposition
    """
    events = tuple(events)
    if not events:
        raise InvalidMenuError('At least one binary event is required')
    depth_limit = config.recursion_depth if depth_limit is None else depth_limit
    if len(events) <= 3:
        return Decomposition(events, [Cell(events)], case='trivial', path=['trivial'])
    first = _decompose(events[:4], depth_limit)
    cells, witnesses, path = list(first.cells), list(first.tie_overlap_witnesses), list(first.path)
    for extra in events[4:]:
        folded = []
        for cell in cells:
            d = _decompose(cell.events + (extra,), depth_limit)
            folded += d.cells
            witnesses += [w for w in d.tie_overlap_witnesses if w not in witnesses]
            path += [label for label in d.path if label != 'trivial']
        cells = folded
    logger.info('reduce_joint_event: %d events -> %d cells', len(events), len(cells))
    return Decomposition(events, cells, witnesses, first.case, path)


# -- random configurations ---------------------------------------------------

def _grid_point(rng: np.random.Generator, denominator: int) -> tuple:
    while True:
        a, b = (int(v) for v in rng.integers(0, denominator + 1, 2))
        if a + b <= denominator:
            return (Fraction(a, denominator), Fraction(b, denominator))


def _random_pair(rng: np.random.Generator, denominator: int) -> tuple:
    p = _grid_point(rng, denominator)
    q = _grid_point(rng, denominator)
    while q == p:
        q = _grid_point(rng, denominator)
    return p, q


def _parallel_pair(rng: np.random.Generator, denominator: int, direction: tuple) -> tuple:
    steps = (Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2), Fraction(1, 4), Fraction(-1, 4))
    for _ in range(200):
        p = _grid_point(rng, denominator)
        for lam in steps:
            q = (p[0] + lam * direction[0], p[1] + lam * direction[1])
            if in_simplex(q):
                return p, q
    raise DecompositionError(f'No lottery pair parallel to {direction} found')


def random_configuration(rng: np.random.Generator, mode: str = 'generic', denominator: int = 24) -> list[BinaryEvent]:
    """
    Four strict binary events on pairwise distinct lines with grid lotteries.

    :param rng: np.random.Generator: Source of randomness
    :param mode: str: 'generic', 'parallel' (one parallel pair), 'two-pairs' or 'all-parallel'
    :param denominator: int: Grid denominator of the lottery coordinates
    :return: list[BinaryEvent]
    """
    if mode not in MODES:
        raise InvalidMenuError(f'Unknown configuration mode {mode!r}')
    leaders = {'generic': (), 'parallel': ((1, 0),), 'two-pairs': ((1, 0), (3, 2)),
               'all-parallel': ((1, 0), (2, 0), (3, 0))}[mode]
    follows = dict(leaders)
    pairs, normals = [], []
    while len(pairs) < 4:
        k = len(pairs)
        if k in follows:
            p0, q0 = pairs[follows[k]]
            p, q = _parallel_pair(rng, denominator, (q0[0] - p0[0], q0[1] - p0[1]))
        else:
            p, q = _random_pair(rng, denominator)
        if rng.integers(0, 2):
            p, q = q, p
        n = cross3(lift(p), lift(q))
        if any(same_line(n, m) for m in normals):
            continue
        pairs.append((p, q))
        normals.append(n)
    order = rng.permutation(4)
    return [BinaryEvent(Lottery(*pairs[i][0]), Lottery(*pairs[i][1])) for i in order]


def case_coverage(seed: int | None = None, draws: int = 400, until_covered: bool = False,
                  max_draws: int = 20_000) -> dict:
    """
    Histogram of case labels over random configurations.

    :param seed: int | None: Seed
    :param draws: int: Minimum number of configurations
    :param until_covered: bool: Keep drawing until every leaf case occurred or ``max_draws`` is reached
    :param max_draws: int: Hard cap on draws
    :return: dict: draws, counts, missing, redispatched
    """
    rng = np.random.default_rng(np.random.SeedSequence(config.seed if seed is None else seed))
    counts = Counter()
    redispatched = done = 0
    while done < draws or (until_covered and done < max_draws and any(not counts[c] for c in LEAF_CASES)):
        mode = MODES[int(rng.choice(len(MODES), p=MODE_WEIGHTS))]
        d = decompose4(random_configuration(rng, mode))
        counts.update(d.path)
        redispatched += d.redispatched
        done += 1
    missing = [c for c in LEAF_CASES if not counts[c]]
    logger.info('case coverage: %d draws, missing %s', done, missing or 'none')
    return {'draws': done, 'counts': dict(counts), 'missing': missing, 'redispatched': redispatched}
