"""
Random preferences and the random choice correspondence they induce.

Finite mixtures are evaluated exactly. Parametric laws are estimated by Monte
Carlo: every sampled EU or weighted utility preference is turned into its
homogeneous vector, so the optimal set of each menu is a handful of
vectorised sign tests. Samples are produced in fixed-size chunks, each from
its own ``SeedSequence`` child, and the per-chunk counts are summed in chunk
order; the result depends on the seed and never on the thread count.
"""
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from src.conf import constants
from src.conf.config import config
from src.entity.models import Chart, Lottery, Menu, MenuFamily, PrizeRanking
from src.services.exceptions import DegenerateGeometryError, InvalidDistributionError, InvalidMenuError
from src.services.geometry import MM_VERTICES, angle_at, convert_point, cross3, lift, mm_xy, orient
from src.services.preferences import (
    DEFAULT_RANKING,
    EUPreference,
    Orientation,
    Preference,
    SemiWeightedPreference,
    WUFunctional,
    WUPreference,
    optimal_set,
)

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ProbabilityEstimate:
    value: Fraction | float
    stderr: float = 0.0
    samples: int = 0
    exact: bool = True

    def __float__(self):
        return float(self.value)


def binomial_estimate(count: int, n: int) -> ProbabilityEstimate:
    p = count / n
    return ProbabilityEstimate(p, math.sqrt(max(p * (1 - p), 0.0) / n), n, False)


class RandomPreference(ABC):
    kind: str = 'random'

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> Preference:
        ...

    @abstractmethod
    def sample_homogeneous(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """
        ``n`` sampled preferences as rows Y with p ≿ q iff Y . ((p,1) x (q,1)) >= 0.
        """


@dataclass(frozen=True)
class FiniteMixture(RandomPreference):
    components: tuple
    kind = 'finite_mixture'

    def __post_init__(self):
        components = tuple((pref, Fraction(weight)) for pref, weight in self.components)
        if not components:
            raise InvalidDistributionError('A mixture needs at least one component')
        if any(weight <= 0 for _, weight in components):
            raise InvalidDistributionError('Mixture weights must be positive')
        if sum(weight for _, weight in components) != 1:
            raise InvalidDistributionError('Mixture weights must sum to exactly 1')
        object.__setattr__(self, 'components', components)

    @property
    def weights(self) -> np.ndarray:
        return np.array([float(weight) for _, weight in self.components])

    def sample(self, rng: np.random.Generator) -> Preference:
        return self.components[int(rng.choice(len(self.components), p=self.weights))][0]

    def sample_homogeneous(self, rng: np.random.Generator, n: int) -> np.ndarray:
        vectors = []
        for pref, _ in self.components:
            y = pref.homogeneous()
            if y is None:
                raise InvalidDistributionError(f'Component of kind {pref.kind} has no homogeneous form')
            vectors.append([float(v) for v in y])
        picks = rng.choice(len(vectors), size=n, p=self.weights)
        return np.asarray(vectors)[picks]


@dataclass(frozen=True)
class CircleRWU(RandomPreference):
    """
    Weighted utility with pivot uniform on a circle around the simplex and a fair-coin orientation.
    """
    center: tuple = field(default_factory=lambda: (config.circle_center_x, config.circle_center_y))
    radius: float = field(default_factory=lambda: config.circle_radius)
    kind = 'circle_rwu'

    def __post_init__(self):
        cx, cy = (float(v) for v in self.center)
        for vx, vy in MM_VERTICES.values():
            if math.hypot(float(vx) - cx, float(vy) - cy) >= float(self.radius):
                raise InvalidDistributionError(f'Circle of radius {self.radius} does not strictly enclose the simplex')

    def _draw(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        theta = rng.uniform(0.0, TWO_PI, n)
        o = rng.integers(0, 2, n) * 2 - 1
        cx, cy = (float(v) for v in self.center)
        r = float(self.radius)
        return cx + r * np.cos(theta), cy + r * np.sin(theta), o

    def sample(self, rng: np.random.Generator) -> WUPreference:
        x, y, o = self._draw(rng, 1)
        return WUPreference((float(x[0]), float(y[0])), Orientation(int(o[0])))

    def sample_homogeneous(self, rng: np.random.Generator, n: int) -> np.ndarray:
        x, y, o = self._draw(rng, n)
        return np.column_stack([o * x, o * y, o.astype(float)])


@dataclass(frozen=True)
class UniformEU(RandomPreference):
    """
    Expected utility with gradient angle uniform on [0, 2π).
    """
    kind = 'uniform_eu'

    def sample(self, rng: np.random.Generator) -> EUPreference:
        theta = float(rng.uniform(0.0, TWO_PI))
        return EUPreference((math.cos(theta), math.sin(theta)))

    def sample_homogeneous(self, rng: np.random.Generator, n: int) -> np.ndarray:
        theta = rng.uniform(0.0, TWO_PI, n)
        return np.column_stack([np.sin(theta), -np.cos(theta), np.zeros(n)])


def slope_pivot(m0, m1, ranking: PrizeRanking = DEFAULT_RANKING) -> tuple:
    """
    MM-chart pivot where the line through the worst prize with slope m0 meets the
    line through the best prize with slope m1 (both slopes in the SLOPE chart).
    """
    if np.any(np.asarray(m0) == np.asarray(m1)):
        raise DegenerateGeometryError('Equal slopes give parallel construction lines and no pivot')
    x = 2 / (m0 - m1)
    y = (m0 + m1) / (m0 - m1)
    return convert_point((x, y), Chart.SLOPE, Chart.MM, ranking)


@dataclass(frozen=True)
class SlopePair(RandomPreference):
    """
    FOSD-monotone weighted utility indexed by the slopes (m0, m1) of the
    indifference lines through the worst and the best prize.
    """
    law: object
    ranking: PrizeRanking = DEFAULT_RANKING
    kind = 'slope_pair'

    def __post_init__(self):
        atoms = getattr(self.law, 'atoms', ())
        if any(m0 == m1 for (m0, m1), _ in atoms):
            raise InvalidDistributionError('Atoms with m0 = m1 have no pivot; remove them before sampling preferences')

    def _draw_slopes(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        m0, m1 = self.law.sample(rng, n)
        m0, m1 = np.asarray(m0, dtype=float), np.asarray(m1, dtype=float)
        tied = m0 == m1
        for _ in range(1000):
            if not np.any(tied):
                break
            r0, r1 = self.law.sample(rng, int(tied.sum()))
            m0[tied], m1[tied] = r0, r1
            tied = m0 == m1
        return m0, m1

    def _vectors(self, m0: np.ndarray, m1: np.ndarray) -> np.ndarray:
        px, py = slope_pivot(m0, m1, self.ranking)
        (bx, by), (wx, wy) = (tuple(float(v) for v in MM_VERTICES[k]) for k in (self.ranking.best, self.ranking.worst))
        o = np.sign((bx - px) * (wy - py) - (by - py) * (wx - px))
        return np.column_stack([o * px, o * py, o])

    def sample(self, rng: np.random.Generator) -> WUPreference:
        y = self.sample_homogeneous(rng, 1)[0]
        return WUPreference((y[0] / y[2], y[1] / y[2]), Orientation(int(np.sign(y[2]))))

    def sample_homogeneous(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self._vectors(*self._draw_slopes(rng, n))


# -- Monte Carlo engine -----------------------------------------------------

def pair_normal(p, q) -> np.ndarray:
    """
    Float copy of the exactly computed normal (p,1) x (q,1).
    """
    return np.array([float(c) for c in cross3(lift(p), lift(q))])


def optimal_masks(Y: np.ndarray, menu: Menu) -> np.ndarray:
    """
    Bit mask of the optimal set of ``menu`` for each sampled preference.

    :param Y: np.ndarray: Homogeneous preference vectors, shape (n, 3)
    :param menu: Menu: Menu of k lotteries
    :return: np.ndarray: Integers in [1, 2**k); bit i set iff lottery i is optimal
    """
    k = len(menu)
    optimal = np.ones((Y.shape[0], k), dtype=bool)
    for i in range(k):
        for j in range(k):
            if i != j:
                optimal[:, i] &= Y @ pair_normal(menu.lotteries[i], menu.lotteries[j]) >= 0
    weights = 1 << np.arange(k)
    return optimal.astype(np.int64) @ weights


def subset_mask(menu: Menu, subset: Iterable[Lottery]) -> int:
    members = set(subset)
    return sum(1 << i for i, p in enumerate(menu) if p in members)


def _chunks(total: int, chunk: int) -> list[int]:
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    return sizes


def monte_carlo(mu: RandomPreference, statistic: Callable[[np.ndarray], np.ndarray], n: int, seed: int,
                threads: int | None = None, chunk: int | None = None) -> np.ndarray:
    """
    Sums a per-chunk statistic of sampled homogeneous preferences.

    :param mu: RandomPreference: Sampler
    :param statistic: Callable: Maps a (size, 3) array to a fixed-shape count array
    :param n: int: Total number of samples
    :param seed: int: Master seed; chunk i uses the i-th spawned child
    :param threads: int | None: Worker threads
    :param chunk: int | None: Samples per chunk
    :return: np.ndarray: Summed statistic
    """
    threads = threads or config.threads
    sizes = _chunks(n, chunk or config.mc_chunk)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def work(task):
        size, stream = task
        return statistic(mu.sample_homogeneous(np.random.default_rng(stream), size))

    logger.info('monte carlo: %s, %d samples in %d chunks, %d threads', mu.kind, n, len(sizes), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(work, zip(sizes, streams)))
    return np.sum(results, axis=0)


# -- choice probabilities ---------------------------------------------------

def _as_subset(D: Menu, A) -> Menu:
    members = list(A)
    if not members:
        raise InvalidMenuError('The chosen set must be nonempty')
    if not set(members) <= set(D):
        raise InvalidMenuError('The chosen set must be contained in the menu')
    return D.sub(members)


def ternary_prob_formula(p, q, r) -> float:
    """
    Probability that p is the unique choice from {p, q, r} under uniform expected
    utility, one half of the share of directions not blocked by the angle qpr.

    :return: float
    """
    p, q, r = mm_xy(p), mm_xy(q), mm_xy(r)
    if orient(p, q, r) == 0:
        raise DegenerateGeometryError('The angle formula needs a non-collinear triple')
    return 0.5 * (1 - angle_at(p, q, r) / 180)


def choice_prob(mu: RandomPreference, D: Menu, A, n: int | None = None, seed: int | None = None,
                threads: int | None = None, method: str = 'auto') -> ProbabilityEstimate:
    """
    Probability that A is exactly the set of optimal lotteries in D.

    :param mu: RandomPreference: Random preference
    :param D: Menu: Menu
    :param A: iterable of Lottery: Chosen set
    :param n: int | None: Monte Carlo sample size
    :param seed: int | None: Monte Carlo seed
    :param threads: int | None: Worker threads
    :param method: str: 'auto', 'monte_carlo' or 'closed_form' (ternary angle formula)
    :return: ProbabilityEstimate: Exact for finite mixtures
    """
    A = _as_subset(D, A)
    if isinstance(mu, FiniteMixture) and method != 'monte_carlo':
        total = sum((w for pref, w in mu.components if optimal_set(pref, D).key == A.key), Fraction(0))
        return ProbabilityEstimate(total)
    if len(D) == 1:
        return ProbabilityEstimate(Fraction(1))
    if method == 'closed_form':
        if not isinstance(mu, (UniformEU, CircleRWU)) or len(D) != 3 or len(A) != 1:
            raise InvalidDistributionError('The closed form covers singleton choices from ternary menus under uniform EU or circle RWU')
        p = A.lotteries[0]
        q, r = (x for x in D if x != p)
        return ProbabilityEstimate(ternary_prob_formula(p, q, r), exact=False)
    n = n or config.mc_samples
    target = subset_mask(D, A)
    counts = monte_carlo(mu, lambda Y: np.array([np.count_nonzero(optimal_masks(Y, D) == target)]),
                         n, config.seed if seed is None else seed, threads)
    return binomial_estimate(int(counts[0]), n)


@dataclass
class RCCRow:
    menu: Menu
    probs: dict = field(default_factory=dict)
    stderr: dict = field(default_factory=dict)

    def total(self):
        return sum(self.probs.values())


@dataclass
class RCC:
    """
    Random choice correspondence on a finite family of menus.
    """
    rows: dict = field(default_factory=dict)
    companions: list = field(default_factory=list)
    exact: bool = True
    samples: int = 0

    def prob(self, D: Menu, A):
        return self.rows[D.key].probs[frozenset(A)]

    def row(self, D: Menu) -> RCCRow:
        return self.rows[D.key]

    def __contains__(self, D: Menu):
        return D.key in self.rows

    def __eq__(self, other):
        if not isinstance(other, RCC):
            return NotImplemented
        return {k: r.probs for k, r in self.rows.items()} == {k: r.probs for k, r in other.rows.items()}


def _unique_menus(menus: Sequence[Menu]) -> list[Menu]:
    seen, unique = set(), []
    for menu in menus:
        if menu.key not in seen:
            seen.add(menu.key)
            unique.append(menu)
    return unique


def rcc_from(mu: RandomPreference, menus, n: int | None = None, seed: int | None = None,
             threads: int | None = None) -> RCC:
    """
    Tabulates the choice probability of every nonempty subset of every menu.

    :param mu: RandomPreference: Random preference
    :param menus: list[Menu] | MenuFamily: Menus; a family also carries companion records
    :param n: int | None: Monte Carlo sample size for parametric laws
    :param seed: int | None: Monte Carlo seed
    :param threads: int | None: Worker threads
    :return: RCC
    """
    companions = []
    if isinstance(menus, MenuFamily):
        companions = list(menus.companions)
        menus = menus.menus
    menus = _unique_menus(menus)
    if not menus:
        raise InvalidMenuError('At least one menu is required')
    rcc = RCC(companions=companions, exact=isinstance(mu, FiniteMixture))
    for menu in menus:
        rcc.rows[menu.key] = RCCRow(menu, {s.key: Fraction(0) for s in menu.subsets()})
    if isinstance(mu, FiniteMixture):
        for pref, weight in mu.components:
            for menu in menus:
                rcc.rows[menu.key].probs[optimal_set(pref, menu).key] += weight
        return rcc

    n = n or config.mc_samples
    offsets = np.cumsum([0] + [1 << len(menu) for menu in menus])

    def statistic(Y):
        out = np.zeros(offsets[-1], dtype=np.int64)
        for menu, offset in zip(menus, offsets):
            out[offset:offset + (1 << len(menu))] += np.bincount(optimal_masks(Y, menu), minlength=1 << len(menu))
        return out

    counts = monte_carlo(mu, statistic, n, config.seed if seed is None else seed, threads)
    rcc.samples = n
    for menu, offset in zip(menus, offsets):
        row = rcc.rows[menu.key]
        for subset in menu.subsets():
            estimate = binomial_estimate(int(counts[offset + subset_mask(menu, subset)]), n)
            row.probs[subset.key] = estimate.value
            row.stderr[subset.key] = estimate.stderr
    return rcc


def sample_preference(mu: RandomPreference, seed: int) -> Preference:
    """
    One preference drawn from the law.

    :param mu: RandomPreference: Any random preference, mixtures included
    :param seed: int: Seed of the draw
    :return: Preference
    """
    return mu.sample(np.random.default_rng(np.random.SeedSequence(seed)))


# -- named distributions ----------------------------------------------------

def example_functionals() -> tuple[WUFunctional, WUFunctional]:
    return (WUFunctional(constants.EXAMPLE_U, constants.EXAMPLE_G1),
            WUFunctional(constants.EXAMPLE_U, constants.EXAMPLE_G2))


def example_mu() -> FiniteMixture:
    """
    Even mixture of the two weighted utility preferences with pivots (-1/2, -1/2) and (1, 1).
    """
    v1, v2 = example_functionals()
    return FiniteMixture(((v1.to_preference(), constants.HALF), (v2.to_preference(), constants.HALF)))


def example_mu_prime(weights: tuple = (constants.HALF, constants.HALF)) -> FiniteMixture:
    """
    Even mixture of the two semi-weighted preferences glued from the same functionals along V = 1/2.
    """
    v1, v2 = example_functionals()
    t = constants.EXAMPLE_THRESHOLD
    return FiniteMixture(((SemiWeightedPreference(v1, v2, t), weights[0]),
                          (SemiWeightedPreference(v2, v1, t), weights[1])))


def nu1(radius: float | None = None, center: tuple | None = None) -> CircleRWU:
    kwargs = {}
    if radius is not None:
        kwargs['radius'] = radius
    if center is not None:
        kwargs['center'] = center
    return CircleRWU(**kwargs)


def nu2() -> UniformEU:
    return UniformEU()


# -- menu generators --------------------------------------------------------

def random_lottery(rng: np.random.Generator, denominator: int = 12) -> Lottery:
    while True:
        i, j = (int(v) for v in rng.integers(0, denominator + 1, 2))
        if i + j <= denominator:
            return Lottery(Fraction(i, denominator), Fraction(j, denominator))


def random_menus(seed: int, count: int, min_size: int = 2, max_size: int = 4, denominator: int = 12) -> list[Menu]:
    """
    Seeded menus of rational grid lotteries.

    :param seed: int: Seed
    :param count: int: Number of menus
    :param min_size: int: Smallest menu size
    :param max_size: int: Largest menu size
    :param denominator: int: Grid denominator of the coordinates
    :return: list[Menu]: Menus in draw order, duplicates possible
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    menus = []
    for _ in range(count):
        size = int(rng.integers(min_size, max_size + 1))
        points = []
        while len(points) < size:
            p = random_lottery(rng, denominator)
            if p not in points:
                points.append(p)
        menus.append(Menu(tuple(points)))
    return menus


def random_triples(seed: int, count: int, denominator: int = 24) -> list[Menu]:
    """
    Seeded ternary menus in general position.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    triples = []
    while len(triples) < count:
        p, q, r = (random_lottery(rng, denominator) for _ in range(3))
        if orient(p, q, r) != 0:
            triples.append(Menu((p, q, r)))
    return triples
