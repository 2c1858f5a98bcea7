"""
Exact planar geometry over the three-prize simplex.

Points are ``(x, y)`` tuples or :class:`Lottery` objects. With Fraction
coordinates every predicate is exact; floats are accepted where callers only
need an approximate answer (angles, Monte Carlo).

Half-planes and binary choice events are handled in homogeneous form: a point
``x`` lifts to ``(x, 1)`` and the closed half-plane left of the directed line
``a -> b`` is ``{x : n . (x, 1) >= 0}`` with ``n = (a, 1) x (b, 1)``. A finite
set of such constraints is a polyhedral cone in R^3, which is what the
region and decomposition code manipulates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from src.entity.models import Chart, HalfPlane, Lottery, Menu, PrizeRanking
from src.services.exceptions import ChartError, DegenerateGeometryError, InvalidLotteryError, InvalidMenuError

logger = logging.getLogger(__name__)

E3 = (Fraction(0), Fraction(0), Fraction(1))
MM_VERTICES = {1: (Fraction(1), Fraction(0)), 2: (Fraction(0), Fraction(1)), 3: (Fraction(0), Fraction(0))}
SLOPE_BEST = (Fraction(0), Fraction(1))
SLOPE_WORST = (Fraction(0), Fraction(-1))
SLOPE_MIDDLE = (Fraction(-1), Fraction(0))


def xy(p) -> tuple:
    if isinstance(p, Lottery):
        return (p.x, p.y)
    return (p[0], p[1])


def mm_xy(p) -> tuple:
    """
    MM coordinates of a lottery or a plain point.

    SLOPE coordinates only mean something under a prize ranking, so SLOPE
    lotteries are refused here; convert them with :func:`chart_convert` first.
    """
    if isinstance(p, Lottery) and p.chart is not Chart.MM:
        raise InvalidLotteryError(f'Lottery {p} is in the {p.chart.value} chart; convert it to MM with chart_convert first')
    return xy(p)


def cross_value(a, b, c):
    """
    z-component of (b - a) x (c - a).
    """
    ax, ay = xy(a)
    bx, by = xy(b)
    cx, cy = xy(c)
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def sign(value) -> int:
    return (value > 0) - (value < 0)


def orient(a, b, c) -> int:
    """
    The orientation predicate: +1 if a, b, c turn counterclockwise, -1 if clockwise, 0 if collinear.

    :param a: point: First point
    :param b: point: Second point
    :param c: point: Third point
    :return: int: Sign of the cross product (b - a) x (c - a)
    """
    return sign(cross_value(a, b, c))


def angle_at(p, q, r) -> float:
    """
    The angle qpr in degrees.

    :param p: point: Apex of the angle
    :param q: point: End of the first ray
    :param r: point: End of the second ray
    :return: float: Angle in [0, 180]
    """
    px, py = xy(p)
    qx, qy = xy(q)
    rx, ry = xy(r)
    u = (qx - px, qy - py)
    v = (rx - px, ry - py)
    if not any(u) or not any(v):
        raise DegenerateGeometryError('Angle is undefined when a ray has zero length')
    cross = float(u[0] * v[1] - u[1] * v[0])
    dot = float(u[0] * v[0] + u[1] * v[1])
    return math.degrees(math.atan2(abs(cross), dot))


# -- charts ---------------------------------------------------------------

def _prize_masses(point, chart: Chart, ranking: PrizeRanking) -> dict:
    x, y = xy(point)
    if chart is Chart.MM:
        return {1: x, 2: y, 3: 1 - x - y}
    middle = -x
    best = (1 + x + y) / 2
    worst = (1 + x - y) / 2
    return {ranking.best: best, ranking.worst: worst, ranking.middle: middle}


def _from_masses(masses: dict, chart: Chart, ranking: PrizeRanking) -> tuple:
    if chart is Chart.MM:
        return (masses[1], masses[2])
    return (-masses[ranking.middle], masses[ranking.best] - masses[ranking.worst])


def convert_point(point, source: Chart, target: Chart, ranking: PrizeRanking | None) -> tuple:
    """
    Affine chart change for any point of the plane, pivots included.

    :param point: point: Coordinates in the source chart
    :param source: Chart: Chart of the input
    :param target: Chart: Requested chart
    :param ranking: PrizeRanking | None: Prize roles, required by the SLOPE chart
    :return: tuple: Coordinates in the target chart
    """
    source, target = Chart(source), Chart(target)
    if source is target:
        return xy(point)
    if ranking is None:
        raise ChartError('Converting to or from the SLOPE chart needs a best/worst/middle prize assignment')
    return _from_masses(_prize_masses(point, source, ranking), target, ranking)


def chart_convert(p: Lottery, target: Chart, ranking: PrizeRanking | None = None) -> Lottery:
    """
    Re-expresses a lottery in another chart.

    :param p: Lottery: Lottery to convert
    :param target: Chart: MM or SLOPE
    :param ranking: PrizeRanking | None: Prize roles
    :return: Lottery: Same lottery, other coordinates
    """
    target = Chart(target)
    if p.chart is target:
        return p
    x, y = convert_point(p, p.chart, target, ranking)
    return Lottery(x, y, target)


def in_simplex(point, strict: bool = False) -> bool:
    """
    Membership of an MM-chart point in the closed (or open) simplex.
    """
    x, y = xy(point)
    if strict:
        return x > 0 and y > 0 and x + y < 1
    return x >= 0 and y >= 0 and x + y <= 1


# -- lines ----------------------------------------------------------------

def lift(p) -> tuple:
    x, y = mm_xy(p)
    return (x, y, Fraction(1) if isinstance(x, Fraction) else 1.0)


def cross3(u, v) -> tuple:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def dot3(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def neg3(u) -> tuple:
    return (-u[0], -u[1], -u[2])


def line_normal(a, b) -> tuple:
    """
    Homogeneous normal of the directed line a -> b; positive on its left.
    """
    if xy(a) == xy(b):
        raise DegenerateGeometryError('A line needs two distinct points')
    return cross3(lift(a), lift(b))


def halfplane_normal(h: HalfPlane) -> tuple:
    n = line_normal(h.a, h.b)
    return n if h.side > 0 else neg3(n)


def dehomogenize(v) -> tuple:
    if v[2] == 0:
        raise DegenerateGeometryError('Point at infinity has no planar coordinates')
    return (v[0] / v[2], v[1] / v[2])


def parallel(n, m) -> bool:
    """
    Whether two homogeneous lines are parallel (or coincide) in the plane.
    """
    return n[0] * m[1] - n[1] * m[0] == 0


def same_line(n, m) -> bool:
    return not any(cross3(n, m))


def line_intersection(n, m) -> tuple | None:
    """
    Planar intersection point of two homogeneous lines, or None when they are parallel.
    """
    v = cross3(n, m)
    if v[2] == 0:
        return None
    return dehomogenize(v)


def side_of(n, point) -> int:
    return sign(dot3(n, lift(point)))


def simplex_chord(n) -> tuple | None:
    """
    Intersection of a homogeneous line with the closed MM simplex.

    :param n: tuple: Homogeneous line
    :return: tuple | None: The two chord endpoints, or None when the line misses the simplex or only touches a vertex
    """
    vertices = [MM_VERTICES[1], MM_VERTICES[2], MM_VERTICES[3]]
    values = [dot3(n, lift(v)) for v in vertices]
    points = [v for v, s in zip(vertices, values) if s == 0]
    for i, j in ((0, 1), (1, 2), (2, 0)):
        si, sj = values[i], values[j]
        if si * sj < 0:
            t = si / (si - sj)
            (ax, ay), (bx, by) = vertices[i], vertices[j]
            points.append((ax + t * (bx - ax), ay + t * (by - ay)))
    unique = []
    for point in points:
        if point not in unique:
            unique.append(point)
    if len(unique) < 2:
        return None
    return unique[0], unique[1]


# -- convex hulls and faces -------------------------------------------------

def extreme_points(points: Iterable) -> list:
    """
    Vertices of the convex hull in counterclockwise order, collinear points dropped.
    """
    pts = sorted(set(xy(p) for p in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and cross_value(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) >= 2 else pts[:1] + pts[-1:]


def _on_segment(p, a, b) -> bool:
    if orient(a, b, p) != 0:
        return False
    (px, py), (ax, ay), (bx, by) = xy(p), xy(a), xy(b)
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def in_hull(point, hull: Sequence) -> bool:
    """
    Membership of a point in the closed convex hull given by :func:`extreme_points`.
    """
    if len(hull) == 1:
        return xy(point) == hull[0]
    if len(hull) == 2:
        return _on_segment(point, hull[0], hull[1])
    return all(orient(hull[i], hull[(i + 1) % len(hull)], point) >= 0 for i in range(len(hull)))


def face_of(A: Menu, D: Menu) -> bool:
    """
    Whether conv(A) is a face of conv(D) and conv(A) meets D exactly in A.

    :param A: Menu: Candidate face, a sub-menu of D
    :param D: Menu: Menu
    :return: bool
    """
    a_points = [xy(p) for p in A]
    d_points = [xy(p) for p in D]
    a_set = set(a_points)
    if not a_set <= set(d_points):
        raise InvalidMenuError('face_of expects A to be a subset of D')
    a_hull = extreme_points(a_points)
    for d in d_points:
        if d not in a_set and in_hull(d, a_hull):
            return False
    d_hull = extreme_points(d_points)
    if len(a_set) == 1:
        return a_points[0] in d_hull
    if len(a_hull) >= 3:
        return set(d_hull) <= a_set
    a1, a2 = a_hull[0], a_hull[-1]
    sides = {orient(a1, a2, d) for d in d_points} - {0}
    if len(sides) > 1:
        return False
    return all(_on_segment(d, a1, a2) for d in d_points if orient(a1, a2, d) == 0)


# -- homogeneous cones ------------------------------------------------------

def _orthogonal_pair(n) -> list:
    zero = n[0] - n[0]
    if n[0] != 0 or n[1] != 0:
        u = (-n[1], n[0], zero)
    else:
        u = (n[2], zero, zero)
    return [u, cross3(n, u)]


def _dedupe_rays(rays: Iterable) -> list:
    unique = []
    for ray in rays:
        if not any(not any(cross3(ray, other)) and dot3(ray, other) > 0 for other in unique):
            unique.append(ray)
    return unique


def cone_generators(normals: Sequence) -> tuple[list, list]:
    """
    Generators of the cone {Y : n . Y >= 0 for every n}.

    :param normals: Sequence: Homogeneous constraint normals
    :return: tuple: (extreme rays, basis of the lineality space)
    """
    normals = [n for n in normals if any(n)]
    if not normals:
        unit = (Fraction(1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(1), Fraction(0)), E3
        return [], list(unit)
    base = normals[0]
    second = next((n for n in normals if any(cross3(base, n))), None)
    if second is None:
        lineality = _orthogonal_pair(base)
        if any(dot3(n, base) < 0 for n in normals):
            return [], lineality
        return [base], lineality
    axis = cross3(base, second)
    third = next((n for n in normals if dot3(n, axis) != 0), None)
    if third is None:
        candidates = []
        for n in normals:
            d = cross3(axis, n)
            candidates += [d, neg3(d)]
        return _dedupe_rays(c for c in candidates if all(dot3(k, c) >= 0 for k in normals)), [axis]
    candidates = []
    for i, n in enumerate(normals):
        for m in normals[i + 1:]:
            c = cross3(n, m)
            if any(c):
                candidates += [c, neg3(c)]
    return _dedupe_rays(c for c in candidates if all(dot3(k, c) >= 0 for k in normals)), []


def interior_point(normals: Sequence) -> tuple | None:
    """
    A vector strictly inside every constraint, or None when the cone has empty interior.
    """
    rays, lineality = cone_generators(normals)
    if rays:
        z = tuple(sum(r[k] for r in rays) for k in range(3))
    else:
        z = (Fraction(0), Fraction(0), Fraction(0))
    if all(dot3(n, z) > 0 for n in normals if any(n)):
        return z
    return None


def has_interior(normals: Sequence) -> bool:
    active = [n for n in normals if any(n)]
    if not active:
        return True
    return interior_point(normals) is not None


def implied(normals: Sequence, n) -> bool:
    """
    Whether the constraint n . Y >= 0 holds on the whole cone cut out by ``normals``.
    """
    rays, lineality = cone_generators(normals)
    return all(dot3(n, r) >= 0 for r in rays) and all(dot3(n, l) == 0 for l in lineality)


def essential(normals: Sequence, protected: int = 0) -> list[int]:
    """
    Indices of an irredundant subset cutting out the same cone.

    Redundant constraints are removed in index order, so of two identical
    constraints the later one survives. The last ``protected`` normals are
    never removed.

    :param normals: Sequence: Constraint normals
    :param protected: int: Number of trailing normals to keep unconditionally
    :return: list[int]
    """
    keep = list(range(len(normals)))
    limit = len(normals) - protected
    for i in range(limit):
        others = [normals[k] for k in keep if k != i]
        if implied(others, normals[i]):
            keep.remove(i)
    return keep


@dataclass
class Region:
    halfplanes: list
    faces: list = field(default_factory=list)
    vertices: list = field(default_factory=list)
    directions: list = field(default_factory=list)
    empty: bool = False

    @property
    def bounded(self) -> bool:
        return not self.empty and not self.directions

    @property
    def face_count(self) -> int:
        return len(self.faces)


def region_from_normals(normals: Sequence, halfplanes: list | None = None) -> Region:
    """
    Planar region {x : n . (x, 1) >= 0 for every n} with its one-dimensional faces.

    :param normals: Sequence: Homogeneous half-plane normals
    :param halfplanes: list | None: Originating half-planes, kept for reporting
    :return: Region
    """
    normals = list(normals)
    constraints = normals + [E3]
    if not has_interior(constraints):
        return Region(halfplanes=halfplanes or normals, empty=True)
    kept = essential(constraints, protected=1)
    faces = [k for k in kept if k < len(normals)]
    rays, lineality = cone_generators([constraints[k] for k in kept])
    vertices = [dehomogenize(r) for r in rays if r[2] != 0] if not lineality else []
    directions = [(r[0], r[1]) for r in rays if r[2] == 0]
    for l in lineality:
        directions += [(l[0], l[1]), (-l[0], -l[1])]
    return Region(halfplanes=halfplanes or normals, faces=faces, vertices=vertices, directions=directions)


def halfplane_intersection_faces(H: Sequence[HalfPlane]) -> Region:
    """
    Intersection of half-planes, with the indices of those that contribute a one-dimensional face.

    :param H: Sequence[HalfPlane]: At least one half-plane
    :return: Region: ``face_count`` is 0 for an empty (or thin) intersection
    """
    if not H:
        raise DegenerateGeometryError('At least one half-plane is required')
    region = region_from_normals([halfplane_normal(h) for h in H], list(H))
    logger.debug('half-plane intersection: %d faces, empty=%s', region.face_count, region.empty)
    return region
