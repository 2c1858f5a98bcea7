from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from itertools import product
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from src.conf.config import config
from src.entity.models import Chart, Menu, PrizeRanking, as_number
from src.services.exceptions import InvalidRepresentationError
from src.services.geometry import (
    MM_VERTICES,
    convert_point,
    cross3,
    in_simplex,
    line_intersection,
    line_normal,
    mm_xy,
    orient,
    sign,
)

logger = logging.getLogger(__name__)

DEFAULT_RANKING = PrizeRanking(best=2, worst=1, middle=3)


class Comparison(IntEnum):
    WORSE = -1
    INDIFFERENT = 0
    BETTER = 1

    @property
    def symbol(self) -> str:
        return {1: '≻', 0: '∼', -1: '≺'}[self.value]


class Orientation(IntEnum):
    CLOCKWISE = 1
    COUNTERCLOCKWISE = -1


def masses(p) -> tuple:
    """
    Probabilities of w1, w2, w3 for an MM-chart lottery.
    """
    x, y = mm_xy(p)
    return (x, y, 1 - x - y)


class Preference(ABC):
    kind: str = 'preference'

    @abstractmethod
    def compare(self, p, q) -> Comparison:
        ...

    def homogeneous(self) -> tuple | None:
        """
        Vector Y with p ≿ q iff Y . ((p,1) x (q,1)) >= 0, when the preference has one.
        """
        return None


@dataclass(frozen=True)
class EUPreference(Preference):
    direction: tuple
    kind = 'eu'

    def __post_init__(self):
        direction = tuple(as_number(v) for v in self.direction)
        if len(direction) != 2 or not any(direction):
            raise InvalidRepresentationError('EU direction must be a nonzero planar vector')
        object.__setattr__(self, 'direction', direction)

    def value(self, p):
        x, y = mm_xy(p)
        return self.direction[0] * x + self.direction[1] * y

    def compare(self, p, q) -> Comparison:
        (px, py), (qx, qy) = mm_xy(p), mm_xy(q)
        return Comparison(sign(self.direction[0] * (px - qx) + self.direction[1] * (py - qy)))

    def homogeneous(self) -> tuple:
        dx, dy = self.direction
        return (dy, -dx, dx * 0)


@dataclass(frozen=True)
class WUPreference(Preference):
    """
    Weighted utility as a pencil of indifference lines through a pivot outside
    the simplex.

    ``orientation`` is the direction in which preference increases as the
    indifference line turns about the pivot. CLOCKWISE (+1) means
    p ≻ q iff ``orient(pivot, p, q) > 0`` in MM coordinates, i.e. p lies
    clockwise of q as seen from the pivot; COUNTERCLOCKWISE (-1) flips the
    sign. With w2 best and w1 worst, the pivot (-1/2, -1/2) sees w2
    counterclockwise of w1 and so increases COUNTERCLOCKWISE (-1); the pivot
    (1, 1) increases CLOCKWISE (+1). The homogeneous vector is
    ``orientation * (pivot, 1)``.
    """
    pivot: tuple
    orientation: Orientation
    kind = 'wu_pivot'

    def __post_init__(self):
        pivot = tuple(as_number(v) for v in self.pivot)
        object.__setattr__(self, 'pivot', pivot)
        object.__setattr__(self, 'orientation', Orientation(self.orientation))
        if in_simplex(pivot):
            raise InvalidRepresentationError(f'Pivot {pivot} must lie strictly outside the simplex')

    def compare(self, p, q) -> Comparison:
        return Comparison(int(self.orientation) * orient(self.pivot, mm_xy(p), mm_xy(q)))

    def homogeneous(self) -> tuple:
        o = int(self.orientation)
        x, y = self.pivot
        return (o * x, o * y, o * (x * 0 + 1))


def weighted_value(f: WUFunctional, p):
    """
    Weighted utility of a lottery.

    :param f: WUFunctional: Utility and weight of each prize
    :param p: Lottery: MM-chart lottery
    :return: The value, exact for rational inputs
    """
    m = masses(p)
    den = sum(mi * gi for mi, gi in zip(m, f.g))
    if den == 0:
        raise InvalidRepresentationError(f'Weighted utility denominator vanishes at {p}')
    return sum(mi * gi * ui for mi, gi, ui in zip(m, f.g, f.u)) / den


@dataclass(frozen=True)
class WUFunctional(Preference):
    """
    Weighted utility V(p) = sum p_n g_n u_n / sum p_n g_n over the prizes w1, w2, w3.
    """
    u: tuple
    g: tuple
    kind = 'wu_functional'

    def __post_init__(self):
        u = tuple(as_number(v) for v in self.u)
        g = tuple(as_number(v) for v in self.g)
        if len(u) != 3 or len(g) != 3:
            raise InvalidRepresentationError('Weighted utility needs u and g for the three prizes')
        if not any(g) or not (all(v >= 0 for v in g) or all(v <= 0 for v in g)):
            raise InvalidRepresentationError('g must be nonnegative (or nonpositive) and not identically zero')
        object.__setattr__(self, 'u', u)
        object.__setattr__(self, 'g', g)

    def value(self, p):
        return weighted_value(self, p)

    def compare(self, p, q) -> Comparison:
        return Comparison(sign(self.value(p) - self.value(q)))

    def level_line(self, v) -> tuple:
        """
        Coefficients (A, B, C) of the indifference line A x + B y + C = 0 at value v.
        """
        (g1, g2, g3), (u1, u2, u3) = self.g, self.u
        return (g1 * (u1 - v) - g3 * (u3 - v), g2 * (u2 - v) - g3 * (u3 - v), g3 * (u3 - v))

    def pivot(self) -> tuple:
        """
        Common point of all indifference lines.

        :return: tuple: Pivot in MM coordinates
        """
        (g1, g2, g3), (u1, u2, u3) = self.g, self.u
        a11, a12, b1 = g1 - g3, g2 - g3, -g3
        a21, a22, b2 = g1 * u1 - g3 * u3, g2 * u2 - g3 * u3, -g3 * u3
        det = a11 * a22 - a12 * a21
        if det == 0:
            raise InvalidRepresentationError('Indifference lines are parallel: this is expected utility, not strict weighted utility')
        return ((b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a21) / det)

    def to_preference(self) -> WUPreference:
        """
        Geometric form of the functional: pivot plus direction of increasing preference.

        :return: WUPreference
        """
        best = max(range(3), key=lambda k: self.u[k]) + 1
        worst = min(range(3), key=lambda k: self.u[k]) + 1
        if self.u[best - 1] == self.u[worst - 1]:
            raise InvalidRepresentationError('Constant utility has no direction of increasing preference')
        pivot = self.pivot()
        if in_simplex(pivot):
            raise InvalidRepresentationError(f'Pivot {pivot} falls inside the simplex')
        o = orient(pivot, MM_VERTICES[best], MM_VERTICES[worst])
        if o == 0:
            raise InvalidRepresentationError('Best and worst prizes lie on one indifference line')
        return WUPreference(pivot, Orientation(o))


@dataclass(frozen=True)
class SemiWeightedPreference(Preference):
    upper: WUFunctional
    lower: WUFunctional
    threshold: Fraction
    kind = 'semi_weighted'

    def __post_init__(self):
        threshold = as_number(self.threshold)
        object.__setattr__(self, 'threshold', threshold)
        a = self.upper.level_line(threshold)
        b = self.lower.level_line(threshold)
        if not any(a) or not any(b) or any(cross3(a, b)):
            raise InvalidRepresentationError('Upper and lower functionals must share the threshold indifference line')

    def value(self, p):
        v = self.upper.value(p)
        if v >= self.threshold:
            return v
        return self.lower.value(p)

    def compare(self, p, q) -> Comparison:
        return Comparison(sign(self.value(p) - self.value(q)))


def _lottery_grid(steps: int) -> list[tuple]:
    return [(Fraction(i, steps), Fraction(j, steps)) for i in range(steps + 1) for j in range(steps + 1 - i)]


@dataclass(frozen=True, eq=False)
class ImplicitBetweenness(Preference):
    """
    Betweenness preference in implicit form: V(p) is the v in [0, 1] solving
    sum_i u(w_i, v) p_i = v, with u(worst, .) = 0 and u(best, .) = 1.
    """
    local_utility: Callable[[int, float], float]
    ranking: PrizeRanking = DEFAULT_RANKING
    tol: float = field(default_factory=lambda: config.bisection_tol)
    grid: int = field(default_factory=lambda: config.uniqueness_grid)
    kind = 'implicit'

    def __post_init__(self):
        levels = np.linspace(0.0, 1.0, self.grid)
        for v in levels:
            if abs(self.local_utility(self.ranking.worst, v)) > 1e-12 or abs(self.local_utility(self.ranking.best, v) - 1) > 1e-12:
                raise InvalidRepresentationError('Local utility must be normalised to 0 at the worst and 1 at the best prize')
        steps = max(2, int(np.sqrt(2 * self.grid)))
        for point in _lottery_grid(steps):
            values = np.array([self._residual(point, v) for v in levels])
            if values[0] < -1e-12 or values[-1] > 1e-12:
                raise InvalidRepresentationError(f'No sign change on [0, 1] at lottery {point}')
            signs = np.sign(values[np.abs(values) > 1e-12])
            if np.count_nonzero(np.diff(signs)) > 1:
                raise InvalidRepresentationError(f'Several roots bracketed at lottery {point}')

    @classmethod
    def from_weighted(cls, f: WUFunctional, ranking: PrizeRanking = DEFAULT_RANKING, **kwargs) -> ImplicitBetweenness:
        """
        Local utility u(w, v) = g(w)(u(w) - v) + v of a weighted utility functional.
        """
        u = [float(v) for v in f.u]
        g = [float(v) for v in f.g]
        return cls(lambda prize, v: g[prize - 1] * (u[prize - 1] - v) + v, ranking, **kwargs)

    def _residual(self, p, v: float) -> float:
        m = [float(mi) for mi in masses(p)]
        return sum(self.local_utility(prize, v) * m[prize - 1] for prize in (1, 2, 3)) - v

    def value(self, p) -> float:
        return implicit_value(self, p, self.tol)

    def compare(self, p, q) -> Comparison:
        diff = self.value(p) - self.value(q)
        if abs(diff) <= 4 * self.tol:
            return Comparison.INDIFFERENT
        return Comparison(sign(diff))


def implicit_value(b: ImplicitBetweenness, p, tol: float | None = None) -> float:
    """
    Solves the implicit-utility equation for one lottery by bisection.

    :param b: ImplicitBetweenness: Validated representation
    :param p: Lottery: MM-chart lottery
    :param tol: float | None: Root tolerance, defaults to the configured bisection tolerance
    :return: float: Value in [0, 1]
    """
    tol = config.bisection_tol if tol is None else tol
    lo, hi = b._residual(p, 0.0), b._residual(p, 1.0)
    if lo == 0:
        return 0.0
    if hi == 0:
        return 1.0
    if lo * hi > 0:
        raise InvalidRepresentationError(f'No sign change on [0, 1] at {p}')
    return float(bisect(lambda v: b._residual(p, v), 0.0, 1.0, xtol=tol, maxiter=200))


def compare(pref: Preference, p, q) -> Comparison:
    """
    Trichotomous comparison of two lotteries.

    :param pref: Preference: Any representation
    :param p: Lottery: First lottery
    :param q: Lottery: Second lottery
    :return: Comparison
    """
    return pref.compare(p, q)


def optimal_set(pref: Preference, D: Menu) -> Menu:
    """
    All lotteries of the menu that are weakly preferred to every other one.

    :param pref: Preference: Preference relation
    :param D: Menu: Menu
    :return: Menu: Nonempty sub-menu
    """
    best = [p for p in D if all(pref.compare(p, q) != Comparison.WORSE for q in D)]
    return D.sub(best)


def fosd(p, q, rank: PrizeRanking = DEFAULT_RANKING) -> bool:
    """
    Weak first-order stochastic dominance of p over q.
    """
    mp, mq = masses(p), masses(q)
    return mp[rank.best - 1] >= mq[rank.best - 1] and mp[rank.worst - 1] <= mq[rank.worst - 1]


def _admissible_pivot(pivot: tuple, rank: PrizeRanking) -> bool:
    x, y = convert_point(pivot, Chart.MM, Chart.SLOPE, rank)
    if x <= -1:
        return abs(y) <= -x - 1
    if x >= 1:
        return abs(y) <= x - 1
    return False


def is_fosd_monotone(pref: Preference, rank: PrizeRanking = DEFAULT_RANKING, grid: int | None = None) -> bool:
    """
    Whether the preference respects first-order stochastic dominance.

    Weighted utility and expected utility are decided exactly; other
    representations are checked on every dominating pair of a lottery grid.

    :param pref: Preference: Preference to test
    :param rank: PrizeRanking: Prize roles
    :param grid: int | None: Approximate number of grid lotteries
    :return: bool
    """
    best, worst, middle = (MM_VERTICES[k] for k in (rank.best, rank.worst, rank.middle))
    if isinstance(pref, WUFunctional):
        try:
            pref = pref.to_preference()
        except InvalidRepresentationError:
            pass
    if isinstance(pref, WUPreference):
        return _admissible_pivot(pref.pivot, rank) and pref.compare(best, worst) == Comparison.BETTER
    if isinstance(pref, EUPreference):
        return pref.compare(middle, worst) != Comparison.WORSE and pref.compare(best, middle) != Comparison.WORSE
    grid = grid or config.uniqueness_grid
    steps = max(2, int(np.sqrt(2 * grid)))
    points = _lottery_grid(steps)
    for p, q in product(points, points):
        if p != q and fosd(p, q, rank) and pref.compare(p, q) == Comparison.WORSE:
            logger.debug('FOSD violated: %s dominates %s but is worse', p, q)
            return False
    return True


def wu_from_observations(p, q, p2, q2, better, worse) -> WUPreference:
    """
    The weighted utility preference with p ∼ q, p2 ∼ q2 and better ≻ worse.

    :return: WUPreference
    """
    pivot = line_intersection(line_normal(p, q), line_normal(p2, q2))
    if pivot is None:
        raise InvalidRepresentationError('Parallel indifference lines describe expected utility, not weighted utility')
    o = orient(pivot, better, worse)
    if o == 0:
        raise InvalidRepresentationError('The strict observation lies on one indifference line')
    return WUPreference(pivot, Orientation(o))
