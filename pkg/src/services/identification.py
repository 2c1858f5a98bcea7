"""
Identification of FOSD-monotone random weighted utility from binary choice.

In the SLOPE chart a monotone weighted utility preference is indexed by the
slopes (m0, m1) of its indifference lines through the worst and the best
prize. The indifference line through p_a = a*best + (1-a)*worst then has
slope S_a = a*m1 + (1-a)*m0, and binary choices between p_a and a companion
lottery reveal the CDF of S_a. Power moments of S_a for several values of a
form a binomially scaled Vandermonde system in the joint moments of (m0, m1).
"""
from __future__ import annotations

import logging
import math
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.special import comb

from src.conf import constants
from src.conf.config import config
from src.entity.models import Chart, PrizeRanking
from src.services.exceptions import (
    ChoiceLabError,
    ConditioningWarning,
    DegenerateGeometryError,
    InvalidDistributionError,
    SingularSystemError,
)
from src.services.geometry import convert_point, cross3, in_simplex, lift
from src.services.preferences import DEFAULT_RANKING
from src.services.random_utility import ProbabilityEstimate, SlopePair, binomial_estimate, monte_carlo

logger = logging.getLogger(__name__)


class SlopeLaw(ABC):
    kind: str = 'slope_law'

    @abstractmethod
    def sample(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        ...

    @abstractmethod
    def cdf(self, a, t):
        """
        P(a*m1 + (1-a)*m0 <= t).
        """

    def moments(self, n: int) -> dict:
        raise InvalidDistributionError(f'No closed-form moments for slope law {self.kind}')


@dataclass(frozen=True)
class FiniteSlopeLaw(SlopeLaw):
    atoms: tuple
    kind = 'finite'

    def __post_init__(self):
        atoms = tuple(((Fraction(m0), Fraction(m1)), Fraction(w)) for (m0, m1), w in self.atoms)
        if not atoms:
            raise InvalidDistributionError('A finite slope law needs at least one atom')
        if any(w <= 0 for _, w in atoms) or sum(w for _, w in atoms) != 1:
            raise InvalidDistributionError('Atom weights must be positive and sum to exactly 1')
        if any(abs(m0) > 1 or abs(m1) > 1 for (m0, m1), _ in atoms):
            raise InvalidDistributionError('Slope support must lie in [-1, 1]^2')
        object.__setattr__(self, 'atoms', atoms)

    def sample(self, rng, n):
        picks = rng.choice(len(self.atoms), size=n, p=[float(w) for _, w in self.atoms])
        support = np.array([[float(m0), float(m1)] for (m0, m1), _ in self.atoms])
        return support[picks, 0], support[picks, 1]

    def cdf(self, a, t):
        return sum((w for (m0, m1), w in self.atoms if a * m1 + (1 - a) * m0 <= t), Fraction(0))

    def moments(self, n: int) -> dict:
        return {(i, j): sum((w * m1 ** i * m0 ** j for (m0, m1), w in self.atoms), Fraction(0))
                for i in range(n + 1) for j in range(n + 1 - i)}


def _uniform_power(k: int) -> Fraction:
    return Fraction(1, k + 1) if k % 2 == 0 else Fraction(0)


@dataclass(frozen=True)
class UniformSlopeLaw(SlopeLaw):
    """
    Independent uniform slopes on [-1, 1].
    """
    kind = 'uniform'

    def sample(self, rng, n):
        return rng.uniform(-1.0, 1.0, n), rng.uniform(-1.0, 1.0, n)

    def cdf(self, a, t):
        a = float(a)
        lo, hi = sorted((a, 1 - a))
        t = float(t)
        if t <= -(lo + hi):
            return 0.0
        if t >= lo + hi:
            return 1.0
        if t <= lo - hi:
            return (t + lo + hi) ** 2 / (8 * lo * hi)
        if t <= hi - lo:
            return lo / (2 * hi) + (t + hi - lo) / (2 * hi)
        return 1 - (lo + hi - t) ** 2 / (8 * lo * hi)

    def moments(self, n: int) -> dict:
        return {(i, j): _uniform_power(i) * _uniform_power(j) for i in range(n + 1) for j in range(n + 1 - i)}


@dataclass(frozen=True)
class CDFQuery:
    a: float
    t: float

    def __post_init__(self):
        if not 0 < self.a < 1:
            raise ChoiceLabError(f'Mixing weight a must lie strictly between 0 and 1, got {self.a}')
        if not -1 <= self.t <= 1:
            raise ChoiceLabError(f'Slope threshold t must lie in [-1, 1], got {self.t}')


@dataclass
class MomentTable:
    entries: dict = field(default_factory=dict)
    order: int = 0
    residuals: dict = field(default_factory=dict)

    def get(self, i: int, j: int):
        return self.entries[(i, j)]

    def rows(self) -> list[tuple]:
        return sorted(self.entries.items(), key=lambda item: (item[0][0] + item[0][1], -item[0][0]))


def indifference_slope(m0, m1, a):
    """
    Slope of the indifference line through p_a, measured geometrically.

    The pivot is built from the line through the worst prize with slope m0 and
    the line through the best prize with slope m1; the returned slope is the
    one of the segment pivot -> p_a and is checked against a*m1 + (1-a)*m0.

    :param m0: Number: Slope through the worst prize
    :param m1: Number: Slope through the best prize
    :param a: Number: Weight of the best prize in p_a
    :return: The slope, exact for rational inputs
    """
    if m0 == m1:
        raise DegenerateGeometryError('m0 = m1 gives parallel construction lines and no pivot')
    if not 0 < a < 1:
        raise ChoiceLabError(f'Mixing weight a must lie strictly between 0 and 1, got {a}')
    px = 2 / (m0 - m1)
    py = (m0 + m1) / (m0 - m1)
    slope = (2 * a - 1 - py) / (0 - px)
    expected = a * m1 + (1 - a) * m0
    if isinstance(slope, Fraction):
        if slope != expected:
            raise DegenerateGeometryError('Geometric slope disagrees with the convex combination of m0 and m1')
    elif abs(slope - expected) > 1e-9 * max(1.0, abs(px)):
        raise DegenerateGeometryError('Geometric slope is numerically unstable for this pivot')
    return slope


def query_lotteries(q: CDFQuery, epsilon: float | None = None, ranking: PrizeRanking = DEFAULT_RANKING) -> tuple:
    """
    MM-chart pair (p_a, q') with the line p_a q' of slope t in the SLOPE chart.

    :return: tuple: (p_a, companion) as MM coordinates
    """
    epsilon = config.query_epsilon if epsilon is None else epsilon
    a, t = float(q.a), float(q.t)
    norm = math.hypot(1.0, t)
    p_a = (0.0, 2 * a - 1)
    companion = (-epsilon / norm, 2 * a - 1 - epsilon * t / norm)
    p_mm = convert_point(p_a, Chart.SLOPE, Chart.MM, ranking)
    companion_mm = convert_point(companion, Chart.SLOPE, Chart.MM, ranking)
    if not in_simplex(companion_mm):
        raise DegenerateGeometryError(f'Companion lottery for a={a}, t={t} falls outside the simplex')
    return p_mm, companion_mm


def _query_normal(q: CDFQuery, epsilon: float | None, ranking: PrizeRanking) -> np.ndarray:
    p_mm, companion_mm = query_lotteries(q, epsilon, ranking)
    return np.array(cross3(lift(p_mm), lift(companion_mm)), dtype=float)


def slope_cdf(mu: SlopeLaw, q: CDFQuery, method: str = 'direct', n: int | None = None, seed: int | None = None,
              epsilon: float | None = None, ranking: PrizeRanking = DEFAULT_RANKING, threads: int | None = None) -> ProbabilityEstimate:
    """
    P(a*m1 + (1-a)*m0 <= t), from the law or from simulated binary choice.

    In the simulated path, p_a is chosen over the companion exactly when the
    indifference line through p_a is flatter than the line p_a q', so the
    frequency of {p_a chosen} estimates the CDF.

    :param mu: SlopeLaw: Law of (m0, m1)
    :param q: CDFQuery: Query (a, t)
    :param method: str: 'direct' or 'simulated'
    :return: ProbabilityEstimate
    """
    if method == 'direct':
        value = mu.cdf(q.a, q.t)
        return ProbabilityEstimate(value, exact=isinstance(value, Fraction))
    if method != 'simulated':
        raise ChoiceLabError(f'Unknown CDF method {method!r}')
    normal = _query_normal(q, epsilon, ranking)
    n = n or config.mc_samples
    counts = monte_carlo(SlopePair(mu, ranking), lambda Y: np.array([np.count_nonzero(Y @ normal >= 0)]),
                         n, config.seed if seed is None else seed, threads)
    return binomial_estimate(int(counts[0]), n)


class SimulatedCDFOracle:
    """
    CDF oracle backed by one fixed sample of preferences (common random numbers across queries).
    """

    def __init__(self, law: SlopeLaw, n: int, seed: int, epsilon: float | None = None,
                 ranking: PrizeRanking = DEFAULT_RANKING):
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        self.Y = SlopePair(law, ranking).sample_homogeneous(rng, n)
        self.epsilon = epsilon
        self.ranking = ranking

    def batch(self, a, ts) -> np.ndarray:
        out = np.empty(len(ts))
        for start in range(0, len(ts), 256):
            block = ts[start:start + 256]
            normals = np.array([_query_normal(CDFQuery(a, float(t)), self.epsilon, self.ranking) for t in block])
            out[start:start + len(block)] = np.mean(self.Y @ normals.T >= 0, axis=0)
        return out

    def __call__(self, a, t) -> float:
        return float(self.batch(a, [t])[0])


class LawCDFOracle:
    def __init__(self, law: SlopeLaw):
        self.law = law

    def __call__(self, a, t) -> float:
        return float(self.law.cdf(a, t))


class CDFTable:
    """
    A CDF tabulated on a uniform grid of [-1, 1], with jumps located by bisection.
    """

    def __init__(self, cdf: Callable[[float], float], grid: int, batch: Callable | None = None, jump_threshold: float | None = None):
        if grid < 2:
            raise ChoiceLabError('Quadrature grid needs at least two points')
        self.cdf = cdf
        self.t = np.linspace(-1.0, 1.0, grid)
        self.F = np.asarray(batch(self.t) if batch else [cdf(float(t)) for t in self.t], dtype=float)
        step = self.t[1] - self.t[0]
        threshold = max(1e-6, 50 * step) if jump_threshold is None else jump_threshold
        self.jumps = [(k, self._locate(k)) for k in np.nonzero(np.diff(self.F) > threshold)[0]]

    def _locate(self, k: int) -> float:
        lo, hi = float(self.t[k]), float(self.t[k + 1])
        target = (self.F[k] + self.F[k + 1]) / 2
        for _ in range(60):
            mid = (lo + hi) / 2
            if self.cdf(mid) >= target:
                hi = mid
            else:
                lo = mid
        return hi

    def moment(self, n: int) -> float:
        """
        E[S^n] = 1 - integral over [-1, 1] of n t^(n-1) F(t) dt.

        F is interpolated linearly between grid points and replaced by a step
        at every located jump; each cell is then integrated exactly against
        the polynomial weight.
        """
        if n < 1:
            raise ChoiceLabError('Moment order must be at least 1')
        lo, hi, F = self.t[:-1], self.t[1:], self.F
        rise = np.diff(F) / (hi - lo)
        cells = F[:-1] * (hi ** n - lo ** n) + rise * (n / (n + 1) * (hi ** (n + 1) - lo ** (n + 1)) - lo * (hi ** n - lo ** n))
        for k, s in self.jumps:
            cells[k] = F[k] * (s ** n - lo[k] ** n) + F[k + 1] * (hi[k] ** n - s ** n)
        return 1.0 - float(np.sum(cells))


def power_moment(cdf: Callable[[float], float], a, n: int, grid: int | None = None) -> float:
    """
    E[S_a^n] from the CDF of S_a by integration by parts.

    :param cdf: Callable: t -> P(S_a <= t) for the fixed a
    :param a: Number: Mixing weight, recorded for logging
    :param n: int: Order, at least 1
    :param grid: int | None: Number of grid points on [-1, 1]
    :return: float
    """
    table = CDFTable(cdf, grid or config.moment_grid)
    logger.debug('power moment a=%s n=%d, %d located jumps', a, n, len(table.jumps))
    return table.moment(n)


def moment_matrix(nodes: Sequence, order: int) -> list[list]:
    """
    Rows C(order, j) b^j for each node b.
    """
    return [[int(comb(order, j, exact=True)) * b ** j for j in range(order + 1)] for b in nodes]


def solve_exact(matrix: list[list], rhs: list) -> list:
    """
    Gaussian elimination over the rationals.
    """
    size = len(matrix)
    rows = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot is None:
            raise SingularSystemError('Moment system is singular; nodes must be distinct')
        rows[col], rows[pivot] = rows[pivot], rows[col]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col] / rows[col][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return [rows[i][size] / rows[i][i] for i in range(size)]


def determinant_exact(matrix: list[list]) -> Fraction:
    rows = [[Fraction(v) for v in row] for row in matrix]
    size, det = len(rows), Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        for r in range(col + 1, size):
            factor = rows[r][col] / rows[col][col]
            rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return det


def solve_moment_system(nodes: Sequence, order: int, rhs: Sequence, tol: float | None = None) -> tuple[list, float]:
    """
    Solves sum_j C(order, j) b_k^j E[m1^(order-j) m0^j] = E[(m1 + b_k m0)^order].

    :return: tuple: (moments indexed by j, max residual)
    """
    tol = config.moment_residual_tol if tol is None else tol
    if len(set(nodes)) != len(nodes):
        raise SingularSystemError('Moment system is singular; nodes must be distinct')
    matrix = moment_matrix(nodes, order)
    if all(isinstance(v, (Fraction, int)) for v in rhs) and all(isinstance(b, (Fraction, int)) for b in nodes):
        return solve_exact(matrix, list(rhs)), 0.0
    A = np.array(matrix, dtype=float)
    y = np.array(rhs, dtype=float)
    try:
        x = np.linalg.solve(A, y)
    except np.linalg.LinAlgError as err:
        raise SingularSystemError(f'Moment system of order {order} is singular') from err
    residual = float(np.max(np.abs(A @ x - y)))
    if residual > tol:
        logger.warning('moment system of order %d: residual %.3e above %.1e', order, residual, tol)
        warnings.warn(f'Moment system of order {order} has residual {residual:.3e}', ConditioningWarning)
    return [float(v) for v in x], residual


def _nodes(n: int, nodes: Sequence | None) -> list:
    nodes = list(constants.DEFAULT_MOMENT_NODES if nodes is None else nodes)
    if len(nodes) < n + 1:
        raise SingularSystemError(f'Order {n} needs {n + 1} nodes, got {len(nodes)}')
    if len(set(nodes)) != len(nodes):
        raise SingularSystemError('Moment system is singular; nodes must be distinct')
    if any(b <= 0 for b in nodes):
        raise ChoiceLabError('Nodes must be positive')
    return nodes


def recover_joint_moments(oracle: Callable, n: int, nodes: Sequence | None = None, grid: int | None = None) -> MomentTable:
    """
    Joint moments E[m1^i m0^j], i + j <= n, from CDF queries.

    :param oracle: Callable: (a, t) -> P(a*m1 + (1-a)*m0 <= t); a ``batch(a, ts)`` method is used when present
    :param n: int: Maximal total order
    :param nodes: Sequence | None: Distinct positive nodes b_k = (1 - a_k) / a_k
    :param grid: int | None: Quadrature grid size
    :return: MomentTable
    """
    if n > config.moment_max_order:
        raise ChoiceLabError(f'Order {n} exceeds the configured cap {config.moment_max_order}')
    nodes = _nodes(n, nodes)
    grid = grid or config.moment_grid
    batch = getattr(oracle, 'batch', None)
    table = MomentTable(entries={(0, 0): 1.0}, order=n)
    if n == 0:
        return table
    scaled = {}
    for b in nodes[:n + 1]:
        a = 1 / (1 + b)
        cdf = CDFTable(lambda t, a=a: oracle(a, t), grid, batch=(lambda ts, a=a: batch(a, ts)) if batch else None)
        for order in range(1, n + 1):
            scaled[(b, order)] = cdf.moment(order) / float(a) ** order
    for order in range(1, n + 1):
        used = nodes[:order + 1]
        solution, residual = solve_moment_system(used, order, [scaled[(b, order)] for b in used])
        table.residuals[order] = residual
        for j, value in enumerate(solution):
            table.entries[(order - j, j)] = value
    logger.info('recovered joint moments up to order %d, max residual %.2e', n, max(table.residuals.values()))
    return table


def direct_moments(mu: SlopeLaw, n: int) -> MomentTable:
    """
    Joint moments computed from the law itself.

    :param mu: SlopeLaw: Finite or uniform law
    :param n: int: Maximal total order
    :return: MomentTable: Exact for rational laws
    """
    return MomentTable(entries=mu.moments(n), order=n)


def moment_report(recovered: MomentTable, direct: MomentTable) -> list[dict]:
    rows = []
    for (i, j), value in recovered.rows():
        truth = direct.entries[(i, j)]
        rows.append({'i': i, 'j': j, 'recovered': float(value), 'direct': float(truth),
                     'abs_err': abs(float(value) - float(truth))})
    return rows
