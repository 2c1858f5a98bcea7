"""
Joint choice across several menus.

A binary choice event ``p R q`` with ``R`` one of strict, weak or
indifferent is the set of preferences whose homogeneous vector ``Y``
satisfies ``Y . n > 0``, ``>= 0`` or ``== 0`` with ``n = (p,1) x (q,1)``.
Conjunctions of such events are what the decomposition module splits into
cells of at most three events.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from src.conf import constants
from src.conf.config import config
from src.entity.models import Lottery, Menu
from src.services.exceptions import InvalidMenuError
from src.services.geometry import cross3, lift
from src.services.preferences import Comparison, Preference, compare, optimal_set
from src.services.random_utility import (
    FiniteMixture,
    ProbabilityEstimate,
    RandomPreference,
    binomial_estimate,
    monte_carlo,
    nu1,
    optimal_masks,
    pair_normal,
    subset_mask,
)

logger = logging.getLogger(__name__)


class Relation(str, Enum):
    STRICT = '≻'
    WEAK = '≿'
    INDIFFERENT = '∼'


@dataclass(frozen=True)
class BinaryEvent:
    p: Lottery
    q: Lottery
    relation: Relation = Relation.STRICT

    def __post_init__(self):
        if self.p == self.q:
            raise InvalidMenuError(f'A binary event needs two distinct lotteries, got {self.p} twice')
        object.__setattr__(self, 'relation', Relation(self.relation))

    def normal(self) -> tuple:
        """
        Exact homogeneous normal (p,1) x (q,1).
        """
        return cross3(lift(self.p), lift(self.q))

    def holds(self, pref: Preference) -> bool:
        c = compare(pref, self.p, self.q)
        if self.relation is Relation.STRICT:
            return c is Comparison.BETTER
        if self.relation is Relation.WEAK:
            return c is not Comparison.WORSE
        return c is Comparison.INDIFFERENT

    def indicator(self, Y: np.ndarray) -> np.ndarray:
        values = Y @ pair_normal(self.p, self.q)
        if self.relation is Relation.STRICT:
            return values > 0
        if self.relation is Relation.WEAK:
            return values >= 0
        return values == 0

    def reversed(self) -> BinaryEvent:
        """
        The weak event ``q ≿ p``, the closed complement of ``p ≻ q``.
        """
        return BinaryEvent(self.q, self.p, Relation.WEAK)

    def __str__(self):
        return f'{self.p} {self.relation.value} {self.q}'


@dataclass(frozen=True)
class Cell:
    events: tuple

    def __post_init__(self):
        events = tuple(self.events)
        if not 1 <= len(events) <= 3:
            raise InvalidMenuError(f'A cell holds one to three events, got {len(events)}')
        object.__setattr__(self, 'events', events)

    def holds(self, pref: Preference) -> bool:
        return all(e.holds(pref) for e in self.events)

    def indicator(self, Y: np.ndarray) -> np.ndarray:
        return conjunction_indicator(Y, self.events)

    def __len__(self):
        return len(self.events)

    def __str__(self):
        return ' ∧ '.join(str(e) for e in self.events)


@dataclass
class Decomposition:
    """
    Cells whose union is the input conjunction over weighted utility preferences.

    Two distinct cells overlap only inside ``{r ∼ s}`` for one of the
    recorded witness pairs.
    """
    events: tuple
    cells: list = field(default_factory=list)
    tie_overlap_witnesses: list = field(default_factory=list)
    case: str = 'trivial'
    path: list = field(default_factory=list)

    @property
    def redispatched(self) -> bool:
        return '4-3' in self.path

    def holds(self, pref: Preference) -> bool:
        return any(cell.holds(pref) for cell in self.cells)


def conjunction_indicator(Y: np.ndarray, events: Sequence[BinaryEvent]) -> np.ndarray:
    fired = np.ones(Y.shape[0], dtype=bool)
    for e in events:
        fired &= e.indicator(Y)
    return fired


# -- joint probabilities ----------------------------------------------------

def _checked_events(events: Sequence) -> list[tuple[Menu, Menu]]:
    if not events:
        raise InvalidMenuError('At least one choice event is required')
    checked = []
    for item in events:
        try:
            menu, chosen = item
        except (TypeError, ValueError):
            raise InvalidMenuError(f'A choice event is a (menu, chosen subset) pair, got {item!r}')
        if not isinstance(menu, Menu):
            menu = Menu.of(*menu)
        members = list(chosen)
        if not members or not set(members) <= set(menu):
            raise InvalidMenuError(f'Chosen set must be a nonempty subset of {menu}')
        checked.append((menu, menu.sub(members)))
    return checked


def joint_choice_prob(mu: RandomPreference, events: Sequence, n: int | None = None, seed: int | None = None,
                      threads: int | None = None) -> ProbabilityEstimate:
    """
    Probability that, for every (menu, subset) pair, the subset is exactly the optimal set of the menu.

    :param mu: RandomPreference: Random preference
    :param events: Sequence: (Menu, chosen subset) pairs
    :param n: int | None: Monte Carlo sample size
    :param seed: int | None: Monte Carlo seed
    :param threads: int | None: Worker threads
    :return: ProbabilityEstimate: Exact for finite mixtures
    """
    checked = _checked_events(events)
    if isinstance(mu, FiniteMixture):
        total = sum((w for pref, w in mu.components
                     if all(optimal_set(pref, menu).key == chosen.key for menu, chosen in checked)), Fraction(0))
        return ProbabilityEstimate(total)
    n = n or config.mc_samples
    targets = [(menu, subset_mask(menu, chosen)) for menu, chosen in checked]

    def statistic(Y):
        fired = np.ones(Y.shape[0], dtype=bool)
        for menu, target in targets:
            fired &= optimal_masks(Y, menu) == target
        return np.array([np.count_nonzero(fired)])

    counts = monte_carlo(mu, statistic, n, config.seed if seed is None else seed, threads)
    return binomial_estimate(int(counts[0]), n)


def binary_events_prob(mu: RandomPreference, events: Sequence[BinaryEvent], n: int | None = None,
                       seed: int | None = None, threads: int | None = None) -> ProbabilityEstimate:
    """
    Probability of a conjunction of binary events; relations may be strict, weak or indifferent.
    """
    if not events:
        raise InvalidMenuError('At least one binary event is required')
    if isinstance(mu, FiniteMixture):
        return ProbabilityEstimate(sum((w for pref, w in mu.components if all(e.holds(pref) for e in events)),
                                       Fraction(0)))
    n = n or config.mc_samples
    counts = monte_carlo(mu, lambda Y: np.array([np.count_nonzero(conjunction_indicator(Y, events))]),
                         n, config.seed if seed is None else seed, threads)
    return binomial_estimate(int(counts[0]), n)


def cells_probability(mu: RandomPreference, decomposition: Decomposition, n: int | None = None,
                      seed: int | None = None, threads: int | None = None) -> ProbabilityEstimate:
    """
    Sum over cells of the probability of each cell.

    For a sampler that puts no mass on ties this equals the probability of
    the decomposed conjunction, which is how joint choice over many binary
    menus is recovered from joint choice over three.

    :return: ProbabilityEstimate: Exact for finite mixtures; otherwise the stderr is the sum of per-cell stderrs
    """
    estimates = [binary_events_prob(mu, cell.events, n, seed, threads) for cell in decomposition.cells]
    if not estimates:
        return ProbabilityEstimate(Fraction(0))
    value = sum((e.value for e in estimates), Fraction(0) if all(e.exact for e in estimates) else 0.0)
    return ProbabilityEstimate(value, sum(e.stderr for e in estimates), max(e.samples for e in estimates),
                               all(e.exact for e in estimates))


def footnote_counterexample(mu: RandomPreference, p: Lottery, q: Lottery, r: Lottery, n: int | None = None,
                            seed: int | None = None, threads: int | None = None) -> ProbabilityEstimate:
    """
    Probability that p is chosen from {p, q} while q' is chosen from {p', q'},
    where p' and q' are the even mixtures of p and q with r.

    Every expected utility preference ranks the mixtures as it ranks p and
    q, so the pattern has probability zero under random expected utility.

    :param mu: RandomPreference: Random preference
    :param p: Lottery: First lottery
    :param q: Lottery: Second lottery
    :param r: Lottery: Common mixing lottery
    :return: ProbabilityEstimate
    """
    half = constants.HALF
    p2 = p.mix(r, half)
    q2 = q.mix(r, half)
    events = [(Menu((p, q)), [p]), (Menu((p2, q2)), [q2])]
    return joint_choice_prob(mu, events, n, seed, threads)


# -- oracle -----------------------------------------------------------------

def _witness_normals(d: Decomposition) -> np.ndarray:
    if not d.tie_overlap_witnesses:
        return np.zeros((0, 3))
    return np.array([pair_normal(r, s) for r, s in d.tie_overlap_witnesses])


def oracle_validate(d: Decomposition, events: Sequence[BinaryEvent] | None = None, n_samples: int = 100_000,
                    seed: int | None = None, radii: Sequence[float] | None = None, tie_tol: float = 1e-9) -> dict:
    """
    Brute-force check of a decomposition against sampled weighted utility preferences.

    For every sample the conjunction of ``events`` must fire exactly when
    some cell fires, and two cells may fire together only on a tie of a
    recorded witness pair.

    :param d: Decomposition: Decomposition under test
    :param events: Sequence[BinaryEvent] | None: Conjunction it claims to decompose; defaults to ``d.events``
    :param n_samples: int: Samples per radius
    :param seed: int | None: Seed
    :param radii: Sequence[float] | None: Radii of the circle laws sampled
    :param tie_tol: float: Relative tolerance for being indifferent on a witness pair
    :return: dict: samples, fired, mismatches, double_fires, double_fires_off_witness
    """
    events = tuple(d.events if events is None else events)
    radii = constants.DEFAULT_RADII if radii is None else tuple(radii)
    seed = config.seed if seed is None else seed
    witnesses = _witness_normals(d)

    def statistic(Y):
        truth = conjunction_indicator(Y, events)
        fires = np.zeros(Y.shape[0], dtype=np.int64)
        for cell in d.cells:
            fires += cell.indicator(Y)
        double = fires >= 2
        if len(witnesses):
            scale = np.linalg.norm(Y, axis=1)[:, None] * np.linalg.norm(witnesses, axis=1)[None, :]
            on_tie = np.any(np.abs(Y @ witnesses.T) <= tie_tol * scale, axis=1)
        else:
            on_tie = np.zeros(Y.shape[0], dtype=bool)
        return np.array([np.count_nonzero(truth), np.count_nonzero(truth != (fires >= 1)),
                         np.count_nonzero(double), np.count_nonzero(double & ~on_tie)])

    totals = np.zeros(4, dtype=np.int64)
    for k, radius in enumerate(radii):
        totals += monte_carlo(nu1(radius), statistic, n_samples, seed + k)
    report = {'samples': n_samples * len(radii), 'fired': int(totals[0]), 'mismatches': int(totals[1]),
              'double_fires': int(totals[2]), 'double_fires_off_witness': int(totals[3])}
    logger.info('oracle: %d cells, %s', len(d.cells), report)
    return report
