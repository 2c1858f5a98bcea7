"""
Behavioral checks on random choice tables.

The three properties every random implicit expected utility satisfies are
checked on the menus a table actually holds; nothing here enumerates the
menu space, and passing all three does not certify that a table is
rationalizable.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from src.conf.config import config
from src.entity.models import CompanionRecord, Lottery, Menu, MenuFamily, as_number
from src.services.exceptions import InvalidMenuError
from src.services.geometry import face_of
from src.services.preferences import EUPreference, Preference, optimal_set
from src.services.random_utility import RCC, RandomPreference, RCCRow, sample_preference

logger = logging.getLogger(__name__)

DEFAULT_LAMBDAS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


@dataclass
class AxiomReport:
    axiom: str
    checks: int = 0
    skipped: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, checks: int, violations: list):
        self.checks += checks
        self.violations += violations


def _fmt(subset: Iterable[Lottery]) -> str:
    return '{' + ', '.join(sorted(str(p) for p in subset)) + '}'


def _tolerance(rcc: RCC, tol, *stderrs) -> float:
    if tol is not None:
        return tol
    if rcc.exact:
        return 0
    return config.z_threshold * math.sqrt(sum(s * s for s in stderrs))


def _per_row(check: Callable, rows: Sequence, threads: int | None) -> list[tuple]:
    with ThreadPoolExecutor(max_workers=threads or config.threads) as pool:
        return list(pool.map(check, rows))


def check_monotonicity(rcc: RCC, tol=None, threads: int | None = None) -> AxiomReport:
    """
    rho_D(A) <= rho_{D minus B}(A minus B) for every pair of nested table menus and every A with A minus B nonempty.

    :param rcc: RCC: Table
    :param tol: Number | None: Slack; defaults to 0 for exact tables and 4 combined standard errors otherwise
    :param threads: int | None: Worker threads
    :return: AxiomReport: ``skipped`` counts menus with no smaller table menu inside them
    """
    report = AxiomReport('monotonicity')
    rows = list(rcc.rows.values())

    def check(row: RCCRow):
        checks, violations = 0, []
        smaller = [other for other in rows if other.menu.key < row.menu.key]
        for other in smaller:
            removed = row.menu.key - other.menu.key
            for subset, prob in row.probs.items():
                kept = subset - removed
                if not kept:
                    continue
                checks += 1
                bound = other.probs.get(kept, 0)
                slack = _tolerance(rcc, tol, row.stderr.get(subset, 0.0), other.stderr.get(kept, 0.0))
                if prob > bound + slack:
                    violations.append({'menu': str(row.menu), 'subset': _fmt(subset), 'sub_menu': str(other.menu),
                                       'lhs': float(prob), 'rhs': float(bound)})
        return checks, violations, not smaller

    for checks, violations, alone in _per_row(check, rows, threads):
        report.merge(checks, violations)
        report.skipped += alone
    logger.info('monotonicity: %d checks, %d violations, %d skipped', report.checks, len(report.violations),
                report.skipped)
    return report


def check_extremeness(rcc: RCC, threads: int | None = None) -> AxiomReport:
    """
    Every subset chosen with positive probability is a face of its menu.
    """
    report = AxiomReport('extremeness')

    def check(row: RCCRow):
        checks, violations = 0, []
        for subset, prob in row.probs.items():
            if prob > 0:
                checks += 1
                if not face_of(row.menu.sub(subset), row.menu):
                    violations.append({'menu': str(row.menu), 'subset': _fmt(subset), 'lhs': float(prob)})
        return checks, violations

    for checks, violations in _per_row(check, list(rcc.rows.values()), threads):
        report.merge(checks, violations)
    logger.info('extremeness: %d checks, %d violations', report.checks, len(report.violations))
    return report


def check_stochastic_betweenness(rcc: RCC, tol=None, threads: int | None = None) -> AxiomReport:
    """
    rho_D(A) equals rho of the companion menu lam*D + (1-lam)*p at lam*A + (1-lam)*p, for every recorded (D, p, lam) and p in A.

    :param rcc: RCC: Table carrying companion records
    :param tol: Number | None: Slack; defaults to 0 for exact tables and 4 combined standard errors otherwise
    :param threads: int | None: Worker threads
    :return: AxiomReport: ``skipped`` counts records whose menus are missing from the table
    """
    report = AxiomReport('stochastic_betweenness')
    records = list(rcc.companions)

    def check(record: CompanionRecord):
        if record.base not in rcc.rows or record.mixed not in rcc.rows:
            return 0, [], True
        base, mixed = rcc.rows[record.base], rcc.rows[record.mixed]
        image = {q: q.mix(record.anchor, record.lam) for q in base.menu}
        checks, violations = 0, []
        for subset, prob in base.probs.items():
            if record.anchor not in subset:
                continue
            checks += 1
            target = frozenset(image[q] for q in subset)
            other = mixed.probs.get(target, 0)
            slack = _tolerance(rcc, tol, base.stderr.get(subset, 0.0), mixed.stderr.get(target, 0.0))
            if abs(prob - other) > slack:
                violations.append({'menu': str(base.menu), 'subset': _fmt(subset), 'sub_menu': str(mixed.menu),
                                   'anchor': str(record.anchor), 'lam': str(record.lam),
                                   'lhs': float(prob), 'rhs': float(other)})
        return checks, violations, False

    for checks, violations, missing in _per_row(check, records, threads):
        report.merge(checks, violations)
        report.skipped += missing
    logger.info('stochastic betweenness: %d checks over %d records, %d violations', report.checks, len(records),
                len(report.violations))
    return report


def check_all(rcc: RCC, tol=None, threads: int | None = None) -> list[AxiomReport]:
    return [check_monotonicity(rcc, tol, threads), check_extremeness(rcc, threads),
            check_stochastic_betweenness(rcc, tol, threads)]


# -- menus -------------------------------------------------------------------

def _check_lambda(lam, allow_one: bool = True):
    lam = as_number(lam)
    if not (0 < lam <= 1 if allow_one else 0 < lam < 1):
        raise InvalidMenuError(f'Mixing weight must lie in (0, 1{"]" if allow_one else ")"}, got {lam}')
    return lam


def mix_menus(D: Menu, D2: Menu, lam) -> Menu:
    """
    The menu {lam*p + (1-lam)*p2 : p in D, p2 in D2}, duplicates removed.

    :param D: Menu: First menu
    :param D2: Menu: Second menu
    :param lam: Number: Weight of D, in (0, 1]
    :return: Menu
    """
    lam = _check_lambda(lam)
    points = []
    for p in D:
        for p2 in D2:
            m = p.mix(p2, lam)
            if m not in points:
                points.append(m)
    return Menu(tuple(points))


def eu_joint_identity_check(pref: Preference, D: Menu, D2: Menu, lam) -> bool:
    """
    Whether the optimal set of the mixed menu is the mixture of the two optimal sets.

    Expected utility always passes by independence; other preferences may fail.

    :param pref: Preference: Usually an EUPreference
    :param D: Menu: First menu
    :param D2: Menu: Second menu
    :param lam: Number: Weight in (0, 1)
    :return: bool
    """
    lam = _check_lambda(lam, allow_one=False)
    mixed = optimal_set(pref, mix_menus(D, D2, lam)).key
    expected = mix_menus(optimal_set(pref, D), optimal_set(pref, D2), lam).key
    if not isinstance(pref, EUPreference) and mixed != expected:
        logger.debug('mixture identity fails for %s on %s and %s', pref.kind, D, D2)
    return mixed == expected


def identity_failures(mu: RandomPreference, menu_pairs: Sequence[tuple[Menu, Menu]], lambdas: Sequence = DEFAULT_LAMBDAS,
                      n: int | None = None, seed: int | None = None) -> int:
    """
    Number of sampled preferences that break the mixture identity on some menu pair and weight.

    :param mu: RandomPreference: Law to sample from; draw k uses seed + k
    :param menu_pairs: Sequence: Pairs (D, D2) to mix
    :param lambdas: Sequence: Weights in (0, 1)
    :param n: int | None: Number of sampled preferences
    :param seed: int | None: Seed
    :return: int
    """
    n = config.identity_samples if n is None else n
    seed = config.seed if seed is None else seed
    failures = 0
    for k in range(n):
        pref = sample_preference(mu, seed + k)
        if not all(eu_joint_identity_check(pref, D, D2, lam) for D, D2 in menu_pairs for lam in lambdas):
            failures += 1
    logger.info('mixture identity: %s, %d of %d samples fail', mu.kind, failures, n)
    return failures


def companion_menu(D: Menu, p: Lottery, lam) -> tuple[Menu, CompanionRecord]:
    """
    The menu lam*D + (1-lam)*p with the record pairing it to D.
    """
    if p not in D:
        raise InvalidMenuError(f'Anchor {p} must belong to {D}')
    lam = _check_lambda(lam)
    mixed = Menu(tuple(q.mix(p, lam) for q in D))
    return mixed, CompanionRecord(D.key, mixed.key, p, lam)


def menu_family(base_menus: Sequence[Menu], lambdas: Sequence = DEFAULT_LAMBDAS, nested: bool = True) -> MenuFamily:
    """
    Base menus with their one-element deletions and stochastic-betweenness companions.

    :param base_menus: Sequence[Menu]: Menus to start from
    :param lambdas: Sequence: Mixing weights for companions
    :param nested: bool: Whether to add every menu with one lottery removed
    :return: MenuFamily
    """
    family = MenuFamily()
    seen = set()

    def add(menu: Menu):
        if menu.key not in seen:
            seen.add(menu.key)
            family.menus.append(menu)

    for D in base_menus:
        add(D)
        if nested and len(D) > 1:
            for q in D:
                add(D.without([q]))
        for p in D:
            for lam in lambdas:
                mixed, record = companion_menu(D, p, lam)
                add(mixed)
                family.companions.append(record)
    return family
