import unittest
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.conf import constants
from src.entity.models import Lottery, Menu
from src.services.axioms import (
    DEFAULT_LAMBDAS,
    check_all,
    check_extremeness,
    check_monotonicity,
    check_stochastic_betweenness,
    companion_menu,
    eu_joint_identity_check,
    identity_failures,
    menu_family,
    mix_menus,
)
from src.services.exceptions import InvalidMenuError
from src.services.geometry import in_simplex, sign, xy
from src.services.preferences import Comparison, EUPreference, Orientation, Preference, WUPreference
from src.services.random_utility import (
    RCC,
    RCCRow,
    FiniteMixture,
    example_mu,
    example_mu_prime,
    nu1,
    nu2,
    random_menus,
    rcc_from,
)

F = Fraction
HALF = F(1, 2)


@dataclass(frozen=True)
class IdealPoint(Preference):
    """
    Closer to the ideal lottery is better; indifference curves are circles, so betweenness fails.
    """
    center: tuple
    kind = 'ideal_point'

    def _value(self, p):
        x, y = xy(p)
        return -((x - self.center[0]) ** 2 + (y - self.center[1]) ** 2)

    def compare(self, p, q) -> Comparison:
        return Comparison(sign(self._value(p) - self._value(q)))


def random_mixture(rng: np.random.Generator, size: int) -> FiniteMixture:
    components = []
    while len(components) < size:
        a, b = (int(v) for v in rng.integers(-8, 9, 2))
        pivot = (F(a, 4), F(b, 4))
        if in_simplex(pivot):
            continue
        if rng.integers(0, 3) == 0:
            components.append(EUPreference(pivot))
        else:
            components.append(WUPreference(pivot, Orientation(int(rng.integers(0, 2)) * 2 - 1)))
    weights = [F(1, size)] * size
    return FiniteMixture(tuple(zip(components, weights)))


def table(rows: dict) -> RCC:
    rcc = RCC()
    for menu, probs in rows.items():
        row = RCCRow(menu, {s.key: F(0) for s in menu.subsets()})
        for subset, prob in probs.items():
            row.probs[frozenset(subset)] = prob
        rcc.rows[menu.key] = row
    return rcc


class TestMenus(unittest.TestCase):

    def test_mix_menus(self):
        mixed = mix_menus(Menu.of((0, 0), (1, 0)), Menu.of((0, 1)), HALF)
        self.assertEqual(mixed.key, frozenset([Lottery(0, HALF), Lottery(HALF, HALF)]))

    def test_mix_menus_removes_duplicates(self):
        D = Menu.of((0, 0), (1, 0))
        self.assertEqual(len(mix_menus(D, D, HALF)), 3)

    def test_companion_menu(self):
        D = Menu.of((0, 0), (1, 0), (0, 1))
        mixed, record = companion_menu(D, Lottery(0, 0), F(1, 4))
        self.assertEqual(mixed.key, frozenset([Lottery(0, 0), Lottery(F(1, 4), 0), Lottery(0, F(1, 4))]))
        self.assertEqual(record.base, D.key)
        self.assertEqual(record.lam, F(1, 4))

    def test_companion_menu_validation(self):
        D = Menu.of((0, 0), (1, 0))
        with self.assertRaises(InvalidMenuError):
            companion_menu(D, Lottery(0, 1), HALF)
        with self.assertRaises(InvalidMenuError):
            companion_menu(D, Lottery(0, 0), 0)

    def test_menu_family(self):
        family = menu_family([Menu.of((0, 0), (1, 0), (0, 1))])
        self.assertEqual(len(family.menus), 1 + 3 + 3 * len(DEFAULT_LAMBDAS))
        self.assertEqual(len(family.companions), 3 * len(DEFAULT_LAMBDAS))


class TestAxiomsOnModels(unittest.TestCase):

    def test_example_mixtures_pass(self):
        family = menu_family(random_menus(5, 6, max_size=3))
        for mu in (example_mu(), example_mu_prime()):
            reports = check_all(rcc_from(mu, family))
            for report in reports:
                self.assertTrue(report.passed, report.violations[:3])
                self.assertGreater(report.checks, 0)

    def test_random_mixtures_pass(self):
        rng = np.random.default_rng(np.random.SeedSequence(17))
        family = menu_family(random_menus(21, 4, max_size=3))
        for _ in range(10):
            reports = check_all(rcc_from(random_mixture(rng, 3), family), threads=2)
            self.assertTrue(all(r.passed for r in reports))


class TestPlantedViolations(unittest.TestCase):

    def test_monotonicity(self):
        a, b, c = Lottery(0, 0), Lottery(1, 0), Lottery(0, 1)
        rcc = table({Menu((a, b, c)): {(a,): F(1)}, Menu((a, b)): {(b,): F(1)}})
        report = check_monotonicity(rcc)
        self.assertFalse(report.passed)
        self.assertEqual(report.skipped, 1)

    def test_extremeness(self):
        D = Menu.of((0, 0), (HALF, 0), (1, 0))
        rcc = table({D: {(Lottery(HALF, 0),): F(1)}})
        self.assertFalse(check_extremeness(rcc).passed)

    def test_stochastic_betweenness(self):
        p = Lottery(0, 0)
        D = Menu((p, Lottery(F(3, 4), 0)))
        mixed, _ = companion_menu(D, p, HALF)
        mu = FiniteMixture(((IdealPoint((F(1, 4), F(1, 4))), 1),))
        family = menu_family([D], [HALF], nested=False)
        rcc = rcc_from(mu, family)
        self.assertEqual(rcc.prob(D, [p]), 1)
        self.assertEqual(rcc.prob(mixed, [p]), 0)
        report = check_stochastic_betweenness(rcc)
        self.assertFalse(report.passed)

    def test_missing_companion_is_skipped(self):
        p = Lottery(0, 0)
        D = Menu((p, Lottery(1, 0)))
        _, record = companion_menu(D, p, HALF)
        rcc = rcc_from(example_mu(), [D])
        rcc.companions.append(record)
        report = check_stochastic_betweenness(rcc)
        self.assertEqual(report.skipped, 1)
        self.assertTrue(report.passed)


class TestMixtureIdentity(unittest.TestCase):

    def test_expected_utility_always_passes(self):
        rng = np.random.default_rng(np.random.SeedSequence(2))
        menus = random_menus(3, 200, max_size=3)
        for k in range(0, len(menus) - 1, 2):
            direction = tuple(F(int(v), 4) for v in rng.integers(-4, 5, 2))
            if not any(direction):
                continue
            for lam in DEFAULT_LAMBDAS:
                self.assertTrue(eu_joint_identity_check(EUPreference(direction), menus[k], menus[k + 1], lam))

    def test_weighted_utility_counterexample(self):
        p, q = Lottery(*constants.JOINT_P), Lottery(*constants.JOINT_Q)
        p2, q2 = Lottery(*constants.JOINT_P2), Lottery(*constants.JOINT_Q2)
        pref = WUPreference(constants.EXAMPLE_PIVOT_1, Orientation.COUNTERCLOCKWISE)
        self.assertFalse(eu_joint_identity_check(pref, Menu((p, q)), Menu((p2, q2)), HALF))

    def test_sampled_preferences_against_identity(self):
        p, q = Lottery(*constants.JOINT_P), Lottery(*constants.JOINT_Q)
        p2, q2 = Lottery(*constants.JOINT_P2), Lottery(*constants.JOINT_Q2)
        pairs = [(Menu((p, q)), Menu.of((0, 0))), (Menu((p, q)), Menu((p2, q2)))]
        self.assertEqual(identity_failures(nu2(), pairs, n=300, seed=1), 0)
        self.assertGreater(identity_failures(nu1(), pairs, n=300, seed=1), 0)

    def test_lambda_must_be_interior(self):
        D = Menu.of((0, 0), (1, 0))
        with self.assertRaises(InvalidMenuError):
            eu_joint_identity_check(EUPreference((0, 1)), D, D, 1)


if __name__ == '__main__':
    unittest.main()
