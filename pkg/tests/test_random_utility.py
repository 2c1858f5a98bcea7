import unittest
from fractions import Fraction

import numpy as np

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.conf import constants
from src.entity.models import Chart, Lottery, Menu
from src.services.exceptions import DegenerateGeometryError, InvalidDistributionError, InvalidLotteryError, InvalidMenuError
from src.services.geometry import chart_convert
from src.services.preferences import DEFAULT_RANKING, EUPreference, Orientation, WUPreference, compare, optimal_set
from src.services.random_utility import (
    CircleRWU,
    FiniteMixture,
    choice_prob,
    example_mu,
    example_mu_prime,
    nu1,
    nu2,
    optimal_masks,
    random_menus,
    random_triples,
    rcc_from,
    sample_preference,
    subset_mask,
    ternary_prob_formula,
)

F = Fraction
HALF = F(1, 2)
P, Q = Lottery(*constants.JOINT_P), Lottery(*constants.JOINT_Q)


class TestFiniteMixtures(unittest.TestCase):

    def test_weights_must_sum_to_one(self):
        with self.assertRaises(InvalidDistributionError):
            FiniteMixture(((EUPreference((0, 1)), F(1, 3)),))
        with self.assertRaises(InvalidDistributionError):
            FiniteMixture(())

    def test_exact_choice_prob(self):
        D = Menu((P, Q))
        self.assertEqual(choice_prob(example_mu(), D, [P]).value, HALF)
        self.assertEqual(choice_prob(example_mu(), D, [P, Q]).value, 0)

    def test_chosen_set_must_be_in_menu(self):
        with self.assertRaises(InvalidMenuError):
            choice_prob(example_mu(), Menu((P, Q)), [Lottery(0, 0)])
        with self.assertRaises(InvalidMenuError):
            choice_prob(example_mu(), Menu((P, Q)), [])

    def test_rows_sum_to_one(self):
        rcc = rcc_from(example_mu(), random_menus(7, 20))
        self.assertTrue(rcc.exact)
        for row in rcc.rows.values():
            self.assertEqual(row.total(), 1)

    def test_marginals_of_both_examples_agree(self):
        menus = random_menus(11, 200)
        self.assertEqual(rcc_from(example_mu(), menus), rcc_from(example_mu_prime(), menus))

    def test_uneven_weights_change_marginals(self):
        menus = [Menu((P, Q))] + random_menus(11, 50)
        self.assertNotEqual(rcc_from(example_mu(), menus), rcc_from(example_mu_prime((F(2, 5), F(3, 5))), menus))

    def test_monte_carlo_agrees_with_exact(self):
        mu = FiniteMixture(((WUPreference((-HALF, -HALF), Orientation.COUNTERCLOCKWISE), F(1, 4)),
                            (EUPreference((0, 1)), F(3, 4))))
        D = Menu.of((0, 0), (1, 0), (0, 1))
        exact = choice_prob(mu, D, [Lottery(0, 1)])
        estimate = choice_prob(mu, D, [Lottery(0, 1)], n=20_000, seed=3, method='monte_carlo')
        self.assertEqual(exact.value, 1)
        self.assertEqual(estimate.value, 1.0)


class TestParametricLaws(unittest.TestCase):

    def test_circle_must_enclose_simplex(self):
        with self.assertRaises(InvalidDistributionError):
            CircleRWU(radius=0.5)

    def test_sampled_pivots_on_circle(self):
        Y = nu1().sample_homogeneous(np.random.default_rng(1), 1000)
        pivots = Y[:, :2] / Y[:, 2:3]
        radii = np.hypot(pivots[:, 0] - 0.5, pivots[:, 1] - 0.5)
        self.assertTrue(np.allclose(radii, 0.9))
        self.assertTrue(set(np.sign(Y[:, 2])) <= {-1.0, 1.0})

    def test_uniform_eu_vectors(self):
        Y = nu2().sample_homogeneous(np.random.default_rng(2), 100)
        self.assertTrue(np.all(Y[:, 2] == 0))
        self.assertTrue(np.allclose(np.hypot(Y[:, 0], Y[:, 1]), 1.0))

    def test_masks_agree_with_optimal_set(self):
        menu = Menu.of((0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4)))
        pref = WUPreference((-HALF, -HALF), Orientation.COUNTERCLOCKWISE)
        Y = np.array([[float(v) for v in pref.homogeneous()]])
        expected = subset_mask(menu, optimal_set(pref, menu))
        self.assertEqual(int(optimal_masks(Y, menu)[0]), expected)

    def test_sample_preference_is_seeded(self):
        a = sample_preference(nu1(), 5)
        b = sample_preference(nu1(), 5)
        self.assertEqual(a, b)

    def test_thread_count_does_not_change_estimates(self):
        D = Menu.of((0, 0), (1, 0), (0, 1))
        one = choice_prob(nu1(), D, [Lottery(0, 0)], n=30_000, seed=9, threads=1)
        four = choice_prob(nu1(), D, [Lottery(0, 0)], n=30_000, seed=9, threads=4)
        self.assertEqual(one.value, four.value)

    def test_closed_form_matches_simulation(self):
        triple = random_triples(4, 1)[0]
        p = triple.lotteries[0]
        q, r = triple.lotteries[1:]
        formula = ternary_prob_formula(p, q, r)
        estimate = choice_prob(nu2(), triple, [p], n=200_000, seed=6)
        self.assertLess(abs(estimate.value - formula), 5 * max(estimate.stderr, 1 / 200_000))

    def test_closed_form_needs_general_position(self):
        with self.assertRaises(DegenerateGeometryError):
            ternary_prob_formula((0, 0), (HALF, 0), (1, 0))


class TestMenus(unittest.TestCase):

    def test_random_menus_are_seeded(self):
        self.assertEqual(random_menus(3, 10), random_menus(3, 10))
        for menu in random_menus(3, 10):
            self.assertTrue(2 <= len(menu) <= 4)

    def test_random_triples_in_general_position(self):
        for triple in random_triples(8, 10):
            self.assertEqual(len(triple), 3)


class TestChartGuard(unittest.TestCase):

    def setUp(self):
        self.w3, self.mid = Lottery(0, 0), Lottery(HALF, 0)
        self.slope = [chart_convert(p, Chart.SLOPE, DEFAULT_RANKING) for p in (self.w3, self.mid)]

    def test_mm_menu_picks_middle_prize(self):
        self.assertEqual(choice_prob(example_mu(), Menu((self.w3, self.mid)), [self.w3]).value, 1)

    def test_slope_lotteries_are_refused(self):
        s3, smid = self.slope
        with self.assertRaises(InvalidLotteryError):
            choice_prob(example_mu(), Menu((s3, smid)), [s3])
        with self.assertRaises(InvalidLotteryError):
            compare(EUPreference((0, 1)), s3, smid)
        with self.assertRaises(InvalidLotteryError):
            compare(WUPreference((-HALF, -HALF), Orientation.COUNTERCLOCKWISE), s3, smid)
        with self.assertRaises(InvalidLotteryError):
            optimal_masks(np.array([[0.0, 1.0, 0.0]]), Menu((s3, smid)))
        with self.assertRaises(InvalidLotteryError):
            ternary_prob_formula(s3, smid, chart_convert(Lottery(0, 1), Chart.SLOPE, DEFAULT_RANKING))

    def test_converted_back_to_mm_gives_same_probability(self):
        back = Menu(tuple(chart_convert(p, Chart.MM, DEFAULT_RANKING) for p in self.slope))
        self.assertEqual(back, Menu((self.w3, self.mid)))
        self.assertEqual(choice_prob(example_mu(), back, [self.w3]).value, 1)


if __name__ == '__main__':
    unittest.main()
