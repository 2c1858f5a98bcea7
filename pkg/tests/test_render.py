import tempfile
import unittest
from pathlib import Path

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.conf import constants
from src.services.exceptions import InvalidDistributionError, InvalidRepresentationError
from src.services.identification import UniformSlopeLaw
from src.services.preferences import EUPreference, ImplicitBetweenness, Orientation, WUFunctional, WUPreference
from src.services.random_utility import SlopePair, example_mu_prime, nu1, nu2
from src.services.render import indifference_chords, lottery_grid, render_distribution, render_preference


class TestIndifferenceChords(unittest.TestCase):

    def test_grid_size(self):
        self.assertEqual(len(lottery_grid(4)), 15)

    def test_expected_utility_levels(self):
        # y = 1 only touches a vertex
        self.assertEqual(len(indifference_chords(EUPreference((0, 1)), 4)), 4)

    def test_weighted_utility_fan(self):
        pref = WUPreference(constants.EXAMPLE_PIVOT_1, Orientation.COUNTERCLOCKWISE)
        self.assertEqual(len(indifference_chords(pref, 2)), 3)

    def test_functional_matches_pivot_form(self):
        f = WUFunctional(constants.EXAMPLE_U, constants.EXAMPLE_G1)
        self.assertEqual(indifference_chords(f, 3), indifference_chords(f.to_preference(), 3))

    def test_implicit_has_no_chords(self):
        pref = ImplicitBetweenness.from_weighted(WUFunctional(constants.EXAMPLE_U, constants.EXAMPLE_G1))
        with self.assertRaises(InvalidRepresentationError):
            indifference_chords(pref)


class TestPictures(unittest.TestCase):

    def test_preference_svg(self):
        canvas = render_preference(WUPreference(constants.EXAMPLE_PIVOT_1, Orientation.COUNTERCLOCKWISE))
        text = str(canvas)
        self.assertTrue(text.startswith('<svg'))
        self.assertIn('<line', text)
        self.assertIn('<circle', text)

    def test_distributions(self):
        for mu in (example_mu_prime(), nu1(), nu2(), SlopePair(UniformSlopeLaw())):
            text = str(render_distribution(mu, samples=50, seed=3))
            self.assertTrue(text.startswith('<svg'), mu.kind)

    def test_seeded_pictures_repeat(self):
        self.assertEqual(str(render_distribution(nu1(), 40, 7)), str(render_distribution(nu1(), 40, 7)))

    def test_unknown_law(self):
        with self.assertRaises(InvalidDistributionError):
            render_distribution(UniformSlopeLaw())

    def test_to_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'eu.svg'
            render_preference(EUPreference((1, 2))).printer.to_file(path)
            self.assertTrue(path.read_text(encoding='utf-8').startswith('<svg'))


if __name__ == '__main__':
    unittest.main()
