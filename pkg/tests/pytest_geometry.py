import pytest
import numpy as np
from fractions import Fraction
from itertools import combinations

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.entity.models import Chart, PrizeRanking
from src.services.geometry import chart_convert, face_of, orient
from src.services.preferences import EUPreference, optimal_set
from src.services.random_utility import random_lottery, random_menus

RANKING = PrizeRanking(best=2, worst=1, middle=3)


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.SeedSequence(77))


def plane_point(rng, denominator=16):
    return tuple(Fraction(int(v), denominator) for v in rng.integers(-2 * denominator, 2 * denominator + 1, 2))


def test_orient_is_antisymmetric_and_cyclic(rng):
    for _ in range(1000):
        a, b, c = plane_point(rng), plane_point(rng), plane_point(rng)
        assert orient(a, b, c) == -orient(a, c, b)
        assert orient(a, b, c) == orient(b, c, a)


def test_orient_is_translation_invariant(rng):
    for _ in range(1000):
        a, b, c, t = (plane_point(rng) for _ in range(4))
        moved = [(x + t[0], y + t[1]) for x, y in (a, b, c)]
        assert orient(*moved) == orient(a, b, c)


@pytest.mark.parametrize('lam', [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(2, 7)])
def test_chart_change_keeps_mixtures(rng, lam):
    for _ in range(300):
        p, q = random_lottery(rng, 24), random_lottery(rng, 24)
        direct = chart_convert(p.mix(q, lam), Chart.SLOPE, RANKING)
        mixed = chart_convert(p, Chart.SLOPE, RANKING).mix(chart_convert(q, Chart.SLOPE, RANKING), lam)
        assert direct == mixed


def exposed_faces(D) -> set:
    """
    Optimal sets of D over a direction set rich enough to expose every face, plus D itself.
    """
    normals, along = [], []
    for p, q in combinations(D.lotteries, 2):
        dx, dy = q.x - p.x, q.y - p.y
        normals += [(dy, -dx), (-dy, dx)]
        along += [(dx, dy), (-dx, -dy)]
    directions = normals + along + [(u[0] + v[0], u[1] + v[1]) for u, v in combinations(normals, 2)]
    faces = {D.key}
    for d in directions:
        if any(d):
            faces.add(optimal_set(EUPreference(d), D).key)
    return faces


def test_face_of_matches_exposed_faces():
    for D in random_menus(5, 100, min_size=3, max_size=5, denominator=4):
        faces = exposed_faces(D)
        for A in D.subsets():
            assert face_of(A, D) == (A.key in faces), (str(A), str(D))
