import math

import pytest

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.conf import constants
from src.conf.config import config
from src.services.random_utility import choice_prob, nu1, random_triples, ternary_prob_formula

N = 100_000


def z_score(value, target, stderr, n=N):
    return abs(value - target) / max(stderr, 1 / n)


@pytest.fixture(scope='module')
def triples():
    return random_triples(17, 2)


@pytest.fixture(scope='module')
def circle_estimates(triples):
    estimates = {}
    for k, radius in enumerate(constants.DEFAULT_RADII):
        law = nu1(radius)
        for t, triple in enumerate(triples):
            for p in triple:
                estimates[radius, t, p] = choice_prob(law, triple, [p], n=N, seed=100 * k + t)
    return estimates


@pytest.mark.parametrize('radius', constants.DEFAULT_RADII)
def test_circle_law_matches_angle_formula(triples, circle_estimates, radius):
    for t, triple in enumerate(triples):
        for p in triple:
            q, r = (x for x in triple if x != p)
            estimate = circle_estimates[radius, t, p]
            formula = ternary_prob_formula(p, q, r)
            assert z_score(float(estimate.value), formula, estimate.stderr) <= config.z_threshold, (radius, p)


def test_radii_agree(triples, circle_estimates):
    small, large = constants.DEFAULT_RADII
    for t, triple in enumerate(triples):
        for p in triple:
            a, b = circle_estimates[small, t, p], circle_estimates[large, t, p]
            se = math.sqrt(a.stderr ** 2 + b.stderr ** 2)
            assert abs(float(a.value) - float(b.value)) / max(se, 1 / N) <= config.z_threshold


def test_angle_formula_sums_to_one(triples):
    for triple in triples:
        p, q, r = triple.lotteries
        total = ternary_prob_formula(p, q, r) + ternary_prob_formula(q, r, p) + ternary_prob_formula(r, p, q)
        assert total == pytest.approx(1.0)
