import pytest
from fractions import Fraction

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.services.identification import (
    FiniteSlopeLaw,
    LawCDFOracle,
    SimulatedCDFOracle,
    UniformSlopeLaw,
    direct_moments,
    moment_report,
    recover_joint_moments,
)


@pytest.fixture
def two_atoms():
    return FiniteSlopeLaw((((Fraction(-1, 2), Fraction(1, 2)), Fraction(1, 3)),
                           ((Fraction(1, 4), Fraction(-3, 4)), Fraction(2, 3))))


def test_batch_matches_single_queries():
    oracle = SimulatedCDFOracle(UniformSlopeLaw(), 5000, seed=1)
    ts = [-0.5, 0.0, 0.25, 0.75]
    batch = oracle.batch(0.4, ts)
    assert [oracle(0.4, t) for t in ts] == pytest.approx(list(batch))


@pytest.mark.parametrize('order', [1, 2, 3])
def test_analytic_recovery(two_atoms, order):
    recovered = recover_joint_moments(LawCDFOracle(two_atoms), order, grid=2000)
    rows = moment_report(recovered, direct_moments(two_atoms, order))
    assert len(rows) == (order + 1) * (order + 2) // 2
    assert max(row['abs_err'] for row in rows) < 1e-3


@pytest.mark.slow
def test_simulated_first_moments():
    law = UniformSlopeLaw()
    recovered = recover_joint_moments(SimulatedCDFOracle(law, 50_000, seed=4), 1, grid=2000)
    rows = moment_report(recovered, direct_moments(law, 1))
    assert max(row['abs_err'] for row in rows) < 5e-2
