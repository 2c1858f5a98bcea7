import pytest
import numpy as np
from fractions import Fraction

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.entity.models import Lottery
from src.services.decomposition import LEAF_CASES, MODES, case_coverage, decompose4, random_configuration, reduce_joint_event
from src.services.geometry import line_normal, same_line
from src.services.joint_choice import BinaryEvent, Cell, Decomposition, Relation, oracle_validate

F = Fraction

# Four events whose clockwise pivots fill {x > 3/5, y < 3/5} and whose
# counterclockwise pivots sit above both y = 4/5 and y = x + 2/5.
R, S, T = Lottery(F(3, 5), F(1, 5)), Lottery(0, F(1, 5)), Lottery(F(1, 2), F(1, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.SeedSequence(2024))


@pytest.fixture
def worked_events():
    return [BinaryEvent(Lottery(F(3, 5), F(2, 5)), Lottery(F(3, 5), 0)),
            BinaryEvent(Lottery(F(2, 5), F(3, 5)), Lottery(0, F(3, 5))),
            BinaryEvent(Lottery(F(3, 10), F(7, 10)), Lottery(0, F(2, 5))),
            BinaryEvent(Lottery(F(1, 5), F(4, 5)), Lottery(0, F(4, 5)))]


def test_worked_example_case_and_cells(worked_events):
    e1, e2, e3, e4 = worked_events
    d = decompose4(worked_events)
    assert d.case == '2-4'
    assert d.path == ['2-4']
    assert len(d.cells) == 3
    assert all(len(cell) == 3 for cell in d.cells)
    originals = {frozenset(e for e in cell.events if e in worked_events) for cell in d.cells}
    assert originals == {frozenset({e1, e2}), frozenset({e4}), frozenset({e1, e3})}


def test_worked_example_cuts_along_rs_and_rt(worked_events):
    d = decompose4(worked_events)
    lines = [line_normal(R, S), line_normal(R, T)]
    aux = [e for cell in d.cells for e in cell.events if e not in worked_events]
    assert aux and all(e.relation is Relation.WEAK for e in aux)
    assert all(any(same_line(e.normal(), line) for line in lines) for e in aux)
    assert len(d.tie_overlap_witnesses) == 2
    assert all(R in pair for pair in d.tie_overlap_witnesses)


def test_worked_example_passes_oracle(worked_events):
    report = oracle_validate(decompose4(worked_events), n_samples=20_000, seed=5)
    assert report['fired'] > 0
    assert report['mismatches'] == 0
    assert report['double_fires_off_witness'] == 0


def test_three_conjunct_identity(worked_events):
    e1, e2, e3, e4 = worked_events
    cells = [Cell((e1, e2, BinaryEvent(S, R))),
             Cell((BinaryEvent(R, S, Relation.WEAK), BinaryEvent(T, R, Relation.WEAK), e4)),
             Cell((e1, BinaryEvent(R, T), e3))]
    d = Decomposition(tuple(worked_events), cells, [(R, S), (R, T)], '2-4', ['2-4'])
    report = oracle_validate(d, n_samples=20_000, seed=6)
    assert report['mismatches'] == 0
    assert report['double_fires_off_witness'] == 0


@pytest.mark.slow
@pytest.mark.parametrize('mode', MODES)
def test_random_configurations_pass_oracle(rng, mode):
    for k in range(8):
        d = decompose4(random_configuration(rng, mode))
        assert all(1 <= len(cell) <= 3 for cell in d.cells)
        report = oracle_validate(d, n_samples=2000, seed=k)
        assert report['mismatches'] == 0, (mode, d.path)
        assert report['double_fires_off_witness'] == 0, (mode, d.path)


@pytest.mark.slow
def test_two_hundred_configurations_at_full_sample_size(rng):
    for k in range(200):
        mode = MODES[k % len(MODES)]
        d = decompose4(random_configuration(rng, mode))
        report = oracle_validate(d, n_samples=100_000, seed=k)
        assert report['mismatches'] == 0, (k, mode, d.path)
        assert report['double_fires_off_witness'] == 0, (k, mode, d.path)


@pytest.mark.slow
def test_five_events_reduce_to_small_cells(rng):
    events = random_configuration(rng, 'generic') + random_configuration(rng, 'generic')[:1]
    d = reduce_joint_event(events)
    assert all(len(cell) <= 3 for cell in d.cells)
    report = oracle_validate(d, n_samples=5000, seed=3)
    assert report['mismatches'] == 0


@pytest.mark.slow
def test_every_leaf_case_is_reached():
    coverage = case_coverage(seed=11, draws=200, until_covered=True)
    assert coverage['missing'] == []
    assert coverage['draws'] >= 200
    assert all(coverage['counts'].get(case, 0) > 0 for case in LEAF_CASES)
