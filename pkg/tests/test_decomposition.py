import unittest
from fractions import Fraction

import numpy as np

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.entity.models import Lottery
from src.services.decomposition import (
    LEAF_CASES,
    MODES,
    aux_event,
    classify_configuration,
    decompose4,
    random_configuration,
    reduce_joint_event,
)
from src.services.exceptions import InvalidMenuError
from src.services.geometry import line_normal, same_line
from src.services.joint_choice import BinaryEvent, Relation

F = Fraction
HALF = F(1, 2)


def horizontal(c) -> BinaryEvent:
    return BinaryEvent(Lottery(0, c), Lottery(HALF, c))


def wedge_events() -> list[BinaryEvent]:
    return [horizontal(F(1, 4)),
            BinaryEvent(Lottery(F(1, 4), HALF), Lottery(F(1, 4), 0)),
            BinaryEvent(Lottery(0, F(1, 4)), Lottery(F(1, 4), 0)),
            BinaryEvent(Lottery(0, HALF), Lottery(F(1, 6), 0))]


class TestCaseOne(unittest.TestCase):

    def setUp(self):
        self.events = [horizontal(F(k, 8)) for k in (1, 2, 3, 4)]

    def test_label(self):
        self.assertEqual(classify_configuration(self.events).label, '1')

    def test_single_cell_of_extreme_lines(self):
        d = decompose4(self.events)
        self.assertEqual(d.case, '1')
        self.assertEqual(len(d.cells), 1)
        self.assertEqual({e.p.y for e in d.cells[0].events}, {F(1, 8), HALF})
        self.assertEqual(d.tie_overlap_witnesses, [])


class TestApexInside(unittest.TestCase):

    def test_two_cells_split_through_apex(self):
        d = decompose4(wedge_events())
        self.assertEqual(d.case, '2-3')
        self.assertEqual(len(d.cells), 2)
        self.assertTrue(all(len(cell) == 3 for cell in d.cells))
        self.assertEqual(len(d.tie_overlap_witnesses), 1)
        r, s = d.tie_overlap_witnesses[0]
        self.assertEqual({r, s}, {Lottery(F(1, 4), F(1, 4)), Lottery(HALF, HALF)})

    def test_cells_keep_original_events(self):
        events = wedge_events()
        d = decompose4(events)
        for cell in d.cells:
            originals = [e for e in cell.events if e.relation is Relation.STRICT]
            self.assertEqual(len(originals), 2)
            self.assertTrue(all(e in events for e in originals))


class TestDegenerateConfigurations(unittest.TestCase):

    def test_duplicate_line(self):
        events = wedge_events()[:3] + [BinaryEvent(Lottery(F(1, 8), F(1, 4)), Lottery(F(3, 8), F(1, 4)))]
        d = decompose4(events)
        self.assertEqual(d.case, 'coincident')
        self.assertEqual(len(d.cells), 1)

    def test_opposite_strict_events(self):
        a = horizontal(F(1, 4))
        events = [a, BinaryEvent(a.q, a.p)] + wedge_events()[1:3]
        d = decompose4(events)
        self.assertEqual(d.case, 'coincident')
        self.assertEqual(d.cells, [])

    def test_input_validation(self):
        with self.assertRaises(InvalidMenuError):
            decompose4(wedge_events()[:3])
        weak = wedge_events()
        weak[0] = BinaryEvent(weak[0].p, weak[0].q, Relation.WEAK)
        with self.assertRaises(InvalidMenuError):
            decompose4(weak)
        indifferent = wedge_events() + [BinaryEvent(Lottery(0, 0), Lottery(1, 0), Relation.INDIFFERENT)]
        with self.assertRaises(InvalidMenuError):
            reduce_joint_event(indifferent)
        with self.assertRaises(InvalidMenuError):
            reduce_joint_event([])


class TestAuxiliaryEvents(unittest.TestCase):

    def test_aux_event_lies_on_line(self):
        c = line_normal((F(0), F(0)), (HALF, HALF))
        e = aux_event(c)
        self.assertEqual(e.relation, Relation.WEAK)
        self.assertTrue(same_line(e.normal(), c))
        self.assertGreater(sum(x * y for x, y in zip(e.normal(), c)), 0)

    def test_line_missing_simplex(self):
        self.assertIsNone(aux_event(line_normal((2, 0), (2, 1))))


class TestRandomConfigurations(unittest.TestCase):

    def test_distinct_lines(self):
        rng = np.random.default_rng(np.random.SeedSequence(4))
        for mode in MODES:
            events = random_configuration(rng, mode)
            self.assertEqual(len(events), 4)
            normals = [e.normal() for e in events]
            for i in range(4):
                for j in range(i + 1, 4):
                    self.assertFalse(same_line(normals[i], normals[j]))

    def test_unknown_mode(self):
        with self.assertRaises(InvalidMenuError):
            random_configuration(np.random.default_rng(1), 'spiral')

    def test_leaf_cases(self):
        self.assertEqual(len(LEAF_CASES), 11)
        self.assertNotIn('4-3', LEAF_CASES)


if __name__ == '__main__':
    unittest.main()
