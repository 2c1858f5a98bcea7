import json
import tempfile
import unittest
from pathlib import Path

from typer.testing import CliRunner

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from main import app

runner = CliRunner()


def lottery(x, y):
    return {'x': x, 'y': y, 'chart': 'MM'}


WEDGE_EVENTS = [
    {'p': lottery('0', '1/4'), 'q': lottery('1/2', '1/4')},
    {'p': lottery('1/4', '1/2'), 'q': lottery('1/4', '0')},
    {'p': lottery('0', '1/4'), 'q': lottery('1/4', '0'), 'relation': '>'},
    {'p': lottery('0', '1/2'), 'q': lottery('1/6', '0')},
]

FOUR_ATOMS = {'kind': 'finite', 'atoms': [
    {'m0': '-1/2', 'm1': '1/2', 'weight': '1/4'},
    {'m0': '1/2', 'm1': '-1/2', 'weight': '1/4'},
    {'m0': '1/4', 'm1': '3/4', 'weight': '1/4'},
    {'m0': '-3/4', 'm1': '-1/4', 'weight': '1/4'},
]}


class TestCommands(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.out = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name: str, document) -> str:
        path = self.out / name
        path.write_text(json.dumps(document), encoding='utf-8')
        return str(path)

    def invoke(self, *args):
        return runner.invoke(app, ['--out', str(self.out), *args])

    def test_example1_passes(self):
        result = self.invoke('example1', '--menus', '20')
        self.assertEqual(result.exit_code, 0, result.output)
        report = json.loads((self.out / 'example1.json').read_text(encoding='utf-8'))
        self.assertTrue(report['passed'])
        self.assertEqual(report['divergence_mu'], '0')
        self.assertEqual(report['divergence_mu_prime'], '1/2')
        self.assertTrue((self.out / 'example1.csv').exists())
        self.assertTrue((self.out / 'example1.md').exists())

    def test_example1_uneven_weights_fail(self):
        result = self.invoke('example1', '--menus', '5', '--weights', '2/5,3/5')
        self.assertEqual(result.exit_code, 1, result.output)

    def test_example1_bad_weights(self):
        self.assertEqual(self.invoke('example1', '--weights', '1/2').exit_code, 2)
        self.assertEqual(self.invoke('example1', '--weights', 'a,b').exit_code, 2)

    def test_example2_small_run(self):
        result = self.invoke('example2', '--n', '10000', '--triples', '3')
        self.assertEqual(result.exit_code, 0, result.output)
        report = json.loads((self.out / 'example2.json').read_text(encoding='utf-8'))
        self.assertTrue(report['passed'])
        self.assertEqual(len(report['triples']), 3)
        self.assertEqual(report['radii'], [0.8, 1.5])
        self.assertTrue(report['footnote_eu_exact_zero'])
        self.assertTrue(report['footnote_wu_positive'])
        self.assertEqual(report['footnote_identity_failures'], 0)
        self.assertEqual(len(report['invariance']), 1)
        self.assertTrue((self.out / 'example2.csv').exists())

    def test_example2_too_few_samples(self):
        self.assertEqual(self.invoke('example2', '--n', '500', '--triples', '1').exit_code, 2)

    def test_sample_rcc_then_check_axioms(self):
        dist = self.write('mu.json', {'kind': 'named', 'name': 'mu_prime'})
        menus = self.write('menus.json', [
            {'lotteries': [lottery('0', '0'), lottery('1', '0'), lottery('1/4', '1/4')]},
            {'lotteries': [lottery('1/2', '1/2'), lottery('0', '1/2')]},
        ])
        result = self.invoke('sample-rcc', '--dist', dist, '--menus', menus, '--family')
        self.assertEqual(result.exit_code, 0, result.output)
        table = json.loads((self.out / 'rcc.json').read_text(encoding='utf-8'))
        self.assertTrue(table['exact'])
        self.assertGreater(len(table['companions']), 0)

        result = self.invoke('check-axioms', '--rcc', str(self.out / 'rcc.json'))
        self.assertEqual(result.exit_code, 0, result.output)
        report = json.loads((self.out / 'axioms.json').read_text(encoding='utf-8'))
        self.assertEqual([a['axiom'] for a in report['axioms']],
                         ['monotonicity', 'extremeness', 'stochastic_betweenness'])

    def test_check_axioms_reports_violation(self):
        a, b, c = lottery('0', '0'), lottery('1', '0'), lottery('0', '1')
        rcc = self.write('bad.json', [
            {'menu': {'lotteries': [a, b, c]}, 'rows': [{'subset': [a], 'prob': '1'}]},
            {'menu': {'lotteries': [a, b]}, 'rows': [{'subset': [b], 'prob': '1'}]},
        ])
        self.assertEqual(self.invoke('check-axioms', '--rcc', rcc).exit_code, 1)

    def test_identify_moments(self):
        law = self.write('law.json', FOUR_ATOMS)
        result = self.invoke('identify-moments', '--law', law, '--order', '2', '--grid', '2000')
        self.assertEqual(result.exit_code, 0, result.output)
        report = json.loads((self.out / 'moments.json').read_text(encoding='utf-8'))
        self.assertEqual(len(report['rows']), 6)
        self.assertTrue(report['passed'])

    def test_identify_moments_bad_mode(self):
        law = self.write('law.json', FOUR_ATOMS)
        self.assertEqual(self.invoke('identify-moments', '--law', law, '--mode', 'guess').exit_code, 2)

    def test_decompose_joint(self):
        events = self.write('events.json', WEDGE_EVENTS)
        result = self.invoke('decompose-joint', '--events', events, '--validate', '5000')
        self.assertEqual(result.exit_code, 0, result.output)
        cells = json.loads((self.out / 'cells.json').read_text(encoding='utf-8'))
        self.assertEqual(cells['case'], '2-3')
        self.assertEqual(len(cells['cells']), 2)
        self.assertEqual(cells['oracle']['mismatches'], 0)

    def test_invalid_lottery_input(self):
        events = self.write('events.json', [{'p': lottery('1', '1'), 'q': lottery('0', '0')}])
        self.assertEqual(self.invoke('decompose-joint', '--events', events).exit_code, 2)

    def test_render(self):
        spec = self.write('circle.json', {'kind': 'circle_rwu', 'radius': 1.2})
        result = self.invoke('render', '--spec', spec, '--samples', '30')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue((self.out / 'figure.svg').read_text(encoding='utf-8').startswith('<svg'))

    def test_missing_file(self):
        self.assertEqual(self.invoke('render', '--spec', str(self.out / 'absent.json')).exit_code, 2)


if __name__ == '__main__':
    unittest.main()
