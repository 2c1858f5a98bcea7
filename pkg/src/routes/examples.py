import logging
import math
from fractions import Fraction
from itertools import combinations, product
from typing import Optional

import typer
from rich.table import Table

from src.conf import constants
from src.conf.config import config
from src.entity.models import Lottery, Menu
from src.repository.files import dump_json, write_csv, write_markdown
from src.routes.common import console, handle_errors, options, parse_list, verdict
from src.schemas.joint import ChoiceEventModel, JointRowModel
from src.schemas.lottery import LotteryModel, MenuModel
from src.schemas.rcc import prob_text
from src.schemas.report import EstimateModel, Example1Report, Example2Report, InvarianceModel, TripleModel
from src.services.axioms import identity_failures
from src.services.exceptions import ChoiceLabError
from src.services.geometry import MM_VERTICES, angle_at
from src.services.joint_choice import footnote_counterexample, joint_choice_prob
from src.services.random_utility import (
    example_mu,
    example_mu_prime,
    nu1,
    nu2,
    random_menus,
    random_triples,
    rcc_from,
    ternary_prob_formula,
)

logger = logging.getLogger(__name__)

router = typer.Typer()


def _fmt(subset) -> str:
    return '{' + ', '.join(str(p) for p in subset) + '}'


def _joint_table(mu, menus: list[Menu]) -> list[JointRowModel]:
    rows = []
    for picks in product(*(menu.lotteries for menu in menus)):
        events = [(menu, [p]) for menu, p in zip(menus, picks)]
        estimate = joint_choice_prob(mu, events)
        rows.append(JointRowModel(events=[ChoiceEventModel(menu=MenuModel.from_domain(menu),
                                                           chosen=[LotteryModel.from_domain(p)])
                                          for menu, p in zip(menus, picks)],
                                  prob=prob_text(estimate.value)))
    return rows


@router.command('example1')
def example1(ctx: typer.Context,
             menus: int = typer.Option(1000, '--menus', min=1, help='Number of seeded random menus of size 2 to 4'),
             weights: str = typer.Option('1/2,1/2', '--weights', help='Weights of the two semi-weighted components')):
    """
    Two random weighted utility mixtures with the same choice table on every
    menu but different joint choice across two binary menus.
    """
    opts = options(ctx)
    with handle_errors():
        w = parse_list(weights, Fraction)
        if len(w) != 2:
            raise ChoiceLabError('--weights takes exactly two comma separated weights')
        mu, mu_prime = example_mu(), example_mu_prime(tuple(w))
        family = random_menus(opts.seed, menus)
        left, right = rcc_from(mu, family), rcc_from(mu_prime, family)
        mismatched = [key for key, row in left.rows.items() if row.probs != right.rows[key].probs]

        p, q, p2, q2 = (Lottery(*xy) for xy in (constants.JOINT_P, constants.JOINT_Q,
                                                constants.JOINT_P2, constants.JOINT_Q2))
        binary = [Menu((p, q)), Menu((p2, q2))]
        pattern = [(binary[0], [p]), (binary[1], [p2])]
        joint_mu = joint_choice_prob(mu, pattern).value
        joint_mu_prime = joint_choice_prob(mu_prime, pattern).value

        passed = not mismatched and joint_mu == 0 and joint_mu_prime == constants.HALF
        report = Example1Report(seed=opts.seed, menus=menus, marginals_equal=not mismatched,
                                mismatched_menus=len(mismatched),
                                joint_mu=_joint_table(mu, binary), joint_mu_prime=_joint_table(mu_prime, binary),
                                divergence_mu=prob_text(joint_mu), divergence_mu_prime=prob_text(joint_mu_prime),
                                passed=passed)

        csv_rows = []
        for key, row in left.rows.items():
            for subset in row.menu.subsets():
                csv_rows.append({'menu': str(row.menu), 'subset': _fmt(subset),
                                 'mu': prob_text(row.probs[subset.key]),
                                 'mu_prime': prob_text(right.rows[key].probs[subset.key])})
        marginals = 'EQUAL (exact)' if not mismatched else f'DIFFER on {len(mismatched)} menu(s)'
        summary = f'marginals: {marginals}; joint({{p,q}},{{p′,q′}}): {joint_mu} vs {joint_mu_prime}'
        dump_json(report, opts.out / 'example1.json')
        write_csv(csv_rows, opts.out / 'example1.csv', ['menu', 'subset', 'mu', 'mu_prime'])
        write_markdown('Example 1: two mixtures, one choice table', {
            'Summary': [summary, f'seed {opts.seed}, {len(left.rows)} distinct menus'],
            'Joint choice': [f'p = {p}, q = {q}, p′ = {p2}, q′ = {q2}',
                             f'P(p from {{p,q}} and p′ from {{p′,q′}}): {joint_mu} under mu, {joint_mu_prime} under mu′'],
        }, opts.out / 'example1.md')
    console.print(summary)
    verdict('example1', passed)


def _z(value: float, target: float, stderr: float, n: int) -> float:
    return abs(value - target) / max(stderr, 1.0 / n)


@router.command('example2')
def example2(ctx: typer.Context,
             n: Optional[int] = typer.Option(None, '--n', help='Monte Carlo samples per law'),
             radii: str = typer.Option('0.8,1.5', '--radii', help='Circle radii of the weighted utility laws'),
             triples: int = typer.Option(20, '--triples', min=1, help='Number of seeded ternary menus')):
    """
    Uniform expected utility and circle weighted utility laws against the angle formula,
    plus the two-menu pattern that separates them.
    """
    opts = options(ctx)
    with handle_errors():
        n = n or config.mc_samples
        if n < 10_000:
            raise ChoiceLabError(f'--n must be at least 10000, got {n}')
        radii = parse_list(radii)
        if not radii:
            raise ChoiceLabError('--radii needs at least one radius')
        menus = random_triples(opts.seed, triples)
        laws = [('nu2', nu2())] + [(f'nu1(r={r})', nu1(r)) for r in radii]
        tables = {name: rcc_from(law, menus, n, seed=opts.seed + k, threads=opts.threads)
                  for k, (name, law) in enumerate(laws)}

        z_max = config.z_threshold
        triple_reports, csv_rows = [], []
        for menu in menus:
            p, q, r = menu.lotteries
            formula = ternary_prob_formula(p, q, r)
            estimates = []
            for name, table in tables.items():
                row = table.row(menu)
                key = frozenset([p])
                value, stderr = float(row.probs[key]), row.stderr[key]
                estimates.append(EstimateModel(law=name, value=value, stderr=stderr, z=_z(value, formula, stderr, n)))
                csv_rows.append({'menu': str(menu), 'law': name, 'estimate': repr(value), 'stderr': repr(stderr),
                                 'formula': repr(formula), 'z': repr(estimates[-1].z)})
            triple_reports.append(TripleModel(p=LotteryModel.from_domain(p), q=LotteryModel.from_domain(q),
                                              r=LotteryModel.from_domain(r), angle=angle_at(p, q, r),
                                              formula=formula, estimates=estimates,
                                              passed=all(e.z <= z_max for e in estimates)))

        invariance = []
        circle_names = [name for name, _ in laws[1:]]
        for a, b in combinations(range(len(radii)), 2):
            ta, tb = tables[circle_names[a]], tables[circle_names[b]]
            worst = 0.0
            for menu in menus:
                for p in menu:
                    key = frozenset([p])
                    ra, rb = ta.row(menu), tb.row(menu)
                    se = math.sqrt(ra.stderr[key] ** 2 + rb.stderr[key] ** 2)
                    worst = max(worst, abs(ra.probs[key] - rb.probs[key]) / max(se, 1.0 / n))
            invariance.append(InvarianceModel(radii=(radii[a], radii[b]), max_z=worst, passed=worst <= z_max))

        fp, fq, fr = Lottery(*constants.JOINT_P), Lottery(*constants.JOINT_Q), Lottery(*MM_VERTICES[3])
        footnote = []
        for k, (name, law) in enumerate(laws):
            estimate = footnote_counterexample(law, fp, fq, fr, n, opts.seed + 100 + k, opts.threads)
            value = float(estimate.value)
            footnote.append(EstimateModel(law=name, value=value, stderr=estimate.stderr,
                                          z=value / max(estimate.stderr, 1.0 / n)))
        eu_zero = footnote[0].value == 0.0
        wu_positive = all(e.z >= 5 for e in footnote[1:])
        pairs = [(Menu((fp, fq)), Menu((fr,))),
                 (Menu((fp, fq)), Menu((Lottery(*constants.JOINT_P2), Lottery(*constants.JOINT_Q2))))]
        broken = identity_failures(laws[0][1], pairs, seed=opts.seed + 200)

        passed = (all(t.passed for t in triple_reports) and all(i.passed for i in invariance)
                  and eu_zero and wu_positive and broken == 0)
        report = Example2Report(seed=opts.seed, n=n, radii=radii, triples=triple_reports, invariance=invariance,
                                footnote=footnote, footnote_eu_exact_zero=eu_zero, footnote_wu_positive=wu_positive,
                                footnote_identity_failures=broken, passed=passed)
        dump_json(report, opts.out / 'example2.json')
        write_csv(csv_rows, opts.out / 'example2.csv', ['menu', 'law', 'estimate', 'stderr', 'formula', 'z'])
        write_markdown('Example 2: uniform EU and circle weighted utility', {
            'Angle formula': [f'{sum(t.passed for t in triple_reports)}/{len(triple_reports)} triples within '
                              f'{z_max} standard errors at n = {n}'],
            'Circle invariance': [f'radii {i.radii}: max z {i.max_z:.2f}' for i in invariance],
            'Joint pattern': [f'{e.law}: {e.value:.6f} ± {e.stderr:.6f}' for e in footnote]
                             + [f'nu2 samples breaking the mixture identity: {broken}'],
        }, opts.out / 'example2.md')

    table = Table(title=f'example2 (n = {n})')
    for column in ('law', 'triples within bound', 'joint pattern'):
        table.add_column(column)
    for k, (name, _) in enumerate(laws):
        within = sum(1 for t in triple_reports if t.estimates[k].z <= z_max)
        table.add_row(name, f'{within}/{len(triple_reports)}', f'{footnote[k].value:.6f}')
    console.print(table)
    verdict('example2', passed)
