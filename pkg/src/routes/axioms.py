import logging
from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from src.repository.files import dump_json, load_model
from src.routes.common import console, handle_errors, options, verdict
from src.schemas.rcc import RCCModel
from src.schemas.report import AxiomReportModel, AxiomsReportModel
from src.services.axioms import check_all

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command('check-axioms')
def check_axioms(ctx: typer.Context,
                 rcc: Path = typer.Option(..., '--rcc', help='Random choice table JSON'),
                 report: Optional[Path] = typer.Option(None, '--report', help='Report destination'),
                 tol: Optional[float] = typer.Option(None, '--tol', help='Slack; default exact for exact tables')):
    """
    Checks monotonicity, extremeness and stochastic betweenness on a table.

    Passing all three is necessary for a random implicit expected utility
    representation, not sufficient.
    """
    opts = options(ctx)
    with handle_errors():
        table = load_model(RCCModel, rcc).to_domain()
        reports = check_all(table, tol, opts.threads)
        passed = all(r.passed for r in reports)
        dump_json(AxiomsReportModel(passed=passed, axioms=[AxiomReportModel.from_domain(r) for r in reports]),
                  report or opts.out / 'axioms.json')

    summary = Table(title='axioms')
    for column in ('axiom', 'checks', 'skipped', 'violations', 'result'):
        summary.add_column(column)
    for r in reports:
        summary.add_row(r.axiom, str(r.checks), str(r.skipped), str(len(r.violations)),
                        '[green]PASS[/green]' if r.passed else '[red]FAIL[/red]')
    console.print(summary)
    verdict('check-axioms', passed)
