import logging
from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from src.conf.config import config
from src.repository.files import dump_json, load_model, write_csv
from src.routes.common import console, handle_errors, options, seed_for, verdict
from src.schemas.distribution import slope_law_adapter
from src.schemas.report import MomentReportModel, MomentRowModel
from src.services.exceptions import ChoiceLabError
from src.services.identification import (
    LawCDFOracle,
    SimulatedCDFOracle,
    direct_moments,
    moment_report,
    recover_joint_moments,
)

logger = logging.getLogger(__name__)

router = typer.Typer()

MODE_TOLERANCE = {'analytic': 1e-3, 'simulated': 5e-2}


@router.command('identify-moments')
def identify_moments(ctx: typer.Context,
                     law: Path = typer.Option(..., '--law', help='Slope law JSON'),
                     order: int = typer.Option(4, '--order', min=1, help='Maximal total order i + j'),
                     grid: Optional[int] = typer.Option(None, '--grid', help='Quadrature grid size'),
                     mode: str = typer.Option('analytic', '--mode', help='analytic or simulated CDF queries'),
                     n: Optional[int] = typer.Option(None, '--n', help='Sample size of simulated queries'),
                     seed: Optional[int] = typer.Option(None, '--seed', help='Seed of simulated queries'),
                     tol: Optional[float] = typer.Option(None, '--tol', help='Accepted absolute error per moment'),
                     out: Optional[Path] = typer.Option(None, '--out', help='CSV destination')):
    """
    Recovers the joint moments of the slope pair from binary-choice CDF queries and compares them with the law.
    """
    opts = options(ctx)
    with handle_errors():
        if mode not in MODE_TOLERANCE:
            raise ChoiceLabError(f'--mode must be analytic or simulated, got {mode!r}')
        slope_law = load_model(slope_law_adapter, law).to_domain()
        grid = grid or config.moment_grid
        tol = MODE_TOLERANCE[mode] if tol is None else tol
        if mode == 'analytic':
            oracle = LawCDFOracle(slope_law)
        else:
            oracle = SimulatedCDFOracle(slope_law, n or config.mc_samples, seed_for(ctx, seed))
        recovered = recover_joint_moments(oracle, order, grid=grid)
        rows = moment_report(recovered, direct_moments(slope_law, order))
        residual_ok = all(r <= config.moment_residual_tol for r in recovered.residuals.values())
        passed = residual_ok and all(row['abs_err'] <= tol for row in rows)

        out = out or opts.out / 'moments.csv'
        write_csv(rows, out, ['i', 'j', 'recovered', 'direct', 'abs_err'])
        dump_json(MomentReportModel(mode=mode, order=order, grid=grid, tol=tol,
                                    residuals={str(k): v for k, v in recovered.residuals.items()},
                                    rows=[MomentRowModel(**row) for row in rows], passed=passed),
                  Path(out).with_suffix('.json'))

    table = Table(title=f'joint moments E[m1^i m0^j] ({mode}, grid {grid})')
    for column in ('i', 'j', 'recovered', 'direct', 'abs err'):
        table.add_column(column, justify='right')
    for row in rows:
        style = None if row['abs_err'] <= tol else 'red'
        table.add_row(str(row['i']), str(row['j']), f"{row['recovered']:.6f}", f"{row['direct']:.6f}",
                      f"{row['abs_err']:.2e}", style=style)
    console.print(table)
    verdict('identify-moments', passed)
