import logging
from pathlib import Path
from typing import Optional

import typer
from pydantic import TypeAdapter

from src.repository.files import dump_json, load_model
from src.routes.common import console, handle_errors, options, parse_list, seed_for
from src.schemas.distribution import distribution_adapter
from src.schemas.lottery import MenuModel
from src.schemas.rcc import RCCModel
from src.services.axioms import DEFAULT_LAMBDAS, menu_family
from src.services.random_utility import rcc_from

logger = logging.getLogger(__name__)

router = typer.Typer()

menus_adapter = TypeAdapter(list[MenuModel])


@router.command('sample-rcc')
def sample_rcc(ctx: typer.Context,
               dist: Path = typer.Option(..., '--dist', help='Random preference JSON'),
               menus: Path = typer.Option(..., '--menus', help='JSON list of menus'),
               n: Optional[int] = typer.Option(None, '--n', help='Monte Carlo samples for parametric laws'),
               seed: Optional[int] = typer.Option(None, '--seed', help='Monte Carlo seed'),
               family: bool = typer.Option(False, '--family', help='Add one-element deletions and betweenness companions'),
               lambdas: str = typer.Option(','.join(str(v) for v in DEFAULT_LAMBDAS), '--lambdas',
                                           help='Mixing weights of the companions'),
               out: Optional[Path] = typer.Option(None, '--out', help='Table destination')):
    """
    Tabulates the random choice correspondence of a law on a list of menus.
    """
    opts = options(ctx)
    with handle_errors():
        mu = load_model(distribution_adapter, dist).to_domain()
        base = [m.to_domain() for m in load_model(menus_adapter, menus)]
        family_or_menus = menu_family(base, parse_list(lambdas, str)) if family else base
        table = rcc_from(mu, family_or_menus, n, seed_for(ctx, seed), opts.threads)
        path = dump_json(RCCModel.from_domain(table), out or opts.out / 'rcc.json')
    console.print(f'{len(table.rows)} menu(s), {"exact" if table.exact else f"{table.samples} samples"} -> {path}')
