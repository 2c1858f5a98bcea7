import logging
from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from src.entity.models import Menu
from src.repository.files import dump_json, load_model
from src.routes.common import console, handle_errors, options, seed_for, verdict
from src.schemas.distribution import distribution_adapter
from src.schemas.joint import ChoiceEventModel, DecompositionModel, EventsModel, JointRowModel
from src.schemas.lottery import LotteryModel, MenuModel
from src.schemas.rcc import prob_text
from src.services.decomposition import decompose4, reduce_joint_event
from src.services.joint_choice import Relation, binary_events_prob, cells_probability, oracle_validate

logger = logging.getLogger(__name__)

router = typer.Typer()


def _choice_events(events) -> list[ChoiceEventModel]:
    return [ChoiceEventModel(menu=MenuModel.from_domain(Menu((e.p, e.q))), chosen=[LotteryModel.from_domain(e.p)])
            for e in events]


@router.command('decompose-joint')
def decompose_joint(ctx: typer.Context,
                    events: Path = typer.Option(..., '--events', help='Binary events JSON'),
                    validate: int = typer.Option(0, '--validate', min=0, help='Oracle samples per radius, 0 to skip'),
                    seed: Optional[int] = typer.Option(None, '--seed', help='Oracle and Monte Carlo seed'),
                    dist: Optional[Path] = typer.Option(None, '--dist', help='Random preference JSON for joint probabilities'),
                    n: Optional[int] = typer.Option(None, '--n', help='Monte Carlo samples for --dist'),
                    out: Optional[Path] = typer.Option(None, '--out', help='Cells JSON destination')):
    """
    Splits a conjunction of binary choice events into cells of at most three events.
    """
    opts = options(ctx)
    seed = seed_for(ctx, seed)
    passed = True
    with handle_errors():
        evs = load_model(EventsModel, events).to_domain()
        if len(evs) == 4 and all(e.relation is Relation.STRICT for e in evs):
            d = decompose4(evs)
        else:
            d = reduce_joint_event(evs)
        oracle = None
        if validate:
            oracle = oracle_validate(d, n_samples=validate, seed=seed)
            passed = oracle['mismatches'] == 0 and oracle['double_fires_off_witness'] == 0
        model = DecompositionModel.from_domain(d, oracle)
        if dist is not None:
            mu = load_model(distribution_adapter, dist).to_domain()
            for cell_model, cell in zip(model.cells, d.cells):
                cell_model.prob = prob_text(binary_events_prob(mu, cell.events, n, seed, opts.threads).value)
            total = cells_probability(mu, d, n, seed, opts.threads)
            conjunction = binary_events_prob(mu, d.events, n, seed, opts.threads)
            if all(e.relation is Relation.STRICT for e in d.events):
                model.joint = [JointRowModel(events=_choice_events(d.events), prob=prob_text(conjunction.value),
                                             stderr=conjunction.stderr)]
            console.print(f'conjunction {prob_text(conjunction.value)}, sum over cells {prob_text(total.value)}')
        dump_json(model, out or opts.out / 'cells.json')

    table = Table(title=f"case {' / '.join(d.path)}: {len(d.cells)} cell(s)")
    table.add_column('#', justify='right')
    table.add_column('cell')
    for k, cell in enumerate(d.cells, 1):
        table.add_row(str(k), str(cell))
    console.print(table)
    if oracle is not None:
        console.print(f"oracle: {oracle['samples']} samples, {oracle['mismatches']} mismatches, "
                      f"{oracle['double_fires_off_witness']} double fires off witnesses")
    verdict('decompose-joint', passed)
