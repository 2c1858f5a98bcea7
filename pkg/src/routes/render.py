import logging
from pathlib import Path
from typing import Optional

import typer

from src.repository.files import load_model
from src.routes.common import console, handle_errors, options, seed_for
from src.schemas.distribution import render_adapter
from src.services.random_utility import RandomPreference
from src.services.render import render_distribution, render_preference

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command('render')
def render(ctx: typer.Context,
           spec: Path = typer.Option(..., '--spec', help='Preference or random preference JSON'),
           out: Optional[Path] = typer.Option(None, '--out', help='SVG destination'),
           samples: int = typer.Option(200, '--samples', min=1, help='Sampled pivots or directions'),
           steps: int = typer.Option(6, '--steps', min=1, help='Grid denominator of the indifference lines'),
           seed: Optional[int] = typer.Option(None, '--seed', help='Sampling seed')):
    """
    Draws the indifference map of a preference or a picture of a random preference.
    """
    opts = options(ctx)
    with handle_errors():
        target = load_model(render_adapter, spec).to_domain()
        if isinstance(target, RandomPreference):
            canvas = render_distribution(target, samples, seed_for(ctx, seed))
        else:
            canvas = render_preference(target, steps)
        path = Path(out or opts.out / 'figure.svg')
        path.parent.mkdir(parents=True, exist_ok=True)
        canvas.printer.to_file(path)
    console.print(f'wrote {path}')
