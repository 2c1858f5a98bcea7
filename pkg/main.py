import logging
from pathlib import Path

import typer

from src.conf.config import config
from src.routes import axioms, examples, identification, joint, rcc, render
from src.routes.common import Options

app = typer.Typer(name='choice-lab', no_args_is_help=True, add_completion=False,
                  help='Identification of random non-expected utility over three-prize lotteries.')


@app.callback()
def main(ctx: typer.Context,
         seed: int = typer.Option(config.seed, '--seed', help='Master seed of every random draw'),
         threads: int = typer.Option(config.threads, '--threads', min=1, help='Monte Carlo worker threads'),
         out: Path = typer.Option(Path(config.output_dir), '--out', help='Directory for reports')):
    """
    The main callback configures logging once and stores the global flags for the commands.

    :param ctx: typer.Context: Command context shared with the subcommands
    :param seed: int: Master seed
    :param threads: int: Worker threads, defaults to CHOICE_LAB_THREADS
    :param out: Path: Report directory
    """
    logging.basicConfig(level=config.log_level)
    ctx.obj = Options(seed, threads, out)


def include_router(router: typer.Typer):
    app.registered_commands.extend(router.registered_commands)


include_router(examples.router)
include_router(identification.router)
include_router(axioms.router)
include_router(joint.router)
include_router(rcc.router)
include_router(render.router)


if __name__ == '__main__':
    app()
