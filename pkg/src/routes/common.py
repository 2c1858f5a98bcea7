import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError
from rich.console import Console

from src.conf.config import config
from src.services.exceptions import ChoiceLabError

logger = logging.getLogger(__name__)

console = Console()


@dataclass
class Options:
    seed: int
    threads: int
    out: Path


def options(ctx: typer.Context) -> Options:
    """
    The options function returns the global flags set on the application callback.

    :param ctx: typer.Context: Current command context
    :return: Options: Seed, threads and output directory
    """
    if isinstance(ctx.obj, Options):
        return ctx.obj
    return Options(config.seed, config.threads, Path(config.output_dir))


def seed_for(ctx: typer.Context, seed: Optional[int]) -> int:
    return options(ctx).seed if seed is None else seed


@contextmanager
def handle_errors():
    """
    The handle_errors context manager turns library and input errors into a red message and exit code 2.
    """
    try:
        yield
    except ChoiceLabError as err:
        logger.debug('command failed', exc_info=True)
        console.print(f'[red]error:[/red] {err.detail}')
        raise typer.Exit(code=2)
    except ValidationError as err:
        console.print(f'[red]invalid input:[/red] {err.error_count()} problem(s)')
        for problem in err.errors():
            console.print(f"  {'.'.join(str(part) for part in problem['loc'])}: {problem['msg']}")
        raise typer.Exit(code=2)
    except (OSError, ValueError) as err:
        console.print(f'[red]error:[/red] {err}')
        raise typer.Exit(code=2)


def verdict(name: str, passed: bool):
    """
    The verdict function prints PASS or FAIL for a check and exits with code 1 on failure.
    """
    if passed:
        console.print(f'[green]PASS[/green] {name}')
    else:
        console.print(f'[red]FAIL[/red] {name}')
        raise typer.Exit(code=1)


def parse_list(text: str, cast=float) -> list:
    try:
        return [cast(item.strip()) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ChoiceLabError(f'Cannot parse the list {text!r}')
