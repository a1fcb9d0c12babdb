from typing import Optional

import click

from app.cli.options import constraint_options, family_option, make_constraints, seed_option
from app.core.analysis import modes_for
from app.core.schedule import save_mode, save_mode_file
from app.schemas.mode import Family


@click.command("modes")
@family_option("seq")
@click.option("--n", "n", type=click.IntRange(min=1), required=True, help="Ring size.")
@click.option("--count", type=click.IntRange(min=1), default=32, show_default=True)
@constraint_options
@seed_option
@click.option("--output", type=click.Path(dir_okay=False), help="Mode file to write.")
def command(
    family: str,
    n: int,
    count: int,
    blocks: Optional[int],
    max_period: Optional[int],
    seed: int,
    output: Optional[str],
) -> None:
    """Sample update modes and print them in the mode text format."""
    modes = modes_for(Family(family), n, count, seed, make_constraints(blocks, max_period))
    if output is None:
        for mode in modes:
            click.echo(save_mode(mode))
        return
    path = save_mode_file(output, modes)
    click.echo(f"{len(modes)} modes written to {path}")
