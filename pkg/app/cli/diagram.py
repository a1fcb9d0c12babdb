from typing import Optional

import click

from app.core.diagram import render_pgm, render_text, write_diagram
from app.core.dynamics import trajectory
from app.core.exceptions import InvalidInput
from app.core.schedule import load_mode, load_mode_file
from app.schemas.ring import Configuration, Rule


@click.command("diagram")
@click.option("--rule", type=click.IntRange(0, 255), required=True)
@click.option("--mode", "mode_text", help="Mode text, e.g. 'bs:({0,3},{1,2})'.")
@click.option("--mode-file", type=click.Path(exists=True, dir_okay=False),
              help="Mode file; its first mode is used.")
@click.option("--config", "literal", required=True, help="Initial configuration, e.g. 01100101.")
@click.option("--steps", type=click.IntRange(min=1), default=20, show_default=True)
@click.option("--substeps", is_flag=True, help="Draw the intermediate substeps too.")
@click.option("--format", "fmt", type=click.Choice(["text", "pgm"]), default="text", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), help="Write to a file instead of stdout.")
def command(
    rule: int,
    mode_text: Optional[str],
    mode_file: Optional[str],
    literal: str,
    steps: int,
    substeps: bool,
    fmt: str,
    output: Optional[str],
) -> None:
    """Space-time diagram of one configuration under one update mode."""
    if (mode_text is None) == (mode_file is None):
        raise InvalidInput("Give exactly one of --mode and --mode-file")
    if mode_text is not None:
        mode = load_mode(mode_text)
    else:
        modes = load_mode_file(mode_file or "")
        if not modes:
            raise InvalidInput(f"No mode found in {mode_file}")
        mode = modes[0]

    try:
        cfg = Configuration.from_literal(literal)
    except ValueError as e:
        raise InvalidInput(f"Invalid configuration '{literal}': {str(e)}") from e

    run = trajectory(cfg, Rule(code=rule), mode, steps, record_substeps=substeps)
    if output is None:
        click.echo(render_pgm(run) if fmt == "pgm" else render_text(run), nl=False)
        return
    if fmt == "pgm" and not output.lower().endswith(".pgm"):
        output += ".pgm"
    write_diagram(output, run)
