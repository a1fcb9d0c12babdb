from typing import Optional

import click
import numpy as np

from app.cli.options import start_run
from app.core.analysis import primorial, primorial_growth, primorial_log2_table
from app.core.exceptions import InvalidInput
from app.core.harness import write_csv

PRIMORIAL_COLUMNS = ["n", "h_log2", "ratio"]


@click.command("primorial")
@click.option("--n", "n", type=click.IntRange(min=0), help="Print h(n) for one n.")
@click.option("--upto", type=click.IntRange(min=2), help="Tabulate n = 2..upto.")
@click.option("--csv", "to_csv", is_flag=True, help="Write primorial.csv into the output directory.")
@click.pass_context
def command(ctx: click.Context, n: Optional[int], upto: Optional[int], to_csv: bool) -> None:
    """Largest product of distinct primes summing to at most n, the bound on BP cycle lengths."""
    if (n is None) == (upto is None):
        raise InvalidInput("Give exactly one of --n and --upto")
    if n is not None:
        value = primorial(n)
        ratio = primorial_growth([n])[0] if n >= 2 else float("nan")
        click.echo(f"h({n}) = {value}  log2 h / sqrt(n log2 n) = {ratio:.4f}")
        return

    sizes = np.arange(2, (upto or 2) + 1)
    logs = primorial_log2_table(int(sizes[-1]))[sizes]
    ratios = primorial_growth(sizes)
    if not to_csv:
        for size, log, ratio in zip(sizes, logs, ratios):
            click.echo(f"{size}\t{log:.4f}\t{ratio:.4f}")
        return
    rows = [
        {"n": int(size), "h_log2": float(log), "ratio": float(ratio)}
        for size, log, ratio in zip(sizes, logs, ratios)
    ]
    _, out = start_run(ctx, command="primorial", n_values=tuple(int(size) for size in sizes))
    path = write_csv(out, "primorial.csv", rows, PRIMORIAL_COLUMNS)
    click.echo(f"{len(rows)} rows written to {path}")
