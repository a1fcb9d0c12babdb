from typing import Any, Optional

import click

from app.cli.options import (
    constraint_options,
    family_option,
    jobs,
    make_constraints,
    parse_rules,
    rules_option,
    seed_option,
    sizes_option,
    start_run,
)
from app.core.harness import (
    SERIES_COLUMNS,
    SERIES_MODE_COLUMNS,
    series_mode_rows,
    series_rows,
    write_csv,
)
from app.core.measures import protocol_runs, run_series
from app.schemas.mode import Family
from app.schemas.plan import ConfigSource, ProtocolRun

@click.command("measure")
@rules_option
@family_option("seq")
@sizes_option("8")
@click.option("--s", "s", type=click.IntRange(min=1), help="Configurations sampled per mode.")
@click.option("--m", "m", type=click.IntRange(min=1), default=32, show_default=True,
              help="Modes sampled per family.")
@click.option("--steps", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--exhaustive", is_flag=True, help="Start from all 2^n configurations.")
@click.option("--per-mode", is_flag=True, help="Also write per-mode series to series_modes.csv.")
@click.option("--protocol", type=click.Choice(["sampled", "exhaustive"]),
              help="Run a full measurement protocol instead of --family/--n/--s/--m.")
@constraint_options
@seed_option
@click.pass_context
def command(
    ctx: click.Context,
    rules: str,
    family: str,
    n_values: list[int],
    s: Optional[int],
    m: int,
    steps: int,
    exhaustive: bool,
    per_mode: bool,
    protocol: Optional[str],
    blocks: Optional[int],
    max_period: Optional[int],
    seed: int,
) -> None:
    """Mean density and normalized energy time series."""
    constraints = make_constraints(blocks, max_period)
    if not exhaustive and s is None and protocol is None:
        s = 32
    plan, out = start_run(
        ctx,
        command=f"measure:{protocol}" if protocol else "measure",
        rule_selector=rules,
        rules=tuple(parse_rules(rules)),
        families=(Family(family),),
        constraints=constraints,
        n_values=tuple(n_values),
        s=s,
        m=m,
        steps=steps,
        exhaustive=exhaustive,
        seed=seed,
    )

    if protocol:
        runs = protocol_runs(protocol, steps)
    else:
        source = ConfigSource.all() if exhaustive else ConfigSource.random(s or 32)
        runs = [
            ProtocolRun(family=Family(family), constraints=constraints, n=n, source=source,
                        m=m, steps=steps)
            for n in plan.n_values
        ]

    rows: list[dict[str, Any]] = []
    mode_rows: list[dict[str, Any]] = []
    for rule in plan.rules:
        for run in runs:
            series = run_series(
                rule,
                run.family,
                run.constraints,
                run.n,
                run.source,
                run.m,
                run.steps,
                seed,
                per_mode=per_mode,
                jobs=jobs(ctx),
            )
            rows += series_rows(series)
            mode_rows += series_mode_rows(series)
            click.echo(
                f"rule {rule} {run.family.value} [{series.constraint}] n={run.n}: "
                f"density {series.mean_density[-1]:.4f}, "
                f"energy {series.mean_norm_energy[-1]:.4f} at step {run.steps}"
            )
    write_csv(out, "series.csv", rows, SERIES_COLUMNS)
    if per_mode:
        write_csv(out, "series_modes.csv", mode_rows, SERIES_MODE_COLUMNS)
