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
from app.core.analysis import modes_for, scaling_record, sweep_task
from app.core.dynamics import sweep_sample
from app.core.harness import (
    CENSUS_COLUMNS,
    SCALING_COLUMNS,
    SWEEP_COLUMNS,
    census_name,
    census_rows,
    run_tasks,
    scaling_rows,
    sweep_row,
    write_csv,
)
from app.core.logger import logger
from app.core.measures import CONFIG_STREAM
from app.core.utils import derive_seed
from app.schemas.mode import Family, UpdateMode
from app.schemas.report import SweepReport


def sample_task(task: tuple[int, UpdateMode, int, int]) -> SweepReport:
    rule, mode, s, seed = task
    return sweep_sample(rule, mode, mode.n, s, seed)


@click.command("sweep")
@rules_option
@family_option()
@sizes_option()
@click.option("--modes", "m", type=click.IntRange(min=1), default=32, show_default=True,
              help="Modes sampled per ring size (PAR and BIP are enumerated).")
@click.option("--s", "s", type=click.IntRange(min=1),
              help="Sample s configurations instead of sweeping all 2^n.")
@click.option("--census/--no-census", default=True, show_default=True,
              help="Write one attractor census CSV per (rule, mode, n).")
@constraint_options
@seed_option
@click.pass_context
def command(
    ctx: click.Context,
    rules: str,
    family: str,
    n_values: list[int],
    m: int,
    s: Optional[int],
    census: bool,
    blocks: Optional[int],
    max_period: Optional[int],
    seed: int,
) -> None:
    """Attractor census and max-cycle scaling over ring sizes."""
    mode_family = Family(family)
    constraints = make_constraints(blocks, max_period)
    plan, out = start_run(
        ctx,
        command="sweep",
        rule_selector=rules,
        rules=tuple(parse_rules(rules)),
        families=(mode_family,),
        constraints=constraints,
        n_values=tuple(n_values),
        s=s,
        m=m,
        exhaustive=s is None,
        seed=seed,
    )

    modes_by_n: dict[int, list[UpdateMode]] = {}
    for n in plan.n_values:
        if mode_family == Family.BIP and n % 2:
            logger.warning(f"Skipping odd n={n}: bipartite modes need an even ring")
            continue
        modes_by_n[n] = modes_for(mode_family, n, m, seed, constraints)

    keyed = [
        (rule, n, index, mode)
        for rule in plan.rules
        for n, modes in modes_by_n.items()
        for index, mode in enumerate(modes)
    ]
    logger.info(f"Sweeping {len(plan.rules)} rules over {len(keyed)} (rule, mode) pairs")
    if s is None:
        reports = run_tasks(sweep_task, [(rule, mode) for rule, _, _, mode in keyed],
                            jobs=jobs(ctx), desc="sweep")
    else:
        tasks = [(rule, mode, s, derive_seed(seed, CONFIG_STREAM, n)) for rule, n, _, mode in keyed]
        reports = run_tasks(sample_task, tasks, jobs=jobs(ctx), desc="sample")

    constraint = constraints.describe()
    sweep_rows: list[dict[str, Any]] = []
    scaling: list[dict[str, Any]] = []
    for (rule, n, index, _), report in zip(keyed, reports):
        sweep_rows.append(sweep_row(report, constraint, index))
        if census:
            write_csv(out, census_name(report, index), census_rows(report), CENSUS_COLUMNS)
    write_csv(out, "sweep.csv", sweep_rows, SWEEP_COLUMNS)

    for rule in plan.rules:
        own = [report for (code, _, _, _), report in zip(keyed, reports) if code == rule]
        if not own:
            continue
        record = scaling_record(rule, mode_family, constraints, own)
        scaling += scaling_rows(record)
        summary = ", ".join(f"n={p.n}:{p.max_cycle}" for p in record.points)
        regime = record.regime.value if record.regime is not None else "-"
        click.echo(f"rule {rule} {mode_family.value}: {summary} regime={regime}")
    write_csv(out, "scaling.csv", scaling, SCALING_COLUMNS)
