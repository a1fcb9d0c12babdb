"""Options and parameter parsing shared by the subcommands."""

from pathlib import Path
from typing import Any, Callable, Optional

import click

from app.core.config import current_budgets, settings
from app.core.exceptions import InvalidInput
from app.core.harness import prepare_output, write_plan
from app.core.ring import all_class_representatives
from app.core.utils import parse_int_list
from app.schemas.mode import Family, ModeConstraints
from app.schemas.plan import ExperimentPlan

ALL_REPS = "all-88-reps"

F = Callable[..., Any]


def parse_rules(selector: str) -> list[int]:
    """'all-88-reps', a range 'a..b' or a comma list of codes."""
    if selector.strip().lower() == ALL_REPS:
        return list(all_class_representatives())
    try:
        codes = parse_int_list(selector)
    except ValueError as e:
        raise InvalidInput(f"Invalid rule selector '{selector}': {str(e)}") from e
    if any(not 0 <= code <= 255 for code in codes):
        raise InvalidInput("Rule codes must lie in [0, 255]")
    return codes


def _ints_callback(
    ctx: click.Context, param: click.Parameter, value: Optional[str]
) -> Optional[list[int]]:
    if value is None:
        return None
    try:
        return parse_int_list(value)
    except ValueError as e:
        raise click.BadParameter(str(e)) from e


def rules_option(f: F) -> F:
    return click.option(
        "--rules",
        "rules",
        required=True,
        help=f"Rule codes: '110', '0..255', '1,9,110' or '{ALL_REPS}'.",
    )(f)


def sizes_option(default: Optional[str] = None) -> Callable[[F], F]:
    return click.option(
        "--n",
        "n_values",
        required=default is None,
        default=default,
        callback=_ints_callback,
        help="Ring sizes: '16', '4..14' or '8,38,138'.",
    )


def family_option(default: str = "par") -> Callable[[F], F]:
    return click.option(
        "--family",
        type=click.Choice([family.value for family in Family if family != Family.EXPLICIT]),
        default=default,
        show_default=True,
        help="Update-mode family.",
    )


def constraint_options(f: F) -> F:
    f = click.option("--blocks", type=click.IntRange(min=1), help="Block count of BS modes.")(f)
    f = click.option(
        "--max-period",
        "--lc-max-period",
        "max_period",
        type=click.IntRange(min=1),
        help="Largest local-clock period (LC) or subsequence length (BP).",
    )(f)
    return f


def seed_option(f: F) -> F:
    return click.option(
        "--seed", type=click.IntRange(min=0), default=0, show_default=True, help="Master seed."
    )(f)


def make_constraints(blocks: Optional[int], max_period: Optional[int]) -> ModeConstraints:
    return ModeConstraints(blocks=blocks, max_period=max_period)


def jobs(ctx: click.Context) -> int:
    return int(ctx.obj.get("jobs") or settings.JOBS)


def start_run(ctx: click.Context, **fields: Any) -> tuple[ExperimentPlan, Path]:
    """Validate the plan, create the output directory and store plan.json in it."""
    plan = ExperimentPlan(
        output_dir=str(ctx.obj.get("out") or settings.OUTPUT_DIR),
        budgets=current_budgets(),
        **fields,
    )
    out = prepare_output(plan.output_dir)
    write_plan(out, plan)
    return plan, out
