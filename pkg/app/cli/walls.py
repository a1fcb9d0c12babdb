from typing import Any

import click

from app.cli.options import parse_rules, rules_option, start_run
from app.core import catalog
from app.core.analysis import find_absolute_walls, verify_relative_wall, wall_preserving_mode
from app.core.config import settings
from app.core.exceptions import InvalidInput
from app.core.harness import write_csv
from app.core.logger import logger
from app.core.utils import parse_int_list

WALL_COLUMNS = ["rule", "k", "word", "kind"]

# free cells around a relative wall when checking it
CONTEXT_CELLS = 6


@click.command("walls")
@rules_option
@click.option("--k", "lengths", default=f"1..{settings.WALL_MAX_K}", show_default=True,
              help="Wall lengths: '2', '1..4' or '2,3'.")
@click.option("--t-max", type=click.IntRange(min=1), default=32, show_default=True,
              help="Steps checked for each relative wall.")
@click.pass_context
def command(ctx: click.Context, rules: str, lengths: str, t_max: int) -> None:
    """Absolute walls by enumeration, and the verified relative walls of a rule."""
    try:
        sizes = sorted(set(parse_int_list(lengths)))
    except ValueError as e:
        raise InvalidInput(f"Invalid wall lengths '{lengths}': {str(e)}") from e
    plan, out = start_run(ctx, command="walls", rule_selector=rules,
                          rules=tuple(parse_rules(rules)), n_values=tuple(sizes))

    rows: list[dict[str, Any]] = []
    for rule in plan.rules:
        found = []
        for k in sizes:
            for word in sorted(find_absolute_walls(rule, k)):
                rows.append({"rule": rule, "k": k, "word": word, "kind": "absolute"})
                found.append(word)
            for word in catalog.RELATIVE_WALLS.get(rule, ()):
                if len(word) != k:
                    continue
                n = k + CONTEXT_CELLS
                mode = wall_preserving_mode(rule, n, [0], word)
                if verify_relative_wall(rule, mode, word, n, t_max, position=0):
                    rows.append({"rule": rule, "k": k, "word": word, "kind": "relative"})
                    found.append(f"{word}*")
                else:
                    logger.warning(f"Relative wall {word} of rule {rule} did not hold for {t_max} steps")
        click.echo(f"rule {rule}: {','.join(found) if found else '-'}")
    write_csv(out, "walls.csv", rows, WALL_COLUMNS)
