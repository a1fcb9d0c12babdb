from typing import Optional

import click

from app.core.analysis import LCM_RULES, craft_lcm_config, lcm_report, tight_ring_size
from app.core.exceptions import InvalidInput
from app.core.schedule import save_mode


@click.command("craft")
@click.option("--rule", type=click.Choice([str(code) for code in LCM_RULES]), required=True)
@click.option("--segments", required=True, help="Segment lengths in ring order, e.g. '3,5'.")
@click.option("--n", "n", type=click.IntRange(min=1), help="Ring size; defaults to the tightest fit.")
def command(rule: str, segments: str, n: Optional[int]) -> None:
    """Build a wall-separated configuration and compare its cycle with the lcm of its segments."""
    try:
        lengths = [int(part) for part in segments.split(",")]
    except ValueError as e:
        raise InvalidInput(f"Invalid segment lengths '{segments}': {str(e)}") from e
    code = int(rule)
    crafted = craft_lcm_config(code, n or tight_ring_size(code, lengths), lengths)
    report = lcm_report(crafted)
    click.echo(f"configuration: {crafted.configuration}")
    click.echo(f"mode: {save_mode(crafted.mode)}")
    click.echo(f"segments: {', '.join(f'{start}+{length}' for start, length in crafted.segments)}")
    click.echo(f"segment cycles: {', '.join(str(c) for c in report.segment_cycles)}")
    click.echo(f"cycle length: {report.cycle_length} (lcm {report.lcm}, transient {report.transient})")
    click.echo(f"walls preserved: {'yes' if report.walls_preserved else 'no'}")
