import traceback
from typing import Any, Optional

import click
from pydantic import ValidationError

from app.cli import commands
from app.core.config import override, settings
from app.core.exceptions import EcaError
from app.core.logger import logger, set_verbose


class EcaGroup(click.Group):
    """Command group that turns domain errors into exit codes."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except EcaError as e:
            self._report(e)
            ctx.exit(e.exit_code)
        except ValidationError as e:
            self._report(e)
            ctx.exit(2)

    @staticmethod
    def _report(error: Exception) -> None:
        logger.error(f"{type(error).__name__}: {str(error)}")
        if settings.DEBUG:
            logger.error(traceback.format_exc())


@click.group(cls=EcaGroup)
@click.version_option(settings.VERSION, prog_name=settings.PROJECT_NAME)
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level.")
@click.option("--jobs", type=click.IntRange(min=1), help="Worker processes (default: all CPUs).")
@click.option("--out", type=click.Path(file_okay=False), help="Output directory.")
@click.option("--no-progress", is_flag=True, help="Hide progress bars.")
@click.option("--max-steps", type=click.IntRange(min=1), help="Step budget per trajectory.")
@click.option("--exhaustive-cap", type=click.IntRange(1, 64),
              help="Largest ring swept over all 2^n configurations.")
@click.pass_context
def cli(
    ctx: click.Context,
    verbose: bool,
    jobs: Optional[int],
    out: Optional[str],
    no_progress: bool,
    max_steps: Optional[int],
    exhaustive_cap: Optional[int],
) -> None:
    """Elementary cellular automata under periodic update modes."""
    set_verbose(verbose)
    if no_progress:
        settings.PROGRESS = False
    budgets: dict[str, int] = {}
    if max_steps is not None:
        budgets["steps"] = max_steps
    if exhaustive_cap is not None:
        budgets["states"] = exhaustive_cap
    override(budgets)
    ctx.ensure_object(dict)
    ctx.obj.update(jobs=jobs, out=out)
    logger.debug(f"{settings.PROJECT_NAME} {settings.VERSION}, budgets {budgets or 'default'}")


for command in commands:
    cli.add_command(command)
