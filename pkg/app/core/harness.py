"""Task fan-out and result files shared by every command."""

from functools import partial
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, TypeVar

import pandas as pd
from tqdm import tqdm
from tqdm.contrib.concurrent import process_map

from app.core.config import current_budgets, override, settings
from app.core.logger import logger
from app.core.schedule import save_mode
from app.schemas.plan import ExperimentPlan
from app.schemas.report import MeasureSeries, ScalingRecord, SweepReport

T = TypeVar("T")
R = TypeVar("R")

SWEEP_COLUMNS = [
    "rule", "family", "constraint", "n", "mode_index", "mode",
    "cycles", "max_cycle", "max_transient", "fixed_points",
]
CENSUS_COLUMNS = [
    "rule", "family", "mode", "n", "cycle_rep", "cycle_length", "basin_size", "max_transient",
]
SCALING_COLUMNS = [
    "rule", "family", "constraint", "n", "modes_sampled", "max_cycle", "max_transient", "regime",
]
SERIES_COLUMNS = [
    "rule", "family", "constraint", "n", "s", "m", "step",
    "mean_density", "mean_norm_energy", "var_density", "var_norm_energy",
]
SERIES_MODE_COLUMNS = [
    "rule", "family", "constraint", "n", "mode_index", "step", "density", "norm_energy",
]


def _with_budgets(fn: Callable[[T], R], budgets: dict[str, int], item: T) -> R:
    # workers may be spawned without the parent's overrides
    override(budgets)
    return fn(item)


def run_tasks(
    fn: Callable[[T], R],
    items: Sequence[T],
    jobs: Optional[int] = None,
    desc: Optional[str] = None,
) -> list[R]:
    """Map fn over items in order, across processes when jobs > 1."""
    jobs = settings.JOBS if jobs is None else jobs
    disable = not settings.PROGRESS
    if jobs > 1 and len(items) > 1:
        logger.debug(f"Running {len(items)} tasks on {jobs} workers")
        return process_map(
            partial(_with_budgets, fn, current_budgets()),
            items,
            max_workers=jobs,
            chunksize=1,
            desc=desc,
            disable=disable,
        )
    return [fn(item) for item in tqdm(items, desc=desc, disable=disable)]


def prepare_output(path: Path | str) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_plan(out: Path, plan: ExperimentPlan) -> Path:
    path = out / "plan.json"
    path.write_text(plan.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Plan written to {path}")
    return path


def write_csv(out: Path, name: str, rows: list[dict[str, Any]], columns: list[str]) -> Path:
    path = out / name
    pd.DataFrame(rows, columns=columns).to_csv(path, index=False, encoding="utf-8")
    logger.info(f"{len(rows)} rows written to {path}")
    return path


def sweep_row(report: SweepReport, constraint: str, mode_index: int) -> dict[str, Any]:
    return {
        "rule": report.rule,
        "family": report.mode.family.value,
        "constraint": constraint,
        "n": report.n,
        "mode_index": mode_index,
        "mode": save_mode(report.mode),
        "cycles": len(report.cycles),
        "max_cycle": report.max_cycle,
        "max_transient": report.max_transient,
        "fixed_points": report.fixed_points,
    }


def census_rows(report: SweepReport) -> list[dict[str, Any]]:
    mode = save_mode(report.mode)
    return [
        {
            "rule": report.rule,
            "family": report.mode.family.value,
            "mode": mode,
            "n": report.n,
            "cycle_rep": cycle.cycle_rep,
            "cycle_length": cycle.cycle_length,
            "basin_size": cycle.basin_size,
            "max_transient": cycle.max_transient,
        }
        for cycle in report.cycles
    ]


def census_name(report: SweepReport, mode_index: int) -> str:
    return f"census_{report.rule}_{report.mode.family.value}_n{report.n}_m{mode_index}.csv"


def scaling_rows(record: ScalingRecord) -> list[dict[str, Any]]:
    regime = record.regime.value if record.regime is not None else "open"
    return [
        {
            "rule": record.rule,
            "family": record.family.value,
            "constraint": record.constraint,
            "n": point.n,
            "modes_sampled": point.modes_sampled,
            "max_cycle": point.max_cycle,
            "max_transient": point.max_transient,
            "regime": regime,
        }
        for point in record.points
    ]


def series_rows(series: MeasureSeries) -> list[dict[str, Any]]:
    return [
        {
            "rule": series.rule,
            "family": series.family.value,
            "constraint": series.constraint,
            "n": series.n,
            "s": series.s,
            "m": series.m,
            "step": step,
            "mean_density": series.mean_density[step],
            "mean_norm_energy": series.mean_norm_energy[step],
            "var_density": series.var_density[step],
            "var_norm_energy": series.var_norm_energy[step],
        }
        for step in range(series.steps + 1)
    ]


def series_mode_rows(series: MeasureSeries) -> list[dict[str, Any]]:
    if series.per_mode_density is None or series.per_mode_energy is None:
        return []
    return [
        {
            "rule": series.rule,
            "family": series.family.value,
            "constraint": series.constraint,
            "n": series.n,
            "mode_index": index,
            "step": step,
            "density": density[step],
            "norm_energy": energy[step],
        }
        for index, (density, energy) in enumerate(
            zip(series.per_mode_density, series.per_mode_energy)
        )
        for step in range(series.steps + 1)
    ]
