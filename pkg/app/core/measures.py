"""Density and energy observables and their averaged time series."""

from typing import NamedTuple, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.dynamics import get_evolver, random_states, successor_map
from app.core.exceptions import BudgetExceeded, InsufficientSeries, RingTooSmall
from app.core.harness import run_tasks
from app.core.logger import logger
from app.core.ring import RuleLike, as_rule
from app.core.schedule import sample_modes
from app.core.utils import derive_seed
from app.schemas.mode import Family, ModeConstraints, UpdateMode
from app.schemas.plan import ConfigSource, ProtocolRun
from app.schemas.report import MeasureSeries
from app.schemas.ring import Configuration, Rule

# stream key of the configuration sample, apart from the per-family mode streams
CONFIG_STREAM = 1000


def density(cfg: Configuration) -> float:
    return sum(cfg.bits) / cfg.n


def energy(cfg: Configuration) -> int:
    """sum_i (1 - 2x_i)/2 * ((2x_{i-1} - 1) + (2x_{i+1} - 1)), indices mod n."""
    if cfg.n < 2:
        raise RingTooSmall(f"Energy needs at least 2 cells, got {cfg.n}")
    x = cfg.bits
    n = cfg.n
    total = sum(
        (1 - 2 * x[i]) * ((2 * x[(i - 1) % n] - 1) + (2 * x[(i + 1) % n] - 1))
        for i in range(n)
    )
    return total // 2


def normalized_energy(cfg: Configuration) -> float:
    return energy(cfg) / cfg.n


def sample_configs(n: int, s: int, seed: int) -> list[Configuration]:
    if s < 1:
        raise ValueError("Sample size must be at least 1")
    return [Configuration.from_array(cells) for cells in random_states(n, s, seed)]


def variance_across_modes(series: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    """Unbiased variance across modes, per step."""
    matrix = np.asarray(series, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 2:
        raise InsufficientSeries("Variance across modes needs at least two series")
    return matrix.var(axis=0, ddof=1)


class _SeriesTask(NamedTuple):
    rule: Rule
    mode: UpdateMode
    source: ConfigSource
    config_seed: int
    steps: int


def _packed_totals(states: np.ndarray, n: int) -> tuple[int, int]:
    """Total ones and total disagreeing neighbour pairs over a packed ensemble."""
    full = (1 << n) - 1
    rotated = ((states << 1) & full) | (states >> (n - 1))
    ones = int(np.bitwise_count(states).sum())
    edges = int(np.bitwise_count(states ^ rotated).sum())
    return ones, edges


def _cell_totals(states: np.ndarray) -> tuple[int, int]:
    ones = int(states.sum(dtype=np.int64))
    edges = int((states != np.roll(states, 1, axis=1)).sum(dtype=np.int64))
    return ones, edges


def mode_series(task: _SeriesTask) -> tuple[np.ndarray, np.ndarray]:
    """Mean density and mean normalized energy of one mode's ensemble, steps+1 values each.

    e(x) = 2 * (disagreeing neighbour pairs) - n, so ensemble sums stay exact integers.
    """
    evolver = get_evolver(task.rule, task.mode)
    n = task.mode.n
    count = task.source.size(n)
    densities = np.empty(task.steps + 1)
    energies = np.empty(task.steps + 1)

    def record(t: int, ones: int, edges: int) -> None:
        densities[t] = ones / (count * n)
        energies[t] = (2 * edges - count * n) / (count * n)

    if task.source.exhaustive:
        successors = successor_map(task.rule, task.mode, n)
        states = np.arange(1 << n, dtype=np.int64)
        for t in range(task.steps + 1):
            if t:
                states = successors[states]
            record(t, *_packed_totals(states.astype(np.uint64), n))
    elif evolver.packed:
        cells = random_states(n, count, task.config_seed)
        packed = (cells.astype(np.uint64) << np.arange(n, dtype=np.uint64)).sum(
            axis=1, dtype=np.uint64
        )
        for t in range(task.steps + 1):
            if t:
                packed = evolver.step_packed(packed)
            record(t, *_packed_totals(packed, n))
    else:
        cells = random_states(n, count, task.config_seed)
        for t in range(task.steps + 1):
            if t:
                cells = evolver.step_cells(cells)
            record(t, *_cell_totals(cells))
    return densities, energies


def run_series(
    rule: RuleLike,
    family: Family,
    constraints: Optional[ModeConstraints],
    n: int,
    config_source: ConfigSource,
    m: int,
    steps: int,
    seed: int,
    per_mode: bool = False,
    modes: Optional[Sequence[UpdateMode]] = None,
    jobs: Optional[int] = None,
) -> MeasureSeries:
    """Average density and normalized energy over a configuration sample and m modes."""
    rule = as_rule(rule)
    constraints = constraints or ModeConstraints()
    if n < 2:
        raise RingTooSmall(f"Energy needs at least 2 cells, got {n}")
    if config_source.exhaustive and n > settings.EXHAUSTIVE_MAX_CELLS:
        raise BudgetExceeded(
            f"2^{n} configurations exceed the exhaustive cap of 2^{settings.EXHAUSTIVE_MAX_CELLS}"
        )
    if modes is None:
        modes = sample_modes(family, n, m, seed, constraints)
    config_seed = derive_seed(seed, CONFIG_STREAM, n)
    logger.info(
        f"Series rule {rule}, {family.value} [{constraints.describe()}], n={n}, "
        f"{'all' if config_source.exhaustive else config_source.s} configurations, "
        f"{len(modes)} modes, {steps} steps"
    )

    tasks = [_SeriesTask(rule, mode, config_source, config_seed, steps) for mode in modes]
    results = run_tasks(mode_series, tasks, jobs=jobs, desc=f"rule {rule} {family.value}")
    density_matrix = np.vstack([density for density, _ in results])
    energy_matrix = np.vstack([energy for _, energy in results])

    if len(modes) >= 2:
        var_density = variance_across_modes(density_matrix)
        var_energy = variance_across_modes(energy_matrix)
    else:
        var_density = var_energy = np.full(steps + 1, np.nan)

    return MeasureSeries(
        rule=rule.code,
        family=family,
        constraint=constraints.describe(),
        n=n,
        s=config_source.size(n),
        m=len(modes),
        steps=steps,
        exhaustive=config_source.exhaustive,
        mean_density=density_matrix.mean(axis=0).tolist(),
        mean_norm_energy=energy_matrix.mean(axis=0).tolist(),
        var_density=var_density.tolist(),
        var_norm_energy=var_energy.tolist(),
        per_mode_density=density_matrix.tolist() if per_mode else None,
        per_mode_energy=energy_matrix.tolist() if per_mode else None,
    )


SAMPLED_FAMILIES = (Family.SEQ, Family.BS, Family.BP, Family.LC)


def protocol_runs(name: str, steps: int = 1000) -> list[ProtocolRun]:
    """Runs of the two measurement protocols: 'sampled' and 'exhaustive'."""
    if name == "sampled":
        return [
            ProtocolRun(family=family, n=n, source=ConfigSource.random(s), m=32, steps=steps)
            for n in (8, 38, 138)
            for s in (32, 128)
            for family in SAMPLED_FAMILIES
        ]
    if name == "exhaustive":
        source = ConfigSource.all()
        return [
            ProtocolRun(family=Family.SEQ, n=16, source=source, steps=steps),
            *(
                ProtocolRun(
                    family=Family.BS,
                    constraints=ModeConstraints(blocks=blocks),
                    n=16,
                    source=source,
                    steps=steps,
                )
                for blocks in (3, 4, 5)
            ),
            ProtocolRun(family=Family.BP, n=16, source=source, steps=steps),
            *(
                ProtocolRun(
                    family=Family.LC,
                    constraints=ModeConstraints(max_period=period),
                    n=16,
                    source=source,
                    steps=steps,
                )
                for period in (2, 4, 5)
            ),
        ]
    raise ValueError(f"Unknown protocol '{name}', expected 'sampled' or 'exhaustive'")
