"""Global step map F, trajectories, cycle detection and attractor sweeps."""

from functools import lru_cache
from typing import NamedTuple, Optional, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import BudgetExceeded, PackedWidthExceeded, SizeMismatch
from app.core.logger import logger
from app.core.ring import RuleLike, as_rule
from app.schemas.mode import Block, UpdateMode
from app.schemas.report import (
    AttractorOutcome,
    CycleSummary,
    SweepReport,
    Trajectory,
)
from app.schemas.ring import Configuration, Rule

PackedStates = Union[np.ndarray, int]

SUCCESSOR_CHUNK = 1 << 20


def _packed_local(states: PackedStates, patterns: tuple[int, ...], n: int, full: int) -> PackedStates:
    """Apply the local rule to every cell of every packed state at once."""
    left = ((states << 1) & full) | (states >> (n - 1))
    right = (states >> 1) | ((states & 1) << (n - 1))
    out: PackedStates = 0
    for pattern in patterns:
        out = out | (
            (left if pattern & 4 else ~left)
            & (states if pattern & 2 else ~states)
            & (right if pattern & 1 else ~right)
        )
    return out & full


def as_int(cells: np.ndarray) -> int:
    """Numeric value of a cell array, cell 0 least significant."""
    return int.from_bytes(np.packbits(cells, bitorder="little").tobytes(), "little")


class Evolver:
    """Step engine for one (rule, mode) pair.

    Rings up to PACKED_WIDTH cells run on packed words (numpy uint64 arrays or plain
    ints); larger rings run on uint8 arrays of shape (batch, n).
    """

    def __init__(self, rule: RuleLike, mode: UpdateMode) -> None:
        self.rule: Rule = as_rule(rule)
        self.mode = mode
        self.n = mode.n
        self.packed = self.n <= settings.PACKED_WIDTH
        self.lookup = self.rule.lookup
        self.patterns = tuple(p for p in range(8) if (self.rule.code >> p) & 1)
        if self.packed:
            self.full = (1 << self.n) - 1
            self.masks = tuple(sum(1 << cell for cell in block) for block in mode.blocks)
        cells = [np.asarray(block, dtype=np.intp) for block in mode.blocks]
        self.neighbors = tuple(
            (block, (block - 1) % self.n, (block + 1) % self.n) for block in cells
        )

    def _require_packed(self) -> None:
        if not self.packed:
            raise PackedWidthExceeded(
                f"Ring of {self.n} cells exceeds the packed width {settings.PACKED_WIDTH}"
            )

    def substep_packed(self, states: PackedStates, index: int) -> PackedStates:
        mask = self.masks[index]
        if mask == 0:
            return states
        updated = _packed_local(states, self.patterns, self.n, self.full)
        return (states & (self.full ^ mask)) | (updated & mask)

    def step_packed(self, states: PackedStates) -> PackedStates:
        self._require_packed()
        for index in range(self.mode.period):
            states = self.substep_packed(states, index)
        return states

    def substep_cells(self, states: np.ndarray, index: int) -> np.ndarray:
        cells, left, right = self.neighbors[index]
        if cells.size == 0:
            return states
        out = states.copy()
        out[:, cells] = self.lookup[
            4 * states[:, left] + 2 * states[:, cells] + states[:, right]
        ]
        return out

    def step_cells(self, states: np.ndarray) -> np.ndarray:
        for index in range(self.mode.period):
            states = self.substep_cells(states, index)
        return states

    def step(self, cfg: Configuration) -> Configuration:
        self._check(cfg)
        if self.packed:
            return _from_int(self.n, int(self.step_packed(_to_int(cfg))))
        return Configuration.from_array(self.step_cells(cfg.to_array()[None, :]))

    def substeps(self, cfg: Configuration) -> list[Configuration]:
        """Configurations after each block of one step; the last equals step(cfg)."""
        self._check(cfg)
        states = cfg.to_array()[None, :]
        out = []
        for index in range(self.mode.period):
            states = self.substep_cells(states, index)
            out.append(Configuration.from_array(states))
        return out

    def _check(self, cfg: Configuration) -> None:
        if cfg.n != self.n:
            raise SizeMismatch(f"Configuration has {cfg.n} cells, mode expects {self.n}")


@lru_cache(maxsize=256)
def get_evolver(rule: Rule, mode: UpdateMode) -> Evolver:
    return Evolver(rule, mode)


def _to_int(cfg: Configuration) -> int:
    return sum(bit << index for index, bit in enumerate(cfg.bits))


def _from_int(n: int, value: int) -> Configuration:
    return Configuration(bits=tuple((value >> index) & 1 for index in range(n)))


def substep(cfg: Configuration, rule: RuleLike, block: Block) -> Configuration:
    """f_B: cells of the block read the pre-substep state together; others keep their value."""
    lookup = as_rule(rule).lookup
    bits = list(cfg.bits)
    n = cfg.n
    for cell in block:
        bits[cell] = int(
            lookup[4 * cfg.bits[(cell - 1) % n] + 2 * cfg.bits[cell] + cfg.bits[(cell + 1) % n]]
        )
    return Configuration(bits=tuple(bits))


def step(cfg: Configuration, rule: RuleLike, mode: UpdateMode) -> Configuration:
    return get_evolver(as_rule(rule), mode).step(cfg)


def trajectory(
    cfg: Configuration,
    rule: RuleLike,
    mode: UpdateMode,
    max_steps: int,
    record_substeps: bool = False,
) -> Trajectory:
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    evolver = get_evolver(as_rule(rule), mode)
    evolver._check(cfg)
    steps = [cfg]
    substeps: Optional[list[list[Configuration]]] = [] if record_substeps else None
    for _ in range(max_steps):
        if substeps is not None:
            row = evolver.substeps(steps[-1])
            substeps.append(row)
            steps.append(row[-1])
        else:
            steps.append(evolver.step(steps[-1]))
    return Trajectory(steps=steps, substeps=substeps)


def _detect_packed(evolver: Evolver, start: int, budget: int) -> tuple[int, int, int]:
    seen = {start: 0}
    state, t = start, 0
    while True:
        state = int(evolver.step_packed(state))
        t += 1
        if state in seen:
            transient = seen[state]
            cycle = [s for s, when in seen.items() if when >= transient]
            return transient, t - transient, min(cycle)
        if t >= budget:
            raise BudgetExceeded(f"No cycle found within {budget} steps")
        seen[state] = t


def _detect_brent(evolver: Evolver, start: np.ndarray, budget: int) -> tuple[int, int, int]:
    used = 0

    def advance(states: np.ndarray) -> np.ndarray:
        nonlocal used
        used += 1
        if used > budget:
            raise BudgetExceeded(f"No cycle found within {budget} steps")
        return evolver.step_cells(states)

    power = length = 1
    tortoise, hare = start, advance(start)
    while not np.array_equal(tortoise, hare):
        if power == length:
            tortoise, power, length = hare, power * 2, 0
        hare = advance(hare)
        length += 1

    tortoise = hare = start
    for _ in range(length):
        hare = advance(hare)
    transient = 0
    while not np.array_equal(tortoise, hare):
        tortoise, hare = advance(tortoise), advance(hare)
        transient += 1

    smallest = as_int(tortoise[0])
    for _ in range(length - 1):
        tortoise = advance(tortoise)
        smallest = min(smallest, as_int(tortoise[0]))
    return transient, length, smallest


def detect_cycle(cfg: Configuration, rule: RuleLike, mode: UpdateMode) -> AttractorOutcome:
    """Minimal transient and cycle length of the orbit of cfg."""
    evolver = get_evolver(as_rule(rule), mode)
    evolver._check(cfg)
    budget = settings.MAX_STEPS
    if evolver.packed:
        transient, length, smallest = _detect_packed(evolver, _to_int(cfg), budget)
    else:
        transient, length, smallest = _detect_brent(evolver, cfg.to_array()[None, :], budget)
    return AttractorOutcome(
        transient=transient,
        cycle_length=length,
        cycle_min_rep=_from_int(cfg.n, smallest),
    )


def successor_map(rule: RuleLike, mode: UpdateMode, n: Optional[int] = None) -> np.ndarray:
    """Packed successor F(x) of every state x in [0, 2^n), as int64."""
    n = mode.n if n is None else n
    if n != mode.n:
        raise SizeMismatch(f"Mode is defined on {mode.n} cells, not {n}")
    if n > settings.EXHAUSTIVE_MAX_CELLS:
        raise BudgetExceeded(
            f"2^{n} states exceed the exhaustive cap of 2^{settings.EXHAUSTIVE_MAX_CELLS}"
        )
    evolver = get_evolver(as_rule(rule), mode)
    evolver._require_packed()
    total = 1 << n
    successors = np.empty(total, dtype=np.int64)
    for start in range(0, total, SUCCESSOR_CHUNK):
        stop = min(total, start + SUCCESSOR_CHUNK)
        states = np.arange(start, stop, dtype=np.uint64)
        successors[start:stop] = evolver.step_packed(states).astype(np.int64)
    return successors


class Basins(NamedTuple):
    """Functional-graph analysis of a successor map, one entry per state."""

    successors: np.ndarray
    on_cycle: np.ndarray
    # smallest state of the cycle each state falls into
    rep: np.ndarray
    transient: np.ndarray
    cycle_length: np.ndarray

    def outcome(self, state: int, n: int) -> AttractorOutcome:
        return AttractorOutcome(
            transient=int(self.transient[state]),
            cycle_length=int(self.cycle_length[state]),
            cycle_min_rep=_from_int(n, int(self.rep[state])),
        )


def analyze_successors(successors: np.ndarray) -> Basins:
    total = successors.size
    indegree = np.bincount(successors, minlength=total)
    on_cycle = np.ones(total, dtype=bool)
    frontier = indegree == 0
    while frontier.any():
        on_cycle[frontier] = False
        indegree -= np.bincount(successors[frontier], minlength=total)
        frontier = on_cycle & (indegree == 0)

    cyclic = np.flatnonzero(on_cycle)
    label = np.arange(total, dtype=np.int64)
    jump = successors.copy()
    rounds = max(1, int(total - 1).bit_length())
    for _ in range(rounds):
        label[cyclic] = np.minimum(label[cyclic], label[jump[cyclic]])
        jump[cyclic] = jump[jump[cyclic]]
    lengths = np.bincount(label[cyclic], minlength=total)

    rep = np.full(total, -1, dtype=np.int64)
    rep[cyclic] = label[cyclic]
    transient = np.zeros(total, dtype=np.int64)
    known = on_cycle.copy()
    depth = 0
    while not known.all():
        depth += 1
        reached = ~known & known[successors]
        rep[reached] = rep[successors[reached]]
        transient[reached] = depth
        known |= reached

    return Basins(
        successors=successors,
        on_cycle=on_cycle,
        rep=rep,
        transient=transient,
        cycle_length=lengths[rep],
    )


def sweep_basins(rule: RuleLike, mode: UpdateMode, n: Optional[int] = None) -> Basins:
    return analyze_successors(successor_map(rule, mode, n))


def sweep_all(rule: RuleLike, mode: UpdateMode, n: Optional[int] = None) -> SweepReport:
    """Attractor census over all 2^n configurations."""
    rule = as_rule(rule)
    n = mode.n if n is None else n
    logger.debug(f"Sweeping rule {rule} over 2^{n} states, period {mode.period}")
    basins = sweep_basins(rule, mode, n)

    reps, basin_sizes = np.unique(basins.rep, return_counts=True)
    deepest = np.zeros(basins.rep.size, dtype=np.int64)
    np.maximum.at(deepest, basins.rep, basins.transient)
    cycles = [
        CycleSummary(
            cycle_rep=_from_int(n, int(rep)).to_literal(),
            cycle_length=int(basins.cycle_length[rep]),
            basin_size=int(size),
            max_transient=int(deepest[rep]),
        )
        for rep, size in zip(reps, basin_sizes)
    ]
    return SweepReport(
        rule=rule.code,
        mode=mode,
        n=n,
        exhaustive=True,
        configurations=basins.rep.size,
        cycles=cycles,
        max_cycle=int(basins.cycle_length.max()),
        max_transient=int(basins.transient.max()),
    )


def random_states(n: int, sample_size: int, seed: int) -> np.ndarray:
    """Uniform i.i.d. configurations as a (sample_size, n) uint8 array."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=(sample_size, n), dtype=np.uint8)


def sweep_sample(
    rule: RuleLike, mode: UpdateMode, n: int, sample_size: int, seed: int
) -> SweepReport:
    """Attractor outcomes for a seeded sample; basin sizes are unavailable."""
    if sample_size < 1:
        raise ValueError("sample_size must be at least 1")
    if n != mode.n:
        raise SizeMismatch(f"Mode is defined on {mode.n} cells, not {n}")
    rule = as_rule(rule)
    cycles: dict[str, CycleSummary] = {}
    unresolved = 0
    for cells in random_states(n, sample_size, seed):
        cfg = Configuration.from_array(cells)
        try:
            outcome = detect_cycle(cfg, rule, mode)
        except BudgetExceeded as e:
            unresolved += 1
            logger.warning(f"Rule {rule}, n={n}: {cfg} unresolved ({str(e)})")
            continue
        key = outcome.cycle_min_rep.to_literal()
        summary = cycles.get(key)
        if summary is None:
            summary = cycles[key] = CycleSummary(
                cycle_rep=key, cycle_length=outcome.cycle_length, samples=0
            )
        summary.samples = (summary.samples or 0) + 1
        summary.max_transient = max(summary.max_transient, outcome.transient)

    found = sorted(cycles.values(), key=lambda c: (c.cycle_length, c.cycle_rep))
    return SweepReport(
        rule=rule.code,
        mode=mode,
        n=n,
        exhaustive=False,
        configurations=sample_size,
        unresolved=unresolved,
        cycles=found,
        max_cycle=max((c.cycle_length for c in found), default=0),
        max_transient=max((c.max_transient for c in found), default=0),
    )
