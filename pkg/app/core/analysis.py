"""Walls, cycle-length scaling, regime classification, primorial bound and lcm constructions."""

import math
from itertools import product
from typing import NamedTuple, Optional, Sequence

import numpy as np

from app.core import catalog
from app.core.config import settings
from app.core.dynamics import detect_cycle, get_evolver, sweep_all, trajectory
from app.core.exceptions import (
    BudgetExceeded,
    DoesNotFit,
    InfeasibleConstraint,
    InsufficientData,
    InvalidInput,
    UnsupportedRule,
)
from app.core.harness import run_tasks
from app.core.logger import logger
from app.core.ring import RuleLike, apply_local, as_rule
from app.core.schedule import (
    expand_block_parallel,
    make_bipartite,
    make_parallel,
    make_sequential,
    sample_modes,
)
from app.core.utils import lcm_all, minimal_period, validate_word
from app.schemas.mode import Family, ModeConstraints, UpdateMode
from app.schemas.report import (
    CraftedConfiguration,
    LcmReport,
    Regime,
    ScalingPoint,
    ScalingRecord,
    SweepReport,
)
from app.schemas.ring import Configuration, Rule


def find_absolute_walls(
    rule: RuleLike, k: int, include_homogeneous: bool = False
) -> set[str]:
    """Words whose every cell is fixed by the local rule whatever the outer bits are."""
    rule = as_rule(rule)
    if not 1 <= k <= settings.WALL_MAX_K:
        raise InvalidInput(f"Wall length {k} outside [1, {settings.WALL_MAX_K}]")
    walls = set()
    for word in product((0, 1), repeat=k):
        if not include_homogeneous and len(set(word)) == 1:
            continue
        fixed = True
        for j, bit in enumerate(word):
            lefts = (word[j - 1],) if j > 0 else (0, 1)
            rights = (word[j + 1],) if j < k - 1 else (0, 1)
            if any(apply_local(rule, a, bit, b) != bit for a in lefts for b in rights):
                fixed = False
                break
        if fixed:
            walls.add("".join(str(bit) for bit in word))
    return walls


def verify_relative_wall(
    rule: RuleLike,
    mode: UpdateMode,
    word: str,
    n: int,
    t_max: int,
    position: Optional[int] = None,
) -> bool:
    """Whether the word re-reads its values at every step boundary for every context.

    Checks one embedding when position is given, every rotation otherwise.
    """
    word = validate_word(word)
    k = len(word)
    if n != mode.n:
        raise InvalidInput(f"Mode is defined on {mode.n} cells, not {n}")
    if not k + 1 <= n:
        raise InvalidInput(f"A wall of {k} cells needs a ring of at least {k + 1}")
    if n > settings.EXHAUSTIVE_MAX_CELLS:
        raise BudgetExceeded(
            f"2^{n - k} contexts exceed the exhaustive cap of 2^{settings.EXHAUSTIVE_MAX_CELLS}"
        )
    evolver = get_evolver(as_rule(rule), mode)
    evolver._require_packed()
    positions = range(n) if position is None else [position % n]
    contexts = np.arange(1 << (n - k), dtype=np.uint64)

    for start in positions:
        cells = [(start + j) % n for j in range(k)]
        others = [cell for cell in range(n) if cell not in cells]
        wall_mask = sum(1 << cell for cell in cells)
        wall_value = sum(int(bit) << cell for bit, cell in zip(word, cells))
        states = np.full(contexts.size, wall_value, dtype=np.uint64)
        for j, cell in enumerate(others):
            states |= ((contexts >> j) & 1) << cell
        for _ in range(t_max):
            states = evolver.step_packed(states)
            if np.any((states & wall_mask) != wall_value):
                logger.debug(f"Wall {word} at {start} broken under rule {as_rule(rule)}")
                return False
    return True


def wall_preserving_mode(
    rule: RuleLike, n: int, wall_starts: Sequence[int], word: Optional[str] = None
) -> UpdateMode:
    """Period-2 block-parallel mode keeping a relative wall at each given start.

    Each cell is updated at substep 0 ("first"), at substep 1 ("second") or at both;
    free cells are paired first/second, a leftover cell updates at both.
    """
    code = as_rule(rule).code
    if code not in catalog.RELATIVE_WALLS:
        raise UnsupportedRule(f"No relative wall construction for rule {code}")
    word = word or catalog.RELATIVE_WALLS[code][0]
    if word not in catalog.RELATIVE_WALLS[code]:
        raise UnsupportedRule(f"'{word}' is not a relative wall of rule {code}")
    k = len(word)
    roles: dict[int, str] = {}

    def assign(cell: int, role: str) -> None:
        cell %= n
        if roles.get(cell, role) != role:
            raise DoesNotFit(f"Cell {cell} is claimed by two walls")
        roles[cell] = role

    for start in wall_starts:
        wall = [start + j for j in range(k)]
        left, right = start - 1, start + k
        if code == 178:
            for cell in wall:
                assign(cell, "both")
        elif code == 184:
            assign(wall[0], "both")
            assign(wall[3], "both")
            assign(wall[1], "first")
            assign(wall[2], "first")
            assign(left, "second")
            assign(right, "second")
        elif word == "000":
            assign(wall[1], "both")
            assign(wall[0], "second")
            assign(wall[2], "second")
            assign(left, "first")
            assign(right, "first")
        else:
            assign(wall[1], "both")
            assign(wall[0], "first")
            assign(wall[2], "first")
            assign(left, "second")
            assign(right, "second")

    runs: list[list[int]] = [[]]
    for cell in range(n):
        if cell in roles:
            runs.append([])
        else:
            runs[-1].append(cell)
    for run in runs:
        for i in range(0, len(run) - 1, 2):
            roles[run[i]], roles[run[i + 1]] = "first", "second"
        if len(run) % 2:
            roles[run[-1]] = "both"

    firsts = [cell for cell in range(n) if roles[cell] == "first"]
    seconds = [cell for cell in range(n) if roles[cell] == "second"]
    if not firsts or len(firsts) != len(seconds):
        raise DoesNotFit(f"Walls at {list(wall_starts)} leave no balanced period-2 schedule")
    subsequences = [(cell,) for cell in range(n) if roles[cell] == "both"]
    subsequences += list(zip(firsts, seconds))
    return expand_block_parallel(subsequences)


def modes_for(
    family: Family,
    n: int,
    count: int,
    seed: int,
    constraints: Optional[ModeConstraints] = None,
) -> list[UpdateMode]:
    """PAR and BIP are enumerated, the other families sampled."""
    if family == Family.PAR:
        return [make_parallel(n)]
    if family == Family.BIP:
        return [make_bipartite(n, True), make_bipartite(n, False)]
    if family == Family.EXPLICIT:
        raise InfeasibleConstraint("Explicit modes cannot be sampled")
    return sample_modes(family, n, count, seed, constraints)


def sweep_task(task: tuple[int, UpdateMode]) -> SweepReport:
    rule, mode = task
    return sweep_all(rule, mode)


def scaling_record(
    rule: int,
    family: Family,
    constraints: ModeConstraints,
    reports: Sequence[SweepReport],
) -> ScalingRecord:
    points = []
    for n in sorted({report.n for report in reports}):
        at_n = [report for report in reports if report.n == n]
        points.append(
            ScalingPoint(
                n=n,
                max_cycle=max(report.max_cycle for report in at_n),
                max_transient=max(report.max_transient for report in at_n),
                modes_sampled=len(at_n),
            )
        )
    regime = None
    if not catalog.is_open(rule, family) and len(points) >= 4:
        regime = classify_regime(points)
    return ScalingRecord(
        rule=rule,
        family=family,
        constraint=constraints.describe(),
        points=points,
        regime=regime,
        expected=catalog.expected_regime(rule, family),
    )


def max_cycle_scaling(
    rule: RuleLike,
    family: Family,
    constraints: Optional[ModeConstraints],
    n_range: Sequence[int],
    modes_per_n: int,
    seed: int,
    jobs: Optional[int] = None,
) -> ScalingRecord:
    """Largest exhaustive cycle length per ring size, over the family's modes."""
    rule = as_rule(rule)
    constraints = constraints or ModeConstraints()
    tasks = []
    for n in n_range:
        if family == Family.BIP and n % 2:
            logger.debug(f"Skipping odd n={n} for bipartite modes")
            continue
        tasks += [(rule.code, mode) for mode in modes_for(family, n, modes_per_n, seed, constraints)]
    reports = run_tasks(sweep_task, tasks, jobs=jobs, desc=f"rule {rule} {family.value}")
    return scaling_record(rule.code, family, constraints, reports)


def _as_pairs(points: Sequence[ScalingPoint | tuple[int, int]]) -> list[tuple[int, int]]:
    pairs = []
    for point in points:
        if isinstance(point, ScalingPoint):
            pairs.append((point.n, point.max_cycle))
        else:
            pairs.append((int(point[0]), int(point[1])))
    return sorted(pairs)


def classify_regime(points: Sequence[ScalingPoint | tuple[int, int]]) -> Regime:
    """Constant, linear or superpolynomial growth of max cycle length with n.

    constant: every point at most max(floor, value at the smallest n)
    superpolynomial: log2(c) >= factor * sqrt(n log2 n) at the largest n, or a
        log-log slope above REGIME_SUPERPOLY_SLOPE; the slope stands in for a
        nondecreasing log2(c) / sqrt(n log2 n), which wobbles at small exhaustive n
        (156 BIP, n = 8..16: 0.57, 0.68, 0.67, 0.70, 0.69)
    linear: log-log slope within the linear slope band and every c/n within the ratio band

    Both slopes are configuration (REGIME_SUPERPOLY_SLOPE, REGIME_LINEAR_SLOPE).
    """
    pairs = _as_pairs(points)
    if len(pairs) < 4:
        raise InsufficientData(f"Need at least 4 points to classify, got {len(pairs)}")
    sizes = np.array([n for n, _ in pairs], dtype=np.float64)
    cycles = np.maximum(np.array([c for _, c in pairs], dtype=np.float64), 1.0)

    if cycles.max() <= max(settings.REGIME_CONSTANT_FLOOR, cycles[0]):
        return Regime.CONSTANT

    slope = float(np.polyfit(np.log(sizes), np.log(cycles), 1)[0])
    n_last, c_last = sizes[-1], cycles[-1]
    threshold = settings.REGIME_SUPERPOLY_FACTOR * math.sqrt(n_last * math.log2(n_last))
    if slope > settings.REGIME_SUPERPOLY_SLOPE or math.log2(c_last) >= threshold:
        return Regime.SUPERPOLYNOMIAL

    slope_low, slope_high = settings.linear_slope
    band_low, band_high = settings.linear_band
    ratios = cycles / sizes
    if slope_low <= slope <= slope_high and np.all((ratios >= band_low) & (ratios <= band_high)):
        return Regime.LINEAR
    return Regime.UNKNOWN


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


def primorial(n: int) -> int:
    """h(n): maximal product of distinct primes whose sum is at most n."""
    if n < 0:
        raise InvalidInput("primorial is defined for n >= 0")
    best = [1] * (n + 1)
    for p in primes_upto(n).tolist():
        for total in range(n, p - 1, -1):
            candidate = best[total - p] * p
            if candidate > best[total]:
                best[total] = candidate
    return best[n]


def primorial_log2_table(n_max: int) -> np.ndarray:
    """log2 h(n) for every n in [0, n_max]."""
    logs = np.zeros(n_max + 1)
    for p in primes_upto(n_max).tolist():
        shifted = logs[:-p] + math.log2(p)
        np.maximum(logs[p:], shifted, out=logs[p:])
    return logs


def primorial_growth(n_values: Sequence[int]) -> np.ndarray:
    """log2 h(n) / sqrt(n log2 n)"""
    sizes = np.asarray(n_values, dtype=np.int64)
    if sizes.size == 0:
        return np.array([])
    if sizes.min() < 2:
        raise InvalidInput("Growth ratio needs n >= 2")
    logs = primorial_log2_table(int(sizes.max()))[sizes]
    return logs / np.sqrt(sizes * np.log2(sizes))


class _Unit(NamedTuple):
    text: str
    walls: list[tuple[int, int]]
    segment: Optional[tuple[int, int]]


LCM_RULES = (156, 73, 108, 178, 184, 1, 9, 110)
MIN_SEGMENT = {156: 1, 73: 2, 108: 1, 178: 1, 184: 2, 1: 2, 9: 2, 110: 2}


def _unit(code: int, k: int) -> _Unit:
    """Wall plus a segment of k cells seeded to run its longest cycle."""
    if code == 156:
        return _Unit("01" + "0" * k, [(0, 2)], (2, k))
    if code == 73:
        return _Unit("0110" + "0" * (k - 2) + "01", [(0, 4)], (4, k))
    if code == 108:
        fill = "1" * k if k % 2 == 0 else "1" * (k - 1) + "0"
        return _Unit("001" + fill + "100", [(0, 3), (3 + k, 3)], (3, k))
    if code == 178:
        return _Unit("01" + "0" * k, [(0, 2)], (2, k))
    if code == 184:
        return _Unit("0011" + "1" + "0" * (k - 1), [(0, 4)], (4, k))
    if code in (1, 9):
        return _Unit("010" + "1" + "0" * (k - 1), [(0, 3)], (3, k))
    return _Unit("101" + "0" + "1" * (k - 1), [(0, 3)], (3, k))


_PADDING = {156: _Unit("01", [(0, 2)], None), 73: _Unit("0110", [(0, 4)], None),
            108: _Unit("001100", [(0, 3), (3, 3)], None)}


def tight_ring_size(rule: RuleLike, segment_lengths: Sequence[int]) -> int:
    """Smallest ring holding the crafted segments without padding."""
    code = as_rule(rule).code
    if code not in LCM_RULES:
        raise UnsupportedRule(f"No wall construction for rule {code}")
    return sum(len(_unit(code, k).text) for k in segment_lengths)


def craft_lcm_config(
    rule: RuleLike, n: int, segment_lengths: Sequence[int]
) -> CraftedConfiguration:
    """Wall-separated segments whose individual cycles combine into their lcm."""
    code = as_rule(rule).code
    if code not in LCM_RULES:
        raise UnsupportedRule(f"No wall construction for rule {code}")
    if not segment_lengths:
        raise DoesNotFit("At least one segment is needed")
    short = [k for k in segment_lengths if k < MIN_SEGMENT[code]]
    if short:
        raise DoesNotFit(f"Rule {code} segments need at least {MIN_SEGMENT[code]} cells, got {short}")

    units = [_unit(code, k) for k in segment_lengths]
    remainder = n - sum(len(unit.text) for unit in units)
    if remainder < 0:
        raise DoesNotFit(f"Segments {list(segment_lengths)} need more than {n} cells")
    if remainder:
        pad = _PADDING.get(code)
        if pad is None or remainder % len(pad.text):
            raise DoesNotFit(
                f"Segments {list(segment_lengths)} leave {remainder} cells that cannot be filled"
            )
        units += [pad] * (remainder // len(pad.text))

    text, walls, segments = "", [], []
    for unit in units:
        walls += [(len(text) + offset, length) for offset, length in unit.walls]
        if unit.segment is not None:
            segments.append((len(text) + unit.segment[0], unit.segment[1]))
        text += unit.text

    if code in (156, 73):
        if n % 2:
            raise DoesNotFit(f"Bipartite construction needs an even ring, got n={n}")
        mode = make_bipartite(n, True)
    elif code == 108:
        mode = make_sequential(range(n))
    else:
        mode = wall_preserving_mode(code, n, [start for start, _ in walls])

    return CraftedConfiguration(
        rule=code,
        configuration=Configuration.from_literal(text),
        mode=mode,
        segments=segments,
        walls=walls,
    )


def lcm_report(crafted: CraftedConfiguration) -> LcmReport:
    """Global cycle of a crafted configuration against the cycles of its segments."""
    rule = Rule(code=crafted.rule)
    cfg = crafted.configuration
    outcome = detect_cycle(cfg, rule, crafted.mode)
    steps = trajectory(cfg, rule, crafted.mode, outcome.transient + outcome.cycle_length).steps
    orbit = steps[outcome.transient :][: outcome.cycle_length]
    n = cfg.n

    segment_cycles = []
    for start, length in crafted.segments:
        cells = [(start + j) % n for j in range(length)]
        projected = [tuple(state.bits[cell] for cell in cells) for state in orbit]
        segment_cycles.append(minimal_period(projected))

    wall_cells = [(start + j) % n for start, length in crafted.walls for j in range(length)]
    preserved = all(
        state.bits[cell] == cfg.bits[cell] for state in steps for cell in wall_cells
    )
    return LcmReport(
        rule=crafted.rule,
        n=n,
        transient=outcome.transient,
        cycle_length=outcome.cycle_length,
        segment_cycles=segment_cycles,
        lcm=lcm_all(segment_cycles),
        walls_preserved=preserved,
    )
