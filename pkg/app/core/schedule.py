"""Construction, expansion, sampling and text form of periodic update modes."""

from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.exceptions import (
    InfeasibleConstraint,
    InvalidInput,
    NotAPartition,
    OddRingSize,
    ParseError,
    PeriodOverflow,
    ShiftOutOfRange,
    SizeMismatch,
)
from app.core.logger import logger
from app.core.utils import derive_seed, lcm_all
from app.schemas.mode import (
    BipartiteParams,
    Block,
    BlockParallelParams,
    BlockSequentialParams,
    ExplicitParams,
    Family,
    LocalClocksParams,
    ModeConstraints,
    ParallelParams,
    SequentialParams,
    UpdateMode,
)

SURJECTION_ATTEMPTS = 1000
RESAMPLE_ATTEMPTS = 100


def _check_partition(parts: Sequence[Sequence[int]], what: str) -> int:
    """Parts must be nonempty, disjoint and cover 0..n-1; returns n."""
    seen: set[int] = set()
    for index, part in enumerate(parts):
        if not part:
            raise NotAPartition(f"{what} {index} is empty")
        for cell in part:
            if cell in seen:
                raise NotAPartition(f"Cell {cell} appears more than once")
            if cell < 0:
                raise NotAPartition(f"Negative cell index {cell}")
            seen.add(cell)
    n = len(seen)
    if n == 0:
        raise NotAPartition(f"No {what.lower()}s given")
    gaps = set(range(n)) - seen
    if gaps:
        raise NotAPartition(f"Cells {sorted(gaps)} are not covered")
    return n


def _check_period(period: int) -> None:
    if period > settings.PERIOD_CAP:
        raise PeriodOverflow(
            f"Period {period} exceeds the cap of {settings.PERIOD_CAP} substeps"
        )


def make_parallel(n: int) -> UpdateMode:
    if n < 1:
        raise InvalidInput("A ring needs at least one cell")
    return UpdateMode(
        family=Family.PAR, n=n, raw=ParallelParams(), blocks=(tuple(range(n)),)
    )


def make_bipartite(n: int, even_first: bool = True) -> UpdateMode:
    if n % 2:
        raise OddRingSize(f"Bipartite modes need an even ring, got n={n}")
    evens, odds = tuple(range(0, n, 2)), tuple(range(1, n, 2))
    return UpdateMode(
        family=Family.BIP,
        n=n,
        raw=BipartiteParams(even_first=even_first),
        blocks=(evens, odds) if even_first else (odds, evens),
    )


def make_sequential(order: Iterable[int]) -> UpdateMode:
    order = tuple(int(cell) for cell in order)
    n = _check_partition([(cell,) for cell in order], "Position")
    return UpdateMode(
        family=Family.SEQ,
        n=n,
        raw=SequentialParams(order=order),
        blocks=tuple((cell,) for cell in order),
    )


def make_block_sequential(ordered_blocks: Iterable[Iterable[int]]) -> UpdateMode:
    """Blocks in series, cells inside a block in parallel."""
    parts = tuple(tuple(int(cell) for cell in block) for block in ordered_blocks)
    n = _check_partition(parts, "Block")
    return UpdateMode(
        family=Family.BS,
        n=n,
        raw=BlockSequentialParams(ordered_blocks=parts),
        blocks=tuple(tuple(sorted(block)) for block in parts),
    )


def expand_block_parallel(subsequences: Iterable[Iterable[int]]) -> UpdateMode:
    """B_l holds, from every subsequence S_j, its element at index l mod |S_j|."""
    parts = tuple(tuple(int(cell) for cell in sequence) for sequence in subsequences)
    n = _check_partition(parts, "Subsequence")
    period = lcm_all(len(part) for part in parts)
    _check_period(period)
    blocks = tuple(
        tuple(sorted(part[step % len(part)] for part in parts)) for step in range(period)
    )
    return UpdateMode(
        family=Family.BP,
        n=n,
        raw=BlockParallelParams(subsequences=parts),
        blocks=blocks,
    )


def expand_local_clocks(periods: Sequence[int], shifts: Sequence[int]) -> UpdateMode:
    """Cell i updates at every t with t = shifts[i] (mod periods[i])."""
    periods, shifts = tuple(int(p) for p in periods), tuple(int(d) for d in shifts)
    if len(periods) != len(shifts):
        raise SizeMismatch(f"{len(periods)} periods but {len(shifts)} shifts")
    if not periods:
        raise InvalidInput("Local clocks need at least one cell")
    for cell, (period, shift) in enumerate(zip(periods, shifts)):
        if period < 1:
            raise InvalidInput(f"Cell {cell} has period {period} < 1")
        if not 0 <= shift < period:
            raise ShiftOutOfRange(
                f"Cell {cell} has shift {shift} outside [0, {period})"
            )
    period = lcm_all(periods)
    _check_period(period)
    blocks = tuple(
        tuple(cell for cell, (p, d) in enumerate(zip(periods, shifts)) if step % p == d)
        for step in range(period)
    )
    return UpdateMode(
        family=Family.LC,
        n=len(periods),
        raw=LocalClocksParams(periods=periods, shifts=shifts),
        blocks=blocks,
    )


def make_explicit(n: int, blocks: Iterable[Iterable[int]]) -> UpdateMode:
    normalized = tuple(tuple(sorted(set(int(cell) for cell in block))) for block in blocks)
    if not normalized:
        raise InvalidInput("An explicit mode needs at least one block")
    _check_period(len(normalized))
    covered = {cell for block in normalized for cell in block}
    if any(not 0 <= cell < n for cell in covered):
        raise NotAPartition(f"Explicit blocks reference cells outside 0..{n - 1}")
    if len(covered) != n:
        raise NotAPartition(
            f"Cells {sorted(set(range(n)) - covered)} are never updated within a period"
        )
    return UpdateMode(
        family=Family.EXPLICIT,
        n=n,
        raw=ExplicitParams(blocks=normalized),
        blocks=normalized,
    )


@lru_cache(maxsize=512)
def _block_sets(mode: UpdateMode) -> tuple[frozenset[int], ...]:
    return tuple(frozenset(block) for block in mode.blocks)


def membership(mode: UpdateMode, cell: int, t: int) -> bool:
    """Whether cell belongs to mu*(t), read from the normalized block sequence."""
    return cell in _block_sets(mode)[t % mode.period]


def direct_membership(mode: UpdateMode, cell: int, t: int) -> bool:
    """Same predicate evaluated from the raw family parameters."""
    raw = mode.raw
    if isinstance(raw, ParallelParams):
        return True
    if isinstance(raw, BipartiteParams):
        return cell % 2 == (t % 2 if raw.even_first else 1 - t % 2)
    if isinstance(raw, SequentialParams):
        return raw.order[t % len(raw.order)] == cell
    if isinstance(raw, BlockSequentialParams):
        return cell in raw.ordered_blocks[t % len(raw.ordered_blocks)]
    if isinstance(raw, BlockParallelParams):
        return any(
            cell in sequence and sequence.index(cell) == t % len(sequence)
            for sequence in raw.subsequences
        )
    if isinstance(raw, LocalClocksParams):
        return t % raw.periods[cell] == raw.shifts[cell]
    return cell in raw.blocks[t % len(raw.blocks)]


def is_parallel_equivalent(mode: UpdateMode) -> bool:
    """Every nonempty block is the whole ring, so a step is one synchronous update."""
    return sum(1 for block in mode.blocks if block) == 1 and all(
        len(block) in (0, mode.n) for block in mode.blocks
    )


def phase_of(mode: UpdateMode) -> Optional[tuple[int, ...]]:
    """Substep of each cell when every cell occurs exactly once per period."""
    phases: list[Optional[int]] = [None] * mode.n
    for step, block in enumerate(mode.blocks):
        for cell in block:
            if phases[cell] is not None:
                return None
            phases[cell] = step
    if any(phase is None for phase in phases):
        return None
    return tuple(phase for phase in phases if phase is not None)


def as_local_clocks(mode: UpdateMode) -> Optional[UpdateMode]:
    phases = phase_of(mode)
    if phases is None:
        return None
    return expand_local_clocks((mode.period,) * mode.n, phases)


def _random_surjection(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    for _ in range(SURJECTION_ATTEMPTS):
        labels = rng.integers(0, k, size=n)
        if np.unique(labels).size == k:
            return labels
    # k close to n: seed every block with one cell, spread the rest uniformly
    labels = rng.integers(0, k, size=n)
    labels[rng.permutation(n)[:k]] = np.arange(k)
    return labels


def sample_mode(
    family: Family,
    n: int,
    seed: int,
    constraints: Optional[ModeConstraints] = None,
) -> UpdateMode:
    """Random mode of a family; a pure function of its arguments."""
    constraints = constraints or ModeConstraints()
    rng = np.random.default_rng(seed)

    if family == Family.PAR:
        return make_parallel(n)

    if family == Family.BIP:
        even_first = constraints.even_first
        if even_first is None:
            even_first = bool(rng.integers(2))
        return make_bipartite(n, even_first)

    if family == Family.SEQ:
        return make_sequential(rng.permutation(n).tolist())

    if family == Family.BS:
        k = constraints.blocks or int(rng.integers(1, n + 1))
        if k > n:
            raise InfeasibleConstraint(f"Cannot split {n} cells into {k} nonempty blocks")
        labels = _random_surjection(rng, n, k)
        return make_block_sequential(
            np.flatnonzero(labels == label).tolist() for label in range(k)
        )

    if family == Family.BP:
        sizes = [
            size
            for size in constraints.part_sizes
            if constraints.max_period is None or size <= constraints.max_period
        ]
        if not sizes or min(sizes) < 1:
            raise InfeasibleConstraint("No admissible subsequence size")
        for _ in range(RESAMPLE_ATTEMPTS):
            cells = rng.permutation(n).tolist()
            parts = []
            while cells:
                fitting = [size for size in sizes if size <= len(cells)]
                if not fitting:
                    break
                size = int(rng.choice(fitting))
                parts.append(cells[:size])
                cells = cells[size:]
            if cells:
                continue
            if lcm_all(len(part) for part in parts) <= settings.BP_LCM_CAP:
                return expand_block_parallel(parts)
        raise InfeasibleConstraint(
            f"No block-parallel mode of {n} cells with subsequence sizes {sizes} "
            f"within lcm cap {settings.BP_LCM_CAP}"
        )

    if family == Family.LC:
        max_period = constraints.max_period or 4
        if lcm_all(range(1, max_period + 1)) > settings.PERIOD_CAP:
            logger.debug(f"Local clocks up to {max_period} may exceed the period cap")
        for _ in range(RESAMPLE_ATTEMPTS):
            periods = rng.integers(1, max_period + 1, size=n)
            if max_period not in periods:
                periods[int(rng.integers(n))] = max_period
            shifts = [int(rng.integers(p)) for p in periods]
            if lcm_all(int(p) for p in periods) <= settings.PERIOD_CAP:
                return expand_local_clocks(periods.tolist(), shifts)
        raise InfeasibleConstraint(
            f"No local clocks mode within period cap {settings.PERIOD_CAP}"
        )

    raise InfeasibleConstraint(f"Family '{family.value}' cannot be sampled")


def sample_modes(
    family: Family,
    n: int,
    count: int,
    master_seed: int,
    constraints: Optional[ModeConstraints] = None,
) -> list[UpdateMode]:
    """The modes used by a run depend on (master seed, family, n, index) only."""
    key = list(Family).index(family)
    return [
        sample_mode(family, n, derive_seed(master_seed, key, n, index), constraints)
        for index in range(count)
    ]


class _Scanner:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, token: str) -> None:
        self.skip()
        if not self.text.startswith(token, self.pos):
            found = self.text[self.pos : self.pos + len(token)] or "end of input"
            raise ParseError(f"Expected '{token}', found '{found}'", self.pos, self.text)
        self.pos += len(token)

    def accept(self, token: str) -> bool:
        self.skip()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def word(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        if start == self.pos:
            raise ParseError("Expected a word", start, self.text)
        return self.text[start : self.pos].lower()

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("Expected an integer", start, self.text)
        return int(self.text[start : self.pos])

    def group(self, opening: str, closing: str, allow_empty: bool = False) -> Block:
        self.expect(opening)
        values: list[int] = []
        if self.accept(closing):
            if not allow_empty:
                raise ParseError(f"Empty '{opening}{closing}' group", self.pos - 1, self.text)
            return ()
        values.append(self.integer())
        while self.accept(","):
            values.append(self.integer())
        self.expect(closing)
        return tuple(values)

    def groups(
        self, outer: tuple[str, str], inner: tuple[str, str], allow_empty: bool = False
    ) -> tuple[Block, ...]:
        self.expect(outer[0])
        items = [self.group(*inner, allow_empty=allow_empty)]
        while self.accept(","):
            items.append(self.group(*inner, allow_empty=allow_empty))
        self.expect(outer[1])
        return tuple(items)

    def finish(self) -> None:
        self.skip()
        if self.pos != len(self.text):
            raise ParseError("Unexpected trailing input", self.pos, self.text)


def load_mode(text: str) -> UpdateMode:
    """Parse one mode written as par:, bip:, seq:, bs:, bp:, lc: or explicit:."""
    scanner = _Scanner(text)
    start = scanner.pos
    family_name = scanner.word()
    try:
        family = Family(family_name)
    except ValueError:
        raise ParseError(f"Unknown family '{family_name}'", start, text) from None
    scanner.expect(":")
    body_start = scanner.pos

    try:
        if family == Family.PAR:
            scanner.expect("n=")
            n = scanner.integer()
            scanner.finish()
            return make_parallel(n)
        if family == Family.BIP:
            scanner.expect("n=")
            n = scanner.integer()
            even_first = True
            if scanner.accept(","):
                scanner.expect("first=")
                position = scanner.pos
                choice = scanner.word()
                if choice not in ("even", "odd"):
                    raise ParseError(f"Expected 'even' or 'odd', found '{choice}'", position, text)
                even_first = choice == "even"
            scanner.finish()
            return make_bipartite(n, even_first)
        if family == Family.SEQ:
            order = scanner.group("(", ")")
            scanner.finish()
            return make_sequential(order)
        if family == Family.BS:
            blocks = scanner.groups(("(", ")"), ("{", "}"))
            scanner.finish()
            return make_block_sequential(blocks)
        if family == Family.BP:
            subsequences = scanner.groups(("{", "}"), ("(", ")"))
            scanner.finish()
            return expand_block_parallel(subsequences)
        if family == Family.LC:
            scanner.expect("P=")
            periods = scanner.group("(", ")")
            scanner.expect(";")
            scanner.expect("D=")
            shifts = scanner.group("(", ")")
            scanner.finish()
            return expand_local_clocks(periods, shifts)
        scanner.expect("n=")
        n = scanner.integer()
        scanner.expect(";")
        blocks = scanner.groups(("(", ")"), ("{", "}"), allow_empty=True)
        scanner.finish()
        return make_explicit(n, blocks)
    except ParseError:
        raise
    except ValueError as e:
        # semantic errors keep their own type; pydantic errors become parse errors
        if isinstance(e, InvalidInput):
            raise
        raise ParseError(f"Invalid {family.value} mode: {str(e)}", body_start, text) from e


def _join(values: Iterable[int]) -> str:
    return ",".join(str(value) for value in values)


def save_mode(mode: UpdateMode) -> str:
    raw = mode.raw
    if isinstance(raw, ParallelParams):
        return f"par:n={mode.n}"
    if isinstance(raw, BipartiteParams):
        return f"bip:n={mode.n},first={'even' if raw.even_first else 'odd'}"
    if isinstance(raw, SequentialParams):
        return f"seq:({_join(raw.order)})"
    if isinstance(raw, BlockSequentialParams):
        blocks = ",".join("{" + _join(sorted(block)) + "}" for block in raw.ordered_blocks)
        return f"bs:({blocks})"
    if isinstance(raw, BlockParallelParams):
        ordered = sorted(raw.subsequences, key=lambda sequence: sequence[0])
        return "bp:{" + ",".join(f"({_join(sequence)})" for sequence in ordered) + "}"
    if isinstance(raw, LocalClocksParams):
        return f"lc:P=({_join(raw.periods)});D=({_join(raw.shifts)})"
    blocks = ",".join("{" + _join(block) + "}" for block in raw.blocks)
    return f"explicit:n={mode.n};({blocks})"


def load_mode_file(path: Path | str) -> list[UpdateMode]:
    modes = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            modes.append(load_mode(line))
    return modes


def save_mode_file(path: Path | str, modes: Iterable[UpdateMode]) -> Path:
    path = Path(path)
    path.write_text("".join(f"{save_mode(mode)}\n" for mode in modes), encoding="utf-8")
    return path
