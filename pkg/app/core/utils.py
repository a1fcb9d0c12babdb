import math
import re
from typing import Any, Iterable, Sequence

import numpy as np

RANGE_PATTERN = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*(?::\s*(\d+))?\s*$")


def lcm_all(values: Iterable[int]) -> int:
    return math.lcm(*values)


def parse_int_list(text: str) -> list[int]:
    """Parse '4..14', '4..14:2' or '4,6,8' (mixed forms allowed) into sorted ints."""
    values: set[int] = set()
    for part in text.split(","):
        if not part.strip():
            continue
        match = RANGE_PATTERN.match(part)
        if match:
            start, stop, stride = match.groups()
            values.update(range(int(start), int(stop) + 1, int(stride or 1)))
        elif part.strip().isdigit():
            values.add(int(part))
        else:
            raise ValueError(f"Invalid integer list element '{part.strip()}'")
    if not values:
        raise ValueError("Empty integer list")
    return sorted(values)


def validate_word(word: str) -> str:
    word = word.strip()
    if not word or set(word) - {"0", "1"}:
        raise ValueError(f"Invalid Boolean word '{word}', expected only '0' and '1'")
    return word


def minimal_period(sequence: Sequence[Any]) -> int:
    """Smallest d dividing len(sequence) such that the cyclic sequence repeats every d."""
    length = len(sequence)
    for d in range(1, length + 1):
        if length % d == 0 and all(
            sequence[i] == sequence[(i + d) % length] for i in range(length)
        ):
            return d
    return length


def derive_seed(master: int, *keys: int) -> int:
    """Counter-based split of a master seed: SeedSequence(master, spawn_key=keys)."""
    sequence = np.random.SeedSequence(master, spawn_key=tuple(keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
