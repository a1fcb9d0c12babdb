"""Ring configurations, ECA local rules and their symmetries."""

from functools import lru_cache

from app.core.config import settings
from app.core.exceptions import PackedWidthExceeded
from app.schemas.ring import Configuration, Rule

RuleLike = Rule | int


def as_rule(rule: RuleLike) -> Rule:
    return rule if isinstance(rule, Rule) else Rule(code=rule)


def apply_local(rule: RuleLike, left: int, center: int, right: int) -> int:
    return (as_rule(rule).code >> (4 * left + 2 * center + right)) & 1


def neighborhood(cfg: Configuration, i: int) -> tuple[int, int, int]:
    if not 0 <= i < cfg.n:
        raise IndexError(f"Cell {i} out of range for a ring of {cfg.n} cells")
    bits = cfg.bits
    return bits[(i - 1) % cfg.n], bits[i], bits[(i + 1) % cfg.n]


def _from_table(table: list[int]) -> Rule:
    return Rule(code=sum(bit << index for index, bit in enumerate(table)))


def reflect(rule: RuleLike) -> Rule:
    """f'(a,b,c) = f(c,b,a)"""
    rule = as_rule(rule)
    return _from_table(
        [apply_local(rule, index & 1, (index >> 1) & 1, index >> 2) for index in range(8)]
    )


def complement(rule: RuleLike) -> Rule:
    """f'(a,b,c) = not f(not a, not b, not c)"""
    rule = as_rule(rule)
    return _from_table([1 - ((rule.code >> (7 - index)) & 1) for index in range(8)])


def orbit(rule: RuleLike) -> set[int]:
    rule = as_rule(rule)
    return {
        rule.code,
        reflect(rule).code,
        complement(rule).code,
        complement(reflect(rule)).code,
    }


def class_rep(rule: RuleLike) -> Rule:
    return Rule(code=min(orbit(rule)))


@lru_cache(maxsize=1)
def all_class_representatives() -> tuple[int, ...]:
    return tuple(sorted({class_rep(code).code for code in range(256)}))


def pack(cfg: Configuration) -> int:
    """Cell 0 is the least significant bit."""
    if cfg.n > settings.PACKED_WIDTH:
        raise PackedWidthExceeded(
            f"Ring of {cfg.n} cells exceeds the packed width {settings.PACKED_WIDTH}"
        )
    return sum(bit << index for index, bit in enumerate(cfg.bits))


def unpack(n: int, value: int) -> Configuration:
    if n > settings.PACKED_WIDTH:
        raise PackedWidthExceeded(
            f"Ring of {n} cells exceeds the packed width {settings.PACKED_WIDTH}"
        )
    if not 0 <= value < (1 << n):
        raise ValueError(f"Packed value {value} out of range for {n} cells")
    return Configuration(bits=tuple((value >> index) & 1 for index in range(n)))
