"""Known behaviour of ECA rules under the update-mode families."""

from typing import Optional

from app.schemas.mode import Family
from app.schemas.report import Regime

FIXED_POINT_RULES = (0, 4, 8, 12, 72, 76, 78, 128, 132, 136, 140, 200, 204)
CONSTANT_RULES = (5, 13, 28, 29, 32, 36, 51, 77, 160, 232)
LINEAR_RULES = (
    2, 3, 6, 7, 10, 11, 14, 15, 18, 19, 23, 24, 26, 27, 33, 34, 35, 38, 40, 42,
    43, 46, 50, 94, 104, 130, 134, 138, 142, 162, 168, 170, 172,
)
# cycles longer than 1 only under the parallel mode
PARALLEL_ONLY_RULES = (40, 168, 172)

C, L, S = Regime.CONSTANT, Regime.LINEAR, Regime.SUPERPOLYNOMIAL
PAR, SEQ, BIP, BS, BP, LC = Family.PAR, Family.SEQ, Family.BIP, Family.BS, Family.BP, Family.LC

EXPECTED_REGIMES: dict[int, dict[Family, Regime]] = {
    156: {PAR: C, BIP: S, BS: S, BP: S, LC: S},
    178: {PAR: C, BIP: L, SEQ: L, BS: L, BP: S, LC: S},
    184: {PAR: L, SEQ: C, BS: L, BP: S, LC: S},
    152: {PAR: L, SEQ: C, BS: L, BP: S, LC: S},
    56: {PAR: L, BS: L, BP: S, LC: S},
    108: {PAR: C, SEQ: S, BS: S, BP: S, LC: S},
    73: {BIP: S, BS: S, BP: S, LC: S},
    1: {PAR: C, BIP: L, BS: L, BP: S, LC: S},
    9: {PAR: L, BIP: L, BS: L, BP: S, LC: S},
    110: {BP: S, LC: S},
    **{code: {PAR: L, SEQ: C, BIP: C, BS: C, BP: C, LC: C} for code in PARALLEL_ONLY_RULES},
}

# (rule, family) pairs whose regime is unsettled; never classified
OPEN_REGIMES = {(73, PAR)}

ABSOLUTE_WALLS = {156: ("01",), 108: ("001", "100"), 73: ("0110",)}
RELATIVE_WALLS = {178: ("01", "10"), 184: ("0011",), 1: ("010", "000"), 9: ("010",), 110: ("101",)}


def expected_regime(rule: int, family: Family) -> Optional[Regime]:
    if (rule, family) in OPEN_REGIMES:
        return None
    if rule in FIXED_POINT_RULES or rule in CONSTANT_RULES:
        return Regime.CONSTANT
    if rule in EXPECTED_REGIMES:
        return EXPECTED_REGIMES[rule].get(family)
    if rule in LINEAR_RULES:
        return Regime.LINEAR
    return None


def is_open(rule: int, family: Family) -> bool:
    return (rule, family) in OPEN_REGIMES


def parallel_seed(rule: int, n: int) -> Optional[str]:
    """Configuration reaching a length-n cycle under the parallel mode, if one is known."""
    if rule in (168, 184) and n >= 4 and n % 2 == 0:
        return "10" * (n // 2 - 1) + "11"
    if rule in (40, 168) and n >= 3 and n % 2 == 1:
        return "10" * ((n - 1) // 2) + "1"
    if rule == 172 and n >= 3:
        return "1" * (n - 1) + "0"
    return None
