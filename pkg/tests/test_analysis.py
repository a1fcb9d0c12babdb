import math
from itertools import product

import pytest
from hypothesis import given, strategies as st

from app.core import catalog
from app.core.analysis import (
    classify_regime,
    craft_lcm_config,
    find_absolute_walls,
    lcm_report,
    max_cycle_scaling,
    primorial,
    primorial_growth,
    primorial_log2_table,
    tight_ring_size,
    verify_relative_wall,
    wall_preserving_mode,
)
from app.core.dynamics import detect_cycle, trajectory
from app.core.exceptions import (
    DoesNotFit,
    InsufficientData,
    InvalidInput,
    UnsupportedRule,
)
from app.core.schedule import make_parallel, sample_mode
from app.schemas.mode import Family
from app.schemas.report import Regime
from app.schemas.ring import Configuration
from tests.strategies import SAMPLED


def test_absolute_walls():
    for rule, words in catalog.ABSOLUTE_WALLS.items():
        assert find_absolute_walls(rule, len(words[0])) == set(words)
    for k in range(1, 5):
        assert find_absolute_walls(1, k) == set()
        assert find_absolute_walls(178, k) == set()
    assert "00" in find_absolute_walls(0, 2, include_homogeneous=True)
    with pytest.raises(InvalidInput):
        find_absolute_walls(156, 0)
    with pytest.raises(InvalidInput):
        find_absolute_walls(156, 5)


@given(st.sampled_from(SAMPLED), st.integers(0, 2**32 - 1), st.lists(st.integers(0, 1), min_size=6, max_size=6))
def test_absolute_wall_survives_any_schedule(family, seed, rest):
    mode = sample_mode(family, 8, seed)
    cfg = Configuration(bits=(0, 1, *rest))
    for state in trajectory(cfg, 156, mode, 6).steps:
        assert state.bits[:2] == (0, 1)


@pytest.mark.parametrize("rule, word", [
    (rule, word) for rule, words in catalog.RELATIVE_WALLS.items() for word in words
])
def test_relative_walls_hold_under_their_schedule(rule, word):
    n = len(word) + 6
    mode = wall_preserving_mode(rule, n, [0], word)
    assert mode.period == 2
    assert verify_relative_wall(rule, mode, word, n, 12, position=0)


def test_relative_wall_breaks_under_parallel():
    assert not verify_relative_wall(184, make_parallel(10), "0011", 10, 4)


def test_wall_preserving_mode_errors():
    with pytest.raises(UnsupportedRule):
        wall_preserving_mode(156, 10, [0])
    with pytest.raises(UnsupportedRule):
        wall_preserving_mode(184, 10, [0], "0110")
    with pytest.raises(DoesNotFit):
        wall_preserving_mode(184, 12, [0, 1])


def test_verify_relative_wall_arguments():
    mode = wall_preserving_mode(184, 10, [0])
    with pytest.raises(InvalidInput):
        verify_relative_wall(184, mode, "0011", 12, 4)
    with pytest.raises(ValueError):
        verify_relative_wall(184, mode, "0021", 10, 4)


def test_classify_regime():
    assert classify_regime([(4, 1), (6, 2), (8, 2), (10, 2)]) == Regime.CONSTANT
    assert classify_regime([(8, 8), (10, 10), (12, 12), (14, 14)]) == Regime.LINEAR
    assert classify_regime([(8, 7), (10, 15), (12, 21), (14, 35), (16, 45)]) == Regime.SUPERPOLYNOMIAL
    assert classify_regime([(10, 100), (20, 200), (30, 300), (40, 400)]) == Regime.UNKNOWN
    with pytest.raises(InsufficientData):
        classify_regime([(4, 1), (6, 1), (8, 1)])


def test_primorial_values():
    assert [primorial(n) for n in (0, 1, 2, 5, 10, 12, 17)] == [1, 1, 2, 6, 30, 42, 210]
    with pytest.raises(InvalidInput):
        primorial(-1)


def test_primorial_matches_brute_force():
    primes = [p for p in range(2, 61) if all(p % d for d in range(2, p))]
    best = [1] * 61
    for picks in product((False, True), repeat=len(primes)):
        chosen = [p for p, pick in zip(primes, picks) if pick]
        total = sum(chosen)
        if total <= 60:
            best[total] = max(best[total], math.prod(chosen))
    for n in range(1, 61):
        best[n] = max(best[n], best[n - 1])
    assert [primorial(n) for n in range(61)] == best


def test_primorial_table_matches_exact_values():
    table = primorial_log2_table(60)
    for n in range(61):
        assert table[n] == pytest.approx(math.log2(primorial(n)))


def test_primorial_growth():
    assert primorial_growth([100])[0] == pytest.approx(1.076, abs=0.01)
    with pytest.raises(InvalidInput):
        primorial_growth([1])


def test_primorial_growth_stays_in_band():
    ratios = primorial_growth(range(100, 10001))
    assert 0.6 <= ratios.min() and ratios.max() <= 1.3


def test_catalog():
    assert catalog.expected_regime(73, Family.PAR) is None
    assert catalog.expected_regime(0, Family.SEQ) == Regime.CONSTANT
    assert catalog.expected_regime(156, Family.BIP) == Regime.SUPERPOLYNOMIAL
    assert catalog.parallel_seed(168, 8) == "10101011"
    assert catalog.parallel_seed(172, 5) == "11110"
    assert catalog.parallel_seed(40, 8) is None
    assert catalog.parallel_seed(40, 5) == "10101"
    assert catalog.parallel_seed(168, 7) == "1010101"
    assert catalog.expected_regime(170, Family.BS) == Regime.LINEAR
    assert catalog.expected_regime(56, Family.SEQ) is None
    assert catalog.expected_regime(44, Family.PAR) is None


@pytest.mark.parametrize("rule, n", [
    *[(40, n) for n in (3, 5, 7, 9, 11)],
    *[(168, n) for n in range(3, 12)],
    *[(184, n) for n in (4, 6, 8, 10)],
    *[(172, n) for n in range(3, 11)],
])
def test_parallel_seeds_reach_cycles_of_length_n(rule, n):
    cfg = Configuration.from_literal(catalog.parallel_seed(rule, n))
    assert detect_cycle(cfg, rule, make_parallel(n)).cycle_length == n


def test_rule_156_lcm_law():
    report = lcm_report(craft_lcm_config(156, 12, [3, 5]))
    assert report.segment_cycles == [4, 6]
    assert report.cycle_length == report.lcm == 12
    assert report.walls_preserved


@pytest.mark.parametrize("k", range(1, 9))
def test_rule_156_segment_of_k(k):
    segments = [k] if k % 2 == 0 else [k, 1]
    n = k + 2 if k % 2 == 0 else k + 5
    report = lcm_report(craft_lcm_config(156, n, segments))
    assert report.segment_cycles[0] == k + 1
    assert report.cycle_length == report.lcm


@pytest.mark.parametrize("k, cycle", [(2, 3), (3, 3), (4, 5), (5, 8)])
def test_rule_108_sequential_segments(k, cycle):
    report = lcm_report(craft_lcm_config(108, k + 6, [k]))
    assert report.cycle_length == cycle
    assert report.walls_preserved


@pytest.mark.parametrize("rule, segments", [(73, [2]), (73, [2, 4]), (178, [2, 3])])
def test_lcm_law(rule, segments):
    crafted = craft_lcm_config(rule, tight_ring_size(rule, segments), segments)
    report = lcm_report(crafted)
    assert report.walls_preserved
    assert report.cycle_length == report.lcm


def test_craft_errors():
    with pytest.raises(UnsupportedRule):
        craft_lcm_config(30, 10, [3])
    with pytest.raises(DoesNotFit):
        craft_lcm_config(73, 10, [1])
    with pytest.raises(DoesNotFit):
        craft_lcm_config(156, 4, [3])
    with pytest.raises(DoesNotFit):
        craft_lcm_config(156, 5, [3])
    with pytest.raises(DoesNotFit):
        craft_lcm_config(156, 8, [3])


def test_padding_keeps_the_segment_cycle():
    report = lcm_report(craft_lcm_config(156, 10, [4]))
    assert report.segment_cycles == [5]
    assert report.cycle_length == 5


def test_max_cycle_scaling_156():
    record = max_cycle_scaling(156, Family.PAR, None, range(4, 11), 1, seed=0)
    assert record.regime == Regime.CONSTANT
    assert all(point.max_cycle <= 2 for point in record.points)

    record = max_cycle_scaling(156, Family.BIP, None, range(8, 17), 1, seed=0)
    assert [point.n for point in record.points] == [8, 10, 12, 14, 16]
    assert record.regime == record.expected == Regime.SUPERPOLYNOMIAL


def test_open_pair_is_not_classified():
    record = max_cycle_scaling(73, Family.PAR, None, range(4, 9), 1, seed=0)
    assert record.regime is None
    assert record.expected is None


@pytest.mark.slow
def test_max_cycle_scaling_170_block_sequential():
    record = max_cycle_scaling(170, Family.BS, None, range(8, 17, 2), 30, seed=0)
    assert record.regime == record.expected == Regime.LINEAR
