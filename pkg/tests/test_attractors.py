"""Known attractor behaviour of selected rules, checked by exhaustive sweeps on small rings."""

import pytest

from app.core import catalog
from app.core.analysis import modes_for
from app.core.dynamics import detect_cycle, sweep_all
from app.core.schedule import (
    is_parallel_equivalent,
    make_bipartite,
    make_parallel,
    make_sequential,
)
from app.schemas.mode import Family
from app.schemas.report import SweepReport
from app.schemas.ring import Configuration
from tests.strategies import SAMPLED

SIZES = range(4, 9)

literal = Configuration.from_literal


def reports(
    rule: int, families, sizes=SIZES, count: int = 4, seed: int = 0, synchronous: bool = True
) -> list[SweepReport]:
    """Exhaustive sweeps per family and size; synchronous=False skips parallel-equivalent modes."""
    out = []
    for family in families:
        for n in sizes:
            if family == Family.BIP and n % 2:
                continue
            for mode in modes_for(family, n, count, seed):
                if synchronous or not is_parallel_equivalent(mode):
                    out.append(sweep_all(rule, mode))
    return out


ALL_FAMILIES = [Family.PAR, Family.BIP, *SAMPLED]


@pytest.mark.parametrize("rule", catalog.FIXED_POINT_RULES)
def test_fixed_point_rules(rule):
    assert all(report.max_cycle == 1 for report in reports(rule, ALL_FAMILIES))


@pytest.mark.parametrize("rule", catalog.CONSTANT_RULES)
def test_constant_rules(rule):
    bound = 2 if rule in (232, 51) else 6
    assert all(report.max_cycle <= bound for report in reports(rule, ALL_FAMILIES))


def test_rule_232_two_cycles_only_in_parallel():
    for report in reports(232, [Family.BIP, *SAMPLED], synchronous=False):
        assert report.max_cycle == 1
    for report in reports(232, [Family.PAR]):
        for cycle in report.cycles:
            if cycle.cycle_length == 2:
                assert cycle.cycle_rep in ("01" * (report.n // 2), "10" * (report.n // 2))


def test_rule_156_parallel():
    for report in reports(156, [Family.PAR], sizes=range(4, 13)):
        assert {cycle.cycle_length for cycle in report.cycles} <= {1, 2}


def test_short_cycles_of_rules_44_and_164():
    assert detect_cycle(literal("110110"), 44, make_parallel(6)).cycle_length == 3
    assert detect_cycle(literal("1010"), 44, make_bipartite(4)).cycle_length == 3
    assert 3 in {cycle.cycle_length for cycle in sweep_all(164, make_parallel(6)).cycles}


def test_rule_56_has_sequential_limit_cycles():
    outcome = detect_cycle(literal("01000"), 56, make_sequential([0, 4, 3, 2, 1]))
    assert (outcome.transient, outcome.cycle_length) == (1, 8)


@pytest.mark.parametrize("rule", [184, 152])
def test_sequential_modes_reach_homogeneous_fixed_points(rule):
    for report in reports(rule, [Family.SEQ], sizes=range(4, 11), count=10):
        assert report.max_cycle == 1
        for cycle in report.cycles:
            assert len(set(cycle.cycle_rep)) == 1


@pytest.mark.parametrize("rule", catalog.PARALLEL_ONLY_RULES)
def test_cycles_need_the_parallel_mode(rule):
    asynchronous = reports(rule, [Family.BIP, *SAMPLED], count=6, synchronous=False)
    assert all(report.max_cycle == 1 for report in asynchronous)
    assert max(report.max_cycle for report in reports(rule, [Family.PAR])) > 1


@pytest.mark.slow
@pytest.mark.parametrize("rule", catalog.FIXED_POINT_RULES)
def test_fixed_point_rules_at_scale(rule):
    sizes = range(4, 13)
    assert all(report.max_cycle == 1 for report in reports(rule, ALL_FAMILIES, sizes, count=20))


@pytest.mark.slow
@pytest.mark.parametrize("rule", [184, 152])
def test_sequential_homogeneous_at_scale(rule):
    for report in reports(rule, [Family.SEQ], sizes=range(4, 13), count=50):
        assert report.max_cycle == 1
        assert all(len(set(cycle.cycle_rep)) == 1 for cycle in report.cycles)


@pytest.mark.slow
@pytest.mark.parametrize("rule", catalog.CONSTANT_RULES)
def test_constant_rules_at_scale(rule):
    bound = 2 if rule in (232, 51) else 6
    sizes = range(4, 13)
    assert all(report.max_cycle <= bound for report in reports(rule, ALL_FAMILIES, sizes, count=20))


@pytest.mark.slow
def test_rule_156_parallel_up_to_16_cells():
    for report in reports(156, [Family.PAR], sizes=range(13, 17)):
        assert {cycle.cycle_length for cycle in report.cycles} <= {1, 2}
