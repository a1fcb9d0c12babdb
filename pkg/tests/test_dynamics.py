import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.core.dynamics import (
    Evolver,
    analyze_successors,
    detect_cycle,
    step,
    substep,
    successor_map,
    sweep_all,
    sweep_basins,
    sweep_sample,
    trajectory,
)
from app.core.exceptions import BudgetExceeded, SizeMismatch
from app.core.ring import apply_local, neighborhood, pack, unpack
from app.core.schedule import (
    direct_membership,
    make_block_sequential,
    make_parallel,
    make_sequential,
    sample_mode,
)
from app.schemas.mode import Family
from app.schemas.ring import Configuration
from tests.strategies import SAMPLED, mode_and_configuration, modes, rules

literal = Configuration.from_literal


def test_parallel_shift():
    # rule 170 copies the right neighbour
    assert step(literal("1000"), 170, make_parallel(4)).to_literal() == "0001"


def test_sequential_order_matters():
    cfg = literal("1000")
    assert step(cfg, 170, make_sequential([0, 1, 2, 3])).to_literal() == "0000"
    assert step(cfg, 170, make_sequential([3, 2, 1, 0])).to_literal() == "1111"


@given(rules, mode_and_configuration())
def test_step_composes_substeps(code, pair):
    mode, cfg = pair
    expected = cfg
    for block in mode.blocks:
        expected = substep(expected, code, block)
    assert step(cfg, code, mode) == expected


@given(rules, mode_and_configuration(max_n=12))
def test_packed_and_cell_backends_agree(code, pair):
    mode, cfg = pair
    evolver = Evolver(code, mode)
    packed = int(evolver.step_packed(pack(cfg)))
    cells = evolver.step_cells(cfg.to_array()[None, :])[0]
    assert unpack(cfg.n, packed) == Configuration.from_array(cells)


@given(modes(), st.data())
def test_identity_rule_fixes_everything(mode, data):
    cfg = Configuration(bits=tuple(data.draw(st.lists(st.integers(0, 1), min_size=mode.n, max_size=mode.n))))
    assert step(cfg, 204, mode) == cfg


def test_size_mismatch():
    with pytest.raises(SizeMismatch):
        step(literal("101"), 110, make_parallel(4))


def test_trajectory_with_substeps():
    mode = make_sequential([3, 2, 1, 0])
    run = trajectory(literal("1000"), 170, mode, 2, record_substeps=True)
    assert len(run.steps) == 3
    assert len(run.substeps) == 2
    assert [cfg.to_literal() for cfg in run.substeps[0]] == ["1001", "1011", "1111", "1111"]
    assert run.substeps[0][-1] == run.steps[1]
    with pytest.raises(ValueError):
        trajectory(literal("1000"), 170, mode, 0)


def test_detect_cycle():
    outcome = detect_cycle(literal("1000"), 0, make_parallel(4))
    assert (outcome.transient, outcome.cycle_length) == (1, 1)
    assert outcome.is_fixed_point
    assert outcome.cycle_min_rep.to_literal() == "0000"

    outcome = detect_cycle(literal("0010"), 170, make_parallel(4))
    assert (outcome.transient, outcome.cycle_length) == (0, 4)
    assert outcome.cycle_min_rep.to_literal() == "1000"


def test_detect_cycle_on_wide_rings():
    n = 30
    cfg = Configuration(bits=(1,) + (0,) * (n - 1))
    outcome = detect_cycle(cfg, 170, make_parallel(n))
    assert (outcome.transient, outcome.cycle_length) == (0, n)
    assert outcome.cycle_min_rep == cfg
    outcome = detect_cycle(cfg, 0, make_parallel(n))
    assert (outcome.transient, outcome.cycle_length) == (1, 1)


def test_detect_cycle_budget(live_settings, monkeypatch):
    monkeypatch.setattr(live_settings, "MAX_STEPS", 3)
    with pytest.raises(BudgetExceeded):
        detect_cycle(literal("10000000"), 170, make_parallel(8))


def test_successor_map():
    assert np.array_equal(successor_map(204, make_parallel(4)), np.arange(16))
    successors = successor_map(170, make_parallel(3))
    # 001 (cell 2 set, value 4) shifts to 010 (value 2)
    assert successors[4] == 2


def test_successor_map_budget(live_settings, monkeypatch):
    monkeypatch.setattr(live_settings, "EXHAUSTIVE_MAX_CELLS", 4)
    with pytest.raises(BudgetExceeded):
        successor_map(0, make_parallel(5))


def test_analyze_successors_small_graph():
    # 0 -> 1 -> 2 -> 1, 3 -> 3
    basins = analyze_successors(np.array([1, 2, 1, 3]))
    assert basins.on_cycle.tolist() == [False, True, True, True]
    assert basins.rep.tolist() == [1, 1, 1, 3]
    assert basins.transient.tolist() == [1, 0, 0, 0]
    assert basins.cycle_length.tolist() == [2, 2, 2, 1]


def test_sweep_all_rule_0():
    report = sweep_all(0, make_parallel(4))
    assert report.configurations == 16
    assert [(c.cycle_rep, c.cycle_length, c.basin_size) for c in report.cycles] == [("0000", 1, 16)]
    assert report.max_transient == 1
    assert report.fixed_points == 1


def test_sweep_all_rotations():
    report = sweep_all(170, make_parallel(4))
    assert len(report.cycles) == 6
    assert report.max_cycle == 4
    assert report.census() == {1: (2, 2), 2: (1, 2), 4: (3, 12)}
    assert sum(c.basin_size for c in report.cycles) == 16


@settings(max_examples=20)
@given(rules, modes(max_n=6))
def test_sweep_matches_cycle_detection(code, mode):
    basins = sweep_basins(code, mode)
    for state in range(1 << mode.n):
        assert basins.outcome(state, mode.n) == detect_cycle(unpack(mode.n, state), code, mode)


def test_sweep_sample():
    mode = sample_mode(Family.SEQ, 10, 3)
    report = sweep_sample(0, mode, 10, 50, seed=1)
    assert not report.exhaustive
    assert [(c.cycle_rep, c.samples) for c in report.cycles] == [("0" * 10, 50)]
    assert report.cycles[0].basin_size is None
    assert sweep_sample(110, mode, 10, 20, seed=4) == sweep_sample(110, mode, 10, 20, seed=4)


def test_sweep_sample_unresolved(live_settings, monkeypatch):
    monkeypatch.setattr(live_settings, "MAX_STEPS", 2)
    report = sweep_sample(170, make_parallel(8), 8, 40, seed=2)
    assert report.unresolved > 0
    assert report.unresolved + sum(c.samples for c in report.cycles) == 40


def test_block_sequential_limit_cycle_of_rule_156():
    mode = make_block_sequential([[1, 3, 4], [0, 2, 6], [5, 7]])
    outcome = detect_cycle(literal("01100101"), 156, mode)
    assert (outcome.transient, outcome.cycle_length) == (0, 3)
    states = trajectory(literal("01100101"), 156, mode, 3).steps
    assert [cfg.to_literal() for cfg in states] == ["01100101", "01110101", "01000101", "01100101"]


def naive_parallel_successors(code: int, n: int) -> np.ndarray:
    """Packed F(x) for every x, computed cell by cell from the rule table."""
    states = np.arange(1 << n, dtype=np.int64)
    cells = (states[:, None] >> np.arange(n)) & 1
    left, right = np.roll(cells, 1, axis=1), np.roll(cells, -1, axis=1)
    table = np.array([(code >> index) & 1 for index in range(8)], dtype=np.int64)
    out = table[4 * left + 2 * cells + right]
    return (out << np.arange(n)).sum(axis=1)


@pytest.mark.parametrize("n", range(1, 11))
def test_parallel_step_matches_naive_evaluation(n):
    mode = make_parallel(n)
    for code in range(256):
        assert np.array_equal(successor_map(code, mode), naive_parallel_successors(code, n)), code


def step_by_raw_parameters(cfg: Configuration, code: int, mode) -> Configuration:
    """One step where each substep updates the cells selected by the family's own rule."""
    bits = list(cfg.bits)
    for t in range(mode.period):
        before = Configuration(bits=tuple(bits))
        for cell in range(mode.n):
            if direct_membership(mode, cell, t):
                bits[cell] = apply_local(code, *neighborhood(before, cell))
    return Configuration(bits=tuple(bits))


def check_family_semantics(mode_count: int, config_count: int) -> None:
    for family_index, family in enumerate(SAMPLED):
        for index in range(mode_count):
            n = 3 + index % 10
            mode = sample_mode(family, n, seed=1000 * family_index + index)
            code = (37 * index + 11 * family_index) % 256
            grid = np.random.default_rng(index).integers(0, 2, size=(config_count, n), dtype=np.uint8)
            for cells in grid:
                cfg = Configuration.from_array(cells)
                assert step(cfg, code, mode) == step_by_raw_parameters(cfg, code, mode), (mode, cfg)


def test_block_sequence_matches_family_semantics():
    check_family_semantics(mode_count=10, config_count=10)


@pytest.mark.slow
def test_block_sequence_matches_family_semantics_at_scale():
    check_family_semantics(mode_count=100, config_count=100)
