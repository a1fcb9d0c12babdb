import json

import pandas as pd

from app import cli


def invoke(runner, tmp_path, *args):
    return runner.invoke(cli, ["--no-progress", "--jobs", "1", "--out", str(tmp_path), *args])


def test_sweep_156_parallel(runner, tmp_path):
    result = invoke(runner, tmp_path, "sweep", "--rules", "156", "--family", "par", "--n", "4..10")
    assert result.exit_code == 0, result.output
    scaling = pd.read_csv(tmp_path / "scaling.csv")
    assert scaling["max_cycle"].max() <= 2
    assert set(scaling["regime"]) == {"constant"}
    assert (tmp_path / "census_156_par_n4_m0.csv").exists()

    plan = json.loads((tmp_path / "plan.json").read_text())
    assert plan["rules"] == [156]
    assert plan["n_values"] == [4, 5, 6, 7, 8, 9, 10]
    assert plan["exhaustive"] is True


def test_sweep_184_sequential_census(runner, tmp_path):
    result = invoke(runner, tmp_path, "sweep", "--rules", "184", "--family", "seq", "--n", "8",
                    "--modes", "3", "--seed", "7")
    assert result.exit_code == 0, result.output
    sweep = pd.read_csv(tmp_path / "sweep.csv")
    assert len(sweep) == 3
    for index in range(3):
        census = pd.read_csv(tmp_path / f"census_184_seq_n8_m{index}.csv", dtype={"cycle_rep": str})
        assert set(census["cycle_length"]) == {1}
        assert set(census["cycle_rep"]) <= {"0" * 8, "1" * 8}


def test_sweep_is_reproducible(runner, tmp_path):
    args = ["sweep", "--rules", "1,9", "--family", "lc", "--n", "6", "--modes", "4", "--seed", "3"]
    assert invoke(runner, tmp_path / "a", *args).exit_code == 0
    assert invoke(runner, tmp_path / "b", *args).exit_code == 0
    for name in ("sweep.csv", "scaling.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sweep_sampled(runner, tmp_path):
    result = invoke(runner, tmp_path, "sweep", "--rules", "110", "--family", "bp", "--n", "12",
                    "--modes", "2", "--s", "10", "--no-census")
    assert result.exit_code == 0, result.output
    sweep = pd.read_csv(tmp_path / "sweep.csv")
    assert len(sweep) == 2
    assert not list(tmp_path.glob("census_*.csv"))


def test_measure_bijective_rule(runner, tmp_path):
    result = invoke(runner, tmp_path, "measure", "--rules", "51", "--family", "lc", "--lc-max-period", "5",
                    "--n", "8", "--exhaustive", "--m", "3", "--steps", "10", "--per-mode")
    assert result.exit_code == 0, result.output
    series = pd.read_csv(tmp_path / "series.csv")
    assert len(series) == 11
    assert set(series["mean_density"]) == {0.5}
    modes = pd.read_csv(tmp_path / "series_modes.csv")
    assert len(modes) == 3 * 11


def test_diagram_text(runner, tmp_path):
    result = runner.invoke(cli, ["diagram", "--rule", "0", "--mode", "par:n=8",
                                 "--config", "01100101", "--steps", "3"])
    assert result.exit_code == 0, result.output
    assert result.output.splitlines() == [".##..#.#", "........", "........", "........"]


def test_diagram_block_sequential_cycle(runner):
    result = runner.invoke(cli, ["diagram", "--rule", "156", "--mode", "bs:({1,3,4},{0,2,6},{5,7})",
                                 "--config", "01100101", "--steps", "3"])
    assert result.exit_code == 0, result.output
    assert result.output.splitlines() == [".##..#.#", ".###.#.#", ".#...#.#", ".##..#.#"]


def test_diagram_pgm_file(runner, tmp_path):
    output = tmp_path / "fig.pgm"
    result = runner.invoke(cli, ["diagram", "--rule", "184", "--mode", "par:n=16",
                                 "--config", "0011000000011000", "--steps", "20",
                                 "--format", "pgm", "--output", str(output)])
    assert result.exit_code == 0, result.output
    lines = output.read_text().splitlines()
    assert lines[:3] == ["P2", "16 21", "255"]


def test_diagram_parse_error(runner):
    result = runner.invoke(cli, ["diagram", "--rule", "156", "--mode", "bs:({0,1},{2",
                                 "--config", "010", "--steps", "2"])
    assert result.exit_code == 4


def test_walls(runner, tmp_path):
    result = invoke(runner, tmp_path, "walls", "--rules", "156,108,184", "--k", "2..4")
    assert result.exit_code == 0, result.output
    walls = pd.read_csv(tmp_path / "walls.csv", dtype={"word": str})
    absolute = walls[walls["kind"] == "absolute"]
    assert set(absolute[(absolute["rule"] == 156) & (absolute["k"] == 2)]["word"]) == {"01"}
    assert set(absolute[(absolute["rule"] == 108) & (absolute["k"] == 3)]["word"]) == {"001", "100"}
    relative = walls[walls["kind"] == "relative"]
    assert list(relative["word"]) == ["0011"]


def test_modes_roundtrip(runner, tmp_path):
    output = tmp_path / "bs.txt"
    result = runner.invoke(cli, ["modes", "--family", "bs", "--n", "16", "--count", "32",
                                 "--blocks", "3", "--seed", "5", "--output", str(output)])
    assert result.exit_code == 0, result.output
    lines = output.read_text().splitlines()
    assert len(lines) == 32
    assert all(line.startswith("bs:(") and line.count("{") == 3 for line in lines)


def test_modes_odd_bipartite(runner):
    result = runner.invoke(cli, ["modes", "--family", "bip", "--n", "15"])
    assert result.exit_code == 2


def test_primorial(runner, tmp_path):
    result = runner.invoke(cli, ["primorial", "--n", "10"])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("h(10) = 30")

    result = invoke(runner, tmp_path, "primorial", "--upto", "30", "--csv")
    assert result.exit_code == 0, result.output
    table = pd.read_csv(tmp_path / "primorial.csv")
    assert list(table.columns) == ["n", "h_log2", "ratio"]
    assert len(table) == 29
    plan = json.loads((tmp_path / "plan.json").read_text())
    assert plan["command"] == "primorial"
    assert plan["n_values"] == list(range(2, 31))


def test_craft(runner):
    result = runner.invoke(cli, ["craft", "--rule", "156", "--segments", "3,5"])
    assert result.exit_code == 0, result.output
    assert "cycle length: 12 (lcm 12" in result.output
    assert "walls preserved: yes" in result.output


def test_invalid_rule_selector(runner, tmp_path):
    result = invoke(runner, tmp_path, "sweep", "--rules", "300", "--n", "4")
    assert result.exit_code == 2


def test_budget_exceeded(runner, tmp_path):
    result = invoke(runner, tmp_path, "--exhaustive-cap", "4", "sweep", "--rules", "0", "--n", "6")
    assert result.exit_code == 3
