import json

import pytest

from basesplit.cli import main
from basesplit.cost import CostProfile, FitnessParams, evaluate
from basesplit.fileformat import load_scenario
from basesplit.scenario import small_oracle_scenario

from test_oracle import GOLDEN_FITNESS, GOLDEN_SCHEME

FAST = ["--generations", "60", "--stall", "20"]


@pytest.fixture
def small_file(tmp_path):
    path = tmp_path / "small.json"
    assert main(["gen-scenario", "--cells", "1", "--chains", "1", "--out", str(path)]) == 0
    return path


def test_gen_scenario_round_trip(small_file):
    assert load_scenario(small_file) == small_oracle_scenario()


def test_gen_scenario_comp(tmp_path):
    path = tmp_path / "comp.json"
    assert main(["gen-scenario", "--cells", "2", "--comp", "--out", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert sum(e["comp_link"] for e in doc["edges"]) == 4


def test_gen_scenario_zero_cells(capsys):
    assert main(["gen-scenario", "--cells", "0"]) == 2
    assert "cells" in capsys.readouterr().err


def test_solve_matches_golden(small_file, tmp_path):
    out = tmp_path / "solve.json"
    assert main(["solve", "--scenario", str(small_file), "--alpha", "0.1", "--delay-bound", "30",
                 "--master-seed", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["fitness"] == pytest.approx(GOLDEN_FITNESS, abs=1e-9)
    g = small_oracle_scenario()
    prof = CostProfile()
    params = FitnessParams.for_graph(g, prof, 0.1, 30.0)
    scheme = [doc["assignment"][n.label] for n in g.nodes]
    # the UL and DL halves admit mirrored optima with identical cost
    assert evaluate(g, scheme, prof, params).fitness == pytest.approx(doc["fitness"], abs=1e-12)
    assert evaluate(g, GOLDEN_SCHEME, prof, params).fitness == pytest.approx(doc["fitness"], abs=1e-9)


def test_oracle_command(small_file, capsys):
    assert main(["oracle", "--scenario", str(small_file), "--alpha", "0.1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["fitness"] == pytest.approx(GOLDEN_FITNESS, abs=1e-12)


def test_oracle_too_large_is_runtime_error(capsys):
    assert main(["oracle", "--cells", "2"]) == 3
    assert "SearchSpaceTooLarge" in capsys.readouterr().err


def test_missing_scenario(tmp_path, capsys):
    missing = tmp_path / "absent.json"
    assert main(["solve", "--scenario", str(missing)]) == 2
    assert str(missing) in capsys.readouterr().err


def test_alpha_out_of_range(capsys):
    assert main(["solve", "--alpha", "1.5"]) == 2
    assert "alpha" in capsys.readouterr().err


def test_bad_flag():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--no-such-flag"])
    assert exc.value.code == 2


def test_sweep_alpha_outputs(small_file, tmp_path):
    out = tmp_path / "res"
    args = ["sweep-alpha", "--scenario", str(small_file), "--alphas", "0.05,0.2", "--runs", "2",
            "--out", str(out), *FAST]
    assert main(args) == 0
    rows = (out / "sweep_alpha_rows.csv").read_text().splitlines()
    assert len(rows) == 1 + 4
    assert rows[0].split(",")[:3] == ["experiment_id", "alpha", "delay_bound"]
    summary = json.loads((out / "sweep_alpha_summary.json").read_text())
    assert summary["points"] == 2 and summary["runs_per_point"] == 2
    assert (out / "sweep_alpha_centralization.csv").exists()
    assert (out / "sweep_alpha_means.csv").exists()


def test_sweep_delay_and_compare(tmp_path):
    out = tmp_path / "res"
    assert main(["sweep-delay", "--cells", "1", "--chains", "1", "--delays", "3", "--runs", "2",
                 "--out", str(out), *FAST]) == 0
    assert len((out / "sweep_delay_means.csv").read_text().splitlines()) == 2
    assert main(["compare-comp", "--cells", "1", "--chains", "1", "--runs", "2", "--out", str(out), *FAST]) == 0
    summary = json.loads((out / "compare_comp_summary.json").read_text())
    assert summary["office_fraction_difference"] == 0.0
    stats = (out / "compare_comp_centralization.csv").read_text()
    assert "non-comp," in stats and "\ncomp," in stats
