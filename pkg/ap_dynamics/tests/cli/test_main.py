import json
import math

import numpy as np
import pytest

from ap_dynamics.cli.main import build_parser, run
from ap_dynamics.cli.output import read_csv
from ap_dynamics.model.catalog import get_nonlinearity
from ap_dynamics.model.frame import EnergyFrame


def _json(path):
    with open(path, "r") as f:
        return json.load(f)


def test_parser_routes_nested_actions():
    args = build_parser().parse_args(["horseshoe", "certify", "--k1", "0", "--t-factor", "1.2"])
    assert args.command == "horseshoe certify"
    assert args.k1 == 0.0 and args.t_factor == 1.2
    with pytest.raises(SystemExit):
        build_parser().parse_args(["horseshoe"])


def test_timemap_golden_value(tmp_path):
    code = run(["timemap", "--f", "abs", "--k", "0", "--rho", "8", "--kind", "U",
                "--r", repr(2.0 * math.sqrt(2.0)), "--out", str(tmp_path)])
    assert code == 0
    meta, rows = read_csv(tmp_path / "timemap.csv")
    assert meta["subcommand"] == "timemap"
    assert meta["config"]["kind"] == "U"
    assert len(rows) == 1
    assert float(rows[0]["tau"]) == pytest.approx(math.pi / 2.0, abs=1e-8)


def test_timemap_needs_abscissa(tmp_path, capsys):
    code = run(["timemap", "--f", "abs", "--k", "2", "--rho", "0", "--kind", "O", "--out", str(tmp_path)])
    assert code == 1
    assert "'r'" in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    config = tmp_path / "analyze.json"
    config.write_text(json.dumps({"k": [2.0], "bogus": 1}))
    assert run(["analyze", "--config", str(config), "--out", str(tmp_path)]) == 1
    assert "bogus" in capsys.readouterr().err


def test_missing_preset(tmp_path, capsys):
    assert run(["scatter", "--config", "no_such_preset", "--out", str(tmp_path)]) == 1
    assert "Cannot find the preset file" in capsys.readouterr().err


def test_analyze(tmp_path):
    assert run(["analyze", "--f", "sqrt1p", "--k", "2", "4", "--rho", "0", "--out", str(tmp_path)]) == 0
    result = _json(tmp_path / "analyze.json")["result"]
    assert result["nonlinearity"]["name"] == "sqrt1p"
    assert [frame["k"] for frame in result["frames"]] == [2.0, 4.0]
    assert all(frame["loop_area"] > 0 for frame in result["frames"])
    assert result["ordering"][0]["holds"]
    frame = EnergyFrame.of(get_nonlinearity("sqrt1p"), 2.0)
    assert result["frames"][0]["x_u"] == pytest.approx(frame.x_u)


@pytest.mark.parametrize("preset", ["fig0", "fig2"])
def test_scatter_presets(tmp_path, preset):
    code = run(["scatter", "--config", preset, "--count", "3", "--n-iter", "2", "--out", str(tmp_path)])
    assert code == 0
    meta, rows = read_csv(tmp_path / "scatter.csv")
    assert meta["config"]["ic"]["count"] == 3
    assert meta["config"]["ic"]["u0_min"] == -4.0
    assert list(rows[0]) == ["ic_index", "iter", "x", "y", "flag"]
    assert {row["flag"] for row in rows} <= {"ok", "blowup"}
    assert [(row["ic_index"], row["iter"]) for row in rows[:3]] == [("0", "0"), ("0", "1"), ("0", "2")]


def test_unforced_scatter_keeps_energy(tmp_path):
    frame = EnergyFrame.of(get_nonlinearity("sqrt1p"), 2.0)
    code = run(["scatter", "--f", "sqrt1p", "--variant", "periodic", "--k", "2", "--eps", "0", "--omega", "1",
                "--u0-min", repr(frame.x_s - 0.5), "--u0-max", repr(frame.x_s + 0.5), "--count", "3",
                "--n-iter", "10", "--out", str(tmp_path)])
    assert code == 0
    _, rows = read_csv(tmp_path / "scatter.csv")
    assert len(rows) == 3 * 11
    for index in range(3):
        orbit = [row for row in rows if row["ic_index"] == str(index)]
        energy = frame.energy(np.array([float(r["x"]) for r in orbit]), np.array([float(r["y"]) for r in orbit]))
        assert np.max(np.abs(energy - energy[0])) < 1e-7


def test_thread_count_does_not_change_output(tmp_path):
    outputs = []
    for threads in ("1", "4"):
        out = tmp_path / threads
        assert run(["scatter", "--config", "fig0", "--count", "8", "--n-iter", "3", "--threads", threads,
                    "--out", str(out)]) == 0
        outputs.append((out / "scatter.csv").read_bytes())
    assert outputs[0] == outputs[1]


def test_melnikov(tmp_path):
    assert run(["melnikov", "--f", "sqrt1p", "--k", "2", "--samples", "64", "--eta-omegas", "1", "2",
                "--out", str(tmp_path)]) == 0
    _, delta = read_csv(tmp_path / "melnikov_delta.csv")
    assert len(delta) == 64
    _, eta = read_csv(tmp_path / "melnikov_eta.csv")
    assert [float(row["omega"]) for row in eta] == [1.0, 2.0]
    assert all(math.isfinite(float(row["eta"])) for row in eta)
    zeros = _json(tmp_path / "melnikov_zeros.json")["result"]["zeros"]
    assert len(zeros["simple_zeros"]) == 2
    assert not zeros["identically_zero"]


def test_ap_scan(tmp_path):
    assert run(["ap-scan", "--f", "sqrt1p", "--ks", "2", "-0.5", "--out", str(tmp_path)]) == 0
    meta, rows = read_csv(tmp_path / "ap_scan.csv")
    assert meta["subcommand"] == "ap-scan"
    assert [(float(row["k"]), int(row["count"])) for row in rows] == [(2.0, 2), (-0.5, 0)]


def test_short_k2_phase_exits_declined(tmp_path, capsys):
    code = run(["horseshoe", "certify", "--f", "abs", "--k1", "0", "--k2", "2", "--t1", "2", "--t2", "3",
                "--A", "0", "--B", "8", "--D", "-0.195", "--out", str(tmp_path)])
    assert code == 2
    assert "t2 > tau2_star" in capsys.readouterr().out
    report = _json(tmp_path / "horseshoe_certificate.json")["result"]
    assert report["status"] == "declined"
    assert report["tau_stars"]["tau2"] == pytest.approx(4.0 * math.pi, rel=1e-8)


def test_horseshoe_needs_switching_times(tmp_path, capsys):
    assert run(["horseshoe", "certify", "--k1", "0", "--k2", "2", "--out", str(tmp_path)]) == 1
    assert "'t1'" in capsys.readouterr().err


@pytest.mark.slow
def test_certify_abs_example(tmp_path, capsys):
    assert run(["horseshoe", "certify", "--config", "abs_example", "--out", str(tmp_path)]) == 0
    assert "1×2" in capsys.readouterr().out
    report = _json(tmp_path / "horseshoe_certificate.json")["result"]
    assert report["symbols"] == [1, 2]
    assert len(report["psi1"]["paths"]) == 16


@pytest.mark.slow
def test_periodic_abs_example(tmp_path):
    assert run(["horseshoe", "periodic", "--config", "abs_example", "--out", str(tmp_path)]) == 0
    result = _json(tmp_path / "horseshoe_periodic.json")["result"]
    assert [entry["itinerary"] for entry in result] == [[0], [0, 1]]
    assert all(entry["found"] and entry["residual"] < 1e-8 for entry in result)
