import json

import numpy as np
import pytest

import config
import csphase
from src.cs_energy import CsParams
from src.errors import DivergenceError, DomainError
from src.limit_problem import limit_el_residual, omega0, omega1, solve_eq_k
from src.radial_core import Field, Mesh1D


def run_json(capsys, *argv):
    code = csphase.main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


# --- omega expressions ---

def test_parse_omega_accepts_numbers_and_names():
    assert csphase.parse_omega("0.25", 2.0) == 0.25
    assert csphase.parse_omega("omega0", 2.0) == pytest.approx(omega0(2.0))
    assert csphase.parse_omega("0.8*omega1", 2.0) == pytest.approx(0.8 * omega1(2.0))
    assert csphase.parse_omega("2 * omega_bar", 2.0) == pytest.approx(2.0 / 3.0)
    with pytest.raises(DomainError):
        csphase.parse_omega("omega2", 2.0)


# --- threshold ---

def test_threshold_text(capsys):
    assert csphase.main(["threshold", "--p", "2"]) == config.EXIT_OK
    out = capsys.readouterr().out
    for expected in ("m=6.000000", "omega0=0.103280", "omega1=0.128300", "omega_bar=0.333333"):
        assert expected in out


def test_threshold_json(capsys):
    code, result = run_json(capsys, "threshold", "--p", "2")
    assert code == config.EXIT_OK
    assert result["m"] == pytest.approx(6.0, abs=1e-6)
    assert result["omega0"] == pytest.approx(2.0 / (5.0 * np.sqrt(15.0)), abs=1e-9)
    assert result["omega1"] == pytest.approx(2.0 / (9.0 * np.sqrt(3.0)), abs=1e-9)
    assert result["omega_bar"] == pytest.approx(1.0 / 3.0, abs=1e-9)


def test_threshold_writes_json_artifact(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert csphase.main(["threshold", "--p", "1.5", "--out", str(out)]) == config.EXIT_OK
    assert json.loads(out.read_text())["omega0"] < json.loads(out.read_text())["omega1"]
    manifest = json.loads((tmp_path / "t.manifest.json").read_text())
    assert manifest["command"] == "threshold" and manifest["artifacts"] == [str(out)]


def test_threshold_out_of_band(capsys):
    assert csphase.main(["threshold", "--p", "3.5"]) == config.EXIT_DOMAIN
    assert "Error" in capsys.readouterr().err


# --- sweep ---

def test_sweep_rows_and_determinism(tmp_path, capsys):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert csphase.main(["sweep", "--out", str(first), "--json"]) == config.EXIT_OK
    assert csphase.main(["sweep", "--out", str(second), "--json"]) == config.EXIT_OK
    assert first.read_bytes() == second.read_bytes()

    header, table = read_csv(first)
    assert header == ["p", "m", "omega0", "omega1", "omega_bar"]
    assert table.shape == (181, 5)
    assert np.all(table[:, 2] < table[:, 3])
    assert np.all(table[:, 3] < table[:, 4])

    capsys.readouterr()
    _, threshold = run_json(capsys, "threshold", "--p", "2")
    row = table[np.argmin(np.abs(table[:, 0] - 2.0))]
    assert row[0] == pytest.approx(2.0, abs=1e-9)
    assert row[2] == pytest.approx(threshold["omega0"], rel=1e-8)
    assert row[3] == pytest.approx(threshold["omega1"], rel=1e-8)


def test_sweep_unwritable_path(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    code = csphase.main(["sweep", "--steps", "4", "--out", str(blocker / "sweep.csv"), "--json"])
    assert code == config.EXIT_IO


def test_sweep_band_check(tmp_path):
    code = csphase.main(["sweep", "--pmin", "0.5", "--out", str(tmp_path / "s.csv"), "--json"])
    assert code == config.EXIT_DOMAIN


# --- soliton ---

def test_soliton_at_omega0(tmp_path, capsys):
    out = tmp_path / "soliton.csv"
    code, stats = run_json(capsys, "soliton", "--p", "2", "--omega", "omega0", "--out", str(out))
    assert code == config.EXIT_OK
    assert stats["w0"] == pytest.approx(3.0 / (2.0 * np.sqrt(15.0)), abs=1e-8)

    header, table = read_csv(out)
    assert header == ["r", "w", "wprime"]
    n = table.shape[0] - 1
    mesh = Mesh1D.line(stats["half_width"], n)
    np.testing.assert_allclose(table[:, 0], mesh.nodes, atol=1e-6)
    # 9 significant digits limit the second difference to about 5e-6 here
    residual = limit_el_residual(Field(mesh, table[:, 1]), CsParams(2.0, omega0(2.0)))
    assert np.max(np.abs(residual.values)) <= 5e-5


def test_soliton_root_unavailable(tmp_path, capsys):
    code = csphase.main(["soliton", "--p", "2", "--omega", "0.2", "--out", str(tmp_path / "s.csv")])
    assert code == config.EXIT_NO_ROOT
    assert not (tmp_path / "s.csv").exists()


def test_soliton_small_root_at_tiny_frequency(tmp_path, capsys):
    code, stats = run_json(
        capsys, "soliton", "--p", "2", "--omega", "1e-15", "--which", "k1",
        "--n", "2000", "--out", str(tmp_path / "s.csv"),
    )
    assert code == config.EXIT_OK
    assert stats["k"] == pytest.approx(1e-15, rel=1e-6)


def test_soliton_degenerate_frequency(tmp_path, capsys):
    code, stats = run_json(
        capsys, "soliton", "--p", "2", "--omega", "omega1", "--which", "k0",
        "--n", "2000", "--out", str(tmp_path / "s.csv"),
    )
    assert code == config.EXIT_OK
    assert stats["k"] == pytest.approx(solve_eq_k(CsParams(2.0, omega1(2.0))).k1)


# --- minimize ---

def test_minimize_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    code, summary = run_json(
        capsys, "minimize", "--p", "2", "--omega", "0.5", "--radius", "10",
        "--max-iters", "20", "--out", str(out),
    )
    assert code == config.EXIT_OK

    header, profile = read_csv(out / "profile.csv")
    assert header == ["r", "u"]
    assert profile.shape[0] == 201
    assert profile[-1, 1] == 0.0

    _, trace = read_csv(out / "energy_trace.csv")
    assert np.all(np.diff(trace[:, 1]) <= 1e-12)
    assert json.loads((out / "summary.json").read_text()) == summary
    assert summary["iters"] <= 20

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "minimize"
    assert manifest["parameters"]["n"] == 200
    assert sorted(manifest["artifacts"]) == sorted(
        str(out / name) for name in ("profile.csv", "energy_trace.csv", "summary.json")
    )


def test_minimize_rejects_coarse_grid(tmp_path):
    code = csphase.main(["minimize", "--p", "2", "--omega", "0.5", "--radius", "10", "--n", "100",
                         "--out", str(tmp_path), "--json"])
    assert code == config.EXIT_DOMAIN


def test_minimize_divergence_keeps_trace(tmp_path, monkeypatch, capsys):
    def diverge(params, cfg):
        raise DivergenceError("non-finite energy", [1.0, 0.5, float("inf")])

    monkeypatch.setattr("src.pipeline.minimize_on_ball", diverge)
    out = tmp_path / "run"
    code = csphase.main(["minimize", "--p", "2", "--omega", "0.5", "--radius", "10", "--out", str(out)])
    assert code == config.EXIT_DIVERGED
    assert "energy_trace.csv" in capsys.readouterr().err
    _, trace = read_csv(out / "energy_trace.csv")
    assert trace.shape == (3, 2)
    assert np.isinf(trace[-1, 1])


# --- psi and asymptotics ---

def test_psi_table(tmp_path, capsys):
    out = tmp_path / "psi.csv"
    code, stats = run_json(capsys, "psi", "--p", "2", "--omega", "0.8*omega1", "--points", "50", "--out", str(out))
    assert code == config.EXIT_OK
    assert stats["count"] == 2 and stats["k1"] < stats["k2"]
    header, table = read_csv(out)
    assert header == ["k", "psi", "dpsi"]
    assert table.shape == (50, 3)
    assert np.all(np.diff(table[:, 0]) > 0.0)


def test_psi_rejects_bad_grid(tmp_path):
    code = csphase.main(["psi", "--p", "2", "--omega", "0.1", "--kmin", "1", "--kmax", "0.5",
                         "--out", str(tmp_path / "psi.csv"), "--json"])
    assert code == config.EXIT_DOMAIN


def test_asymptotics_table(tmp_path, capsys):
    out = tmp_path / "asym.csv"
    code, stats = run_json(capsys, "asymptotics", "--p", "2", "--omega", "omega0",
                           "--rho", "100", "200", "--out", str(out))
    assert code == config.EXIT_OK
    assert stats["J"] == pytest.approx(0.0, abs=1e-5)
    assert stats["predicted"] < 0.0
    header, table = read_csv(out)
    assert header == ["rho", "total", "linear", "correction", "predicted"]
    np.testing.assert_allclose(table[:, 0], [100.0, 200.0])
    assert np.all(table[:, 3] < 0.0)


# --- verify ---

@pytest.mark.slow
def test_verify_fast_passes(tmp_path, capsys):
    out = tmp_path / "verify.json"
    code, report = run_json(capsys, "verify", "--fast", "--out", str(out))
    assert code == config.EXIT_OK
    assert report["passed"] and report["failed"] == []
    assert json.loads(out.read_text()) == report


@pytest.mark.slow
def test_verify_detects_tampered_omega0(monkeypatch, capsys):
    monkeypatch.setattr("src.verify.omega0", lambda p: omega0(p) * 1.01)
    code, report = run_json(capsys, "verify", "--fast")
    assert code == config.EXIT_VERIFY_FAILED
    assert "p2_threshold_omega0" in report["failed"]
