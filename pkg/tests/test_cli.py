import csv
import json
import subprocess
import sys
from types import SimpleNamespace

import pytest

from vlasim import cli


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_config(tmp_path, text):
    path = tmp_path / "cfg.json"
    path.write_text(text)
    return str(path)


def test_dispersion_command(tmp_path):
    assert cli.main(["dispersion", "--k", "0.4,0.5", "--out", str(tmp_path)]) == 0
    out = rows(tmp_path / "dispersion.csv")
    assert list(out[0]) == ["k", "omega", "gamma", "residual", "omega_bohm_gross", "gamma_estimate", "converged"]
    assert float(out[0]["omega"]) == pytest.approx(1.28506, abs=1e-4)
    assert float(out[0]["gamma"]) == pytest.approx(0.06613, abs=1e-4)
    assert float(out[0]["residual"]) <= 1e-10
    assert float(out[1]["k"]) == 0.5


def test_verify_encoding_command(tmp_path):
    cfg = write_config(tmp_path, '{"n_points": 4}')
    assert cli.main(["verify-encoding", "--config", cfg, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "encoding.json").read_text())
    assert rep["deviation"] <= 1e-10 and rep["leakage"] == 0


def test_sweep_error_command(tmp_path):
    cfg = write_config(tmp_path, '{"n_points": 4, "t": 5.0}')
    assert cli.main(["sweep-error", "--config", cfg, "--epsilon", "1e-2,1e-5", "--out", str(tmp_path)]) == 0
    out = rows(tmp_path / "sweep_error.csv")
    assert list(out[0]) == ["epsilon", "epsilon_bound", "query_count", "epsilon_actual", "failure_rate"]
    assert [float(r["epsilon"]) for r in out] == [1e-2, 1e-5]
    for r in out:
        assert float(r["epsilon_actual"]) <= float(r["epsilon_bound"])
    assert int(out[1]["query_count"]) > int(out[0]["query_count"])


def test_simulate_both_paths_deterministic(tmp_path):
    cfg = write_config(tmp_path, '{"n_points": 4, "t": 3.0, "circuit_dt": 1.0}')
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert cli.main(["simulate", "--config", cfg, "--path", "both", "--out", str(out)]) == 0
    for name in ("series_oracle.csv", "series_circuit.csv", "report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    rep = json.loads((a / "report.json").read_text())
    assert rep["simulation"]["query_count"] > 0
    # circuit and oracle agree at the shared sample times
    oracle_rows = {round(float(r["t"]), 9): r for r in rows(a / "series_oracle.csv")}
    for r in rows(a / "series_circuit.csv"):
        o = oracle_rows[round(float(r["t"]), 9)]
        assert abs(float(r["im_E"]) - float(o["im_E"])) < 1e-2


def test_fit_command_from_series(tmp_path):
    assert cli.main(["simulate", "--out", str(tmp_path)]) == 0
    assert cli.main(["fit", "--series", str(tmp_path / "series_oracle.csv"), "--out", str(tmp_path)]) == 0
    fit = json.loads((tmp_path / "fit.json").read_text())
    assert fit["omega"] == pytest.approx(1.2851, abs=5e-3)
    assert fit["gamma"] == pytest.approx(0.0661, abs=2e-3)


def test_fit_numerical_failure(tmp_path):
    cfg = write_config(tmp_path, '{"t": 1.0, "fit_window": [0.0, 1.0]}')
    assert cli.main(["fit", "--config", cfg, "--out", str(tmp_path)]) == cli.EXIT_NUMERICAL
    assert "error" in json.loads((tmp_path / "fit.json").read_text())


def test_readout_demo(tmp_path):
    assert cli.main(["readout-demo", "--out", str(tmp_path), "--seed", "3"]) == 0
    rep = json.loads((tmp_path / "readout.json").read_text())
    assert rep["eta_abs_E0"] == pytest.approx(0.928, abs=5e-3)
    assert rep["prep_success_probability"] == pytest.approx(rep["prep_predicted_probability"], abs=1e-10)


@pytest.mark.parametrize("text,fragment", [
    ('{"k": 0.4,\n "bogus": 1}', ":2: unknown key"),
    ('{"k": 0.4,\n "t": }', ":2:"),
    ('{"k": -0.4}', "k must be"),
    ('{"n_points": 12}', "power of two"),
    ("[1, 2]", "object"),
])
def test_config_errors(tmp_path, capsys, text, fragment):
    cfg = write_config(tmp_path, text)
    assert cli.main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert fragment in capsys.readouterr().err


def test_invariant_breach_exit_code(tmp_path, monkeypatch):
    bad = SimpleNamespace(epsilon_bound=1e-3, epsilon_actual=2e-3, failure_probability=0.0, query_count=4)
    monkeypatch.setattr(cli.qubitization, "run_simulation", lambda cfg: bad)
    cfg = write_config(tmp_path, '{"n_points": 2, "t": 1.0}')
    code = cli.main(["sweep-error", "--config", cfg, "--epsilon", "1e-3", "--out", str(tmp_path)])
    assert code == cli.EXIT_INVARIANT
    assert json.loads((tmp_path / "failure.json").read_text())["violations"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "vlasim", "dispersion", "--k", "0.4", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "dispersion.csv").exists()
