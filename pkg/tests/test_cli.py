import csv
import io
import json
import subprocess
import sys

import pytest

from wolfflab.cli import (EXIT_ASSUMPTION, EXIT_CONFIG, EXIT_INPUT, EXIT_IO, EXIT_NUMERICAL, EXIT_OK,
                          RunConfig, config_from_mapping, dump_config, expand_q_values, load_config,
                          main, save_config)
from wolfflab.errors import ConfigError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_report(capsys):
    code, out, _ = run_cli(capsys, "classify", "--n", "3", "--p", "2", "--q", "5")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["regime"] == "Critical"
    assert rep["exponents"]["s0"] == 6.0


def test_verify_singular_report(capsys):
    code, out, _ = run_cli(capsys, "verify-singular", "--n", "3", "--p", "2", "--q", "4")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["t"] == pytest.approx(2 / 3)
    assert rep["c"] == pytest.approx(0.605707, abs=1e-6)
    assert rep["maxAbsResidual"] <= 1e-12


def _sweep_config(tmp_path, jobs):
    path = tmp_path / f"sweep{jobs}.json"
    path.write_text(json.dumps({"command": "sweep", "n": 3, "p": 2, "a": 0, "beta": 1,
                                "q_values": {"start": 2.5, "stop": 7, "step": 0.5}, "jobs": jobs,
                                "format": "csv", "out": str(tmp_path / f"sweep{jobs}.csv")}))
    return path


def test_sweep_rows_and_parallel_order(tmp_path):
    assert main(["sweep", "--config", str(_sweep_config(tmp_path, 1))]) == EXIT_OK
    assert main(["sweep", "--config", str(_sweep_config(tmp_path, 3))]) == EXIT_OK
    serial = (tmp_path / "sweep1.csv").read_text()
    assert serial == (tmp_path / "sweep3.csv").read_text()
    rows = list(csv.reader(io.StringIO(serial)))
    assert rows[0] == ["q", "regime", "slowRate", "fastRate", "verdict", "j0"]
    assert [float(r[0]) for r in rows[1:]] == [2.5 + 0.5 * i for i in range(10)]
    regimes = {float(r[0]): r[1] for r in rows[1:]}
    assert regimes[2.5] == "Nonexistence" and regimes[5.0] == "Critical" and regimes[7.0] == "Supercritical"
    assert rows[1][4] == "HitNonpositive"


def test_jobs_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("WOLFFLAB_JOBS", "2")
    cfg = config_from_mapping({"n": 3, "p": 2, "q_values": [4, 5]}, "sweep")
    from wolfflab.cli import run

    buf = io.StringIO()
    assert run(cfg, buf) == EXIT_OK
    assert len(json.loads(buf.getvalue())["rows"]) == 2
    monkeypatch.setenv("WOLFFLAB_JOBS", "zero")
    assert run(cfg, io.StringIO()) == EXIT_CONFIG


def test_config_round_trip_is_byte_identical(tmp_path):
    text = '{\n  "command": "classify",\n  "n": 3,\n  "p": 2,\n  "q": 5\n}\n'
    path = tmp_path / "c.json"
    path.write_text(text)
    cfg = load_config(path)
    assert dump_config(cfg) == text
    save_config(cfg, tmp_path / "d.json")
    assert (tmp_path / "d.json").read_text() == text


def test_toml_config(tmp_path, capsys):
    path = tmp_path / "c.toml"
    path.write_text('command = "classify"\nn = 5\np = 2\nq = 3\na = -1\n')
    code, out, _ = run_cli(capsys, "classify", "--config", str(path))
    assert code == EXIT_OK
    assert json.loads(out)["regime"] == "Supercritical"


def test_unknown_key_named(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"command": "classify", "n": 3, "p": 2, "q": 5, "qq": 1}')
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert exc.value.key == "qq"
    code, _, err = run_cli(capsys, "classify", "--config", str(path))
    assert code == EXIT_CONFIG
    assert "qq" in err


def test_key_foreign_to_command():
    with pytest.raises(ConfigError) as exc:
        config_from_mapping({"n": 3, "p": 2, "q": 5, "alpha": 1.0}, "classify")
    assert exc.value.key == "alpha"


def test_q_range_expansion():
    assert expand_q_values({"start": 1, "stop": 2, "step": 0.25}) == [1.0, 1.25, 1.5, 1.75, 2.0]
    with pytest.raises(ConfigError) as exc:
        expand_q_values({"start": 1, "stop": 2})
    assert exc.value.key == "q_values.step"


@pytest.mark.parametrize("argv, code", [
    (["classify", "--n", "2", "--p", "2", "--q", "5"], EXIT_ASSUMPTION),
    (["verify-singular", "--n", "3", "--p", "2", "--q", "3"], EXIT_INPUT),
    (["classify", "--n", "3", "--p", "2", "--q", "5", "--jobs", "2"], EXIT_CONFIG),
    (["classify", "--n", "3", "--p", "2", "--q", "5", "--out", "/nonexistent/dir/r.json"], EXIT_IO),
])
def test_exit_codes(capsys, argv, code):
    assert run_cli(capsys, *argv)[0] == code


def test_numerical_failure_exit(tmp_path, capsys):
    path = tmp_path / "it.json"
    path.write_text(json.dumps({"command": "iterate", "n": 3, "p": 2, "q": 2.999999, "max_iter": 3}))
    assert run_cli(capsys, "iterate", "--config", str(path))[0] == EXIT_NUMERICAL


def test_iterate_csv_header(capsys):
    code, out, _ = run_cli(capsys, "iterate", "--n", "3", "--p", "2", "--q", "2", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines() == ["j,term", "0,1.0", "1,0.0"]


def test_deterministic_output(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"w{i}.json"
        assert main(["wolff", "--n", "3", "--p", "2", "--q", "4", "--out", str(out)]) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    ratios = json.loads(outs[0])["ratios"]
    assert max(ratios) / min(ratios) - 1 <= 1e-6


def test_shoot_pohozaev_scaling(capsys):
    code, out, _ = run_cli(capsys, "shoot", "--n", "3", "--p", "2", "--q", "6")
    assert code == EXIT_OK and json.loads(out)["classification"] == "SlowDecay"
    code, out, _ = run_cli(capsys, "pohozaev", "--n", "3", "--p", "2", "--q", "5")
    assert code == EXIT_OK and json.loads(out)["balanceResidual"] <= 1e-12
    code, out, _ = run_cli(capsys, "scaling", "--n", "3", "--p", "2", "--q", "5", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["lambda", "eta", "normRatio", "powerRatio", "predictedPowerRatio"]
    assert all(abs(float(r[2]) - 1) <= 1e-8 for r in rows[1:] if float(r[1]) == 6.0)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wolfflab", "classify", "--n", "3", "--p", "2", "--q", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["regime"] == "Nonexistence"
