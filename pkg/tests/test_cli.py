import json
import shutil
import subprocess

import pytest

from tswaves.acceptance import CRITERIA, resolve
from tswaves.cli import EXIT_CONFIG, EXIT_CRITERION_FAILED, EXIT_OK, EXIT_SOLVER, load_config, main, resolve_workers
from tswaves.errors import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_mach_out_of_range_is_config_error(capsys):
    code, out, err = run(capsys, "dispersion", "solve", "--m", "1.2")
    assert code == EXIT_CONFIG
    assert "physics.m" in err and out == ""


def test_unknown_key_in_config(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"schema_version": 1, "physics": {"mach": 0.3}}))
    code, _, err = run(capsys, "blasius", "--config", str(path))
    assert code == EXIT_CONFIG


def test_schema_version_required_value(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"schema_version": 2}))
    assert run(capsys, "blasius", "--config", str(path))[0] == EXIT_CONFIG


def test_config_file_and_override(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"schema_version": 1, "physics": {"nu": 1e-9, "m": 0.2}}))
    cfg = load_config(str(path), {"physics.m": 0.4})
    assert cfg.physics.nu == 1e-9 and cfg.physics.m == 0.4
    code, out, _ = run(capsys, "dispersion", "solve", "--config", str(path))
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["config_hash"] == load_config(str(path), {}).digest()
    assert doc["result"]["point"]["c"][1] > 0


def test_json_is_deterministic(capsys):
    argv = ["dispersion", "solve", "--nu", "1e-10", "--m", "0.3"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    doc = json.loads(out1)
    assert set(doc) == {"schema_version", "command", "config_hash", "version", "result"}


def test_csv_carries_hash(tmp_path, capsys):
    csv_path = tmp_path / "blasius.csv"
    code, out, _ = run(capsys, "blasius", "--csv", str(csv_path))
    assert code == EXIT_OK
    lines = csv_path.read_text().splitlines()
    h = json.loads(out)["config_hash"]
    assert lines[0].startswith(f"# config-hash {h}")
    assert "," in lines[1] and not lines[1][0].isdigit()
    first = csv_path.read_bytes()
    run(capsys, "blasius", "--csv", str(csv_path))
    assert csv_path.read_bytes() == first


def test_solver_failure_exit_code(capsys):
    code, out, err = run(capsys, "rayleigh-mode", "--c-re", "0.3", "--c-im", "-0.01")
    assert code == EXIT_SOLVER
    assert "solver failure" in err


@pytest.mark.parametrize("sub", ["airy-check", "langer-dump", "rayleigh-mode", "fast-mode", "spatial-mode"])
def test_subcommands_succeed(sub, capsys):
    code, out, _ = run(capsys, sub)
    assert code == EXIT_OK
    assert json.loads(out)["command"] == sub


def test_sweep_subcommand(capsys):
    code, out, _ = run(capsys, "dispersion", "sweep", "--nu-decades", "=-12:-10")
    assert code == EXIT_OK
    res = json.loads(out)["result"]
    assert res["accepted"] and len(res["fit"]["points"]) == 3
    assert res["fit"]["exponent"] == pytest.approx(0.125, abs=0.01)


def test_spectrum_subcommand(capsys):
    argv = ["spectrum", "--profile", "blasius", "--stretch", "1", "--nu", "1e-6", "--alpha-re", "0.15", "--N", "128"]
    code, out, _ = run(capsys, *argv, "--shift-re", "0.331", "--shift-im", "0.015")
    assert code == EXIT_OK
    assert json.loads(out)["result"]["spectrum"]["eigenvalues"]


def test_worker_override(monkeypatch):
    cfg = load_config(None, {})
    monkeypatch.setenv("TSWAVES_WORKERS", "3")
    assert resolve_workers(cfg) == 3
    monkeypatch.setenv("TSWAVES_WORKERS", "0")
    with pytest.raises(ConfigError):
        resolve_workers(cfg)


def test_every_criterion_resolves():
    assert len(CRITERIA) == 12
    for n, ident in enumerate(CRITERIA, start=1):
        assert resolve(ident) == resolve(str(n)) == ident


def test_unknown_criterion(capsys):
    assert run(capsys, "reproduce", "no-such-criterion")[0] == EXIT_CONFIG
    assert run(capsys, "reproduce", "13")[0] == EXIT_CONFIG


def test_reproduce_passing_criterion(capsys):
    code, out, err = run(capsys, "reproduce", "blasius-oracle")
    assert code == EXIT_OK
    assert err.startswith("[PASS]  1 blasius-oracle")
    assert json.loads(out)["result"]["criteria"][0]["passed"] is True


def test_reproduce_failing_criterion_exit_code(capsys):
    code, _, err = run(capsys, "reproduce", "3")
    assert code == EXIT_CRITERION_FAILED
    assert err.startswith("[FAIL]  3 wronskian")


@pytest.mark.skipif(shutil.which("tswaves") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["tswaves", "dispersion", "solve", "--m", "1.2"], capture_output=True, text=True)
    assert proc.returncode == EXIT_CONFIG
    proc = subprocess.run(["tswaves", "airy-check"], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
