import csv
import io
import json
import math
import subprocess
import sys

import pytest

from collmodel.cli import EVOLVE_COLUMNS, SWEEP_COLUMNS, TOMO_COLUMNS, fmt, main, parse_grid, parse_number


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_evolve_csv(capsys):
    code, out, _ = run(capsys, "evolve", "--input", "werner:0.9712", "--T", "1", "--theta", "pi/4")
    assert code == 0
    assert out.splitlines()[0] == ",".join(EVOLVE_COLUMNS)
    table = rows(out)
    assert [r["step"] for r in table] == [str(k) for k in range(7)]
    assert float(table[0]["C_as"]) == pytest.approx(0.9424, abs=1e-12)
    assert table[0]["C_ae"] == ""
    assert "\r" not in out


def test_output_is_byte_identical(capsys):
    argv = ["sweep", "--input", "werner:0.9", "--T", "0:1:3", "--theta", "0,pi/2", "--steps", "3"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv, "--workers", "3")
    assert first == second
    assert first.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    assert len(rows(first)) == 3 * 2 * 4


def test_json_output(capsys):
    code, out, _ = run(capsys, "evolve", "--format", "json", "--steps", "2")
    data = json.loads(out)
    assert code == 0
    assert data["command"] == "evolve"
    assert [r["step"] for r in data["rows"]] == [0, 1, 2]
    assert data["rows"][0]["C_ae"] is None


def test_nm_text(capsys):
    code, out, _ = run(capsys, "nm", "--input", "werner:0.9712", "--T", "1", "--theta", "pi/4")
    assert code == 0
    first = out.splitlines()[0]
    assert first.startswith("N=")
    assert float(first[2:]) > 0.3
    assert any(line.startswith("# theta:") for line in out.splitlines())


def test_tomo_csv_and_seed(capsys):
    argv = ["tomo", "--input", "bell+", "--steps", "1", "--shots", "2000", "--mc", "5", "--seed", "3"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out.splitlines()[0] == ",".join(TOMO_COLUMNS)
    assert run(capsys, *argv)[1] == out
    assert run(capsys, *argv[:-1], "4")[1] != out


def test_config_file_and_flag_override(tmp_path, capsys):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"input": "werner:0.9", "steps": 2, "T": 0.5, "theta": "pi/2"}))
    _, from_file, _ = run(capsys, "evolve", "--config", str(conf))
    assert len(rows(from_file)) == 3
    _, overridden, _ = run(capsys, "evolve", "--config", str(conf), "--steps", "4")
    assert len(rows(overridden)) == 5
    assert rows(overridden)[0]["T"] == "0.5"


@pytest.mark.parametrize("argv", [
    ["evolve", "--T", "1.5"],
    ["evolve", "--input", "ghz"],
    ["evolve", "--steps", "0"],
    ["evolve", "--T", "0,1"],
    ["sweep", "--T", "0:1:x"],
    ["tomo", "--mc", "1"],
    ["evolve", "--theta", "tau"],
    ["frobnicate"],
    [],
])
def test_invalid_configuration_exits_1(argv, capsys):
    assert run(capsys, *argv)[0] == 1


def test_bad_config_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "evolve", "--config", str(bad))[0] == 1
    bad.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "evolve", "--config", str(bad))[0] == 1


def test_invariant_violation_exits_2(monkeypatch, capsys):
    import collmodel.cli as cli
    from collmodel.errors import InvariantViolation

    def broken(cfg):
        raise InvariantViolation("trace drifted")

    monkeypatch.setitem(cli.HANDLERS, "evolve", broken)
    code, _, err = run(capsys, "evolve")
    assert code == 2
    assert "invariant" in err


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("COLLMODEL_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "evolve", "--steps", "1")
    assert code == 0 and out == ""
    text = (tmp_path / "evolve.csv").read_bytes()
    assert text.startswith(b"step,T,theta")
    assert b"\r\n" not in text
    target = tmp_path / "sub" / "x.csv"
    run(capsys, "evolve", "--steps", "1", "--out", str(target))
    assert target.read_bytes() == text


def test_verify_oracle_hidden_but_runs(capsys):
    code, out, _ = run(capsys, "verify-oracle", "--samples", "3", "--steps", "2", "--input", "werner:0.9")
    assert code == 0
    assert float(out.splitlines()[-1].split("=")[1]) < 1e-10
    code, usage, _ = run(capsys, "--help")
    assert code == 0 and "evolve" in usage
    assert "verify-oracle" not in usage


def test_parse_helpers():
    assert parse_number("pi/2") == math.pi / 2
    assert parse_number("-pi/4") == -math.pi / 4
    assert parse_grid("0:1:5") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("1,0.25,0.0625") == [1.0, 0.25, 0.0625]
    assert parse_grid([0, "pi"]) == [0.0, math.pi]
    assert fmt(-0.0) == "0"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(None) == ""


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "collmodel", "nm", "--steps", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("N=")
