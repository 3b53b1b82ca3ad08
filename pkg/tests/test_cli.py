import csv
import math
import io
import json
import subprocess
import sys

import pytest

from probconv.cli import run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_pde_check_example():
    code, out = call("pde-check", "--kernel", "picard", "--f", "cos", "--a", "1", "--levels", "3")
    assert code == 0
    last = out.strip().splitlines()[-1].split(",")
    assert last[0] == "observed_order"
    assert 1.8 <= float(last[1]) <= 2.2


def test_identity_duality_example():
    code, out = call("identity", "--check", "duality", "--t", "2", "--f", "bump")
    assert code == 0
    (row,) = rows(out)
    assert float(row["gap"]) < 1e-10
    assert row["status"] == "PASS"


def test_bounds_example():
    code, out = call("bounds", "--which", "mb", "--f", "sin", "--t", "0.5")
    assert code == 0
    (row,) = rows(out)
    assert row["pass"] == "true"


def test_weierstrass_difference_form_warns(capsys):
    argv = ["identity", "--check", "weierstrass-difference-form", "--n", "1", "--t", "1",
            "--f", "cos", "--a", "1", "--x-min", "-1", "--x-max", "1", "--points", "11"]
    code, out = call(*argv)
    assert code == 0
    (row,) = rows(out)
    assert row["status"] == "WARN"
    assert float(row["gap"]) == pytest.approx(0.0610025013089, abs=1e-8)
    assert "WARN" in capsys.readouterr().err
    code, _ = call(*argv, "--strict")
    assert code == 1


def test_usage_errors_name_the_field(capsys):
    assert call("density", "--t", "-1")[0] == 2
    assert "--t" in capsys.readouterr().err
    assert call("density", "--kernel", "cauchy")[0] == 2
    assert "--kernel" in capsys.readouterr().err
    assert call("convolve", "--x-min", "2", "--x-max", "1")[0] == 2
    assert "--x-max" in capsys.readouterr().err
    assert call("pde-check", "--levels", "1")[0] == 2
    assert call("nonsense")[0] == 2


def test_failed_certification_exits_one():
    # under --strict the known difference-form mismatch counts as a failure
    code, _ = call("identity", "--check", "weierstrass-difference-form", "--strict",
                   "--x-min", "-1", "--x-max", "1", "--points", "5")
    assert code == 1


def test_density_and_symbol_tables():
    code, out = call("density", "--kernel", "mb", "--t", "1", "--x", "0", "1")
    assert code == 0
    assert [r["density"] for r in rows(out)] == ["0", "0.24197072451914337"]
    code, out = call("symbol", "--kernel", "picard-jackson", "--n", "1", "--t", "1", "--xi", "1")
    (row,) = rows(out)
    assert float(row["symbol"]) == pytest.approx(0.8, abs=1e-15)


def test_json_and_csv_carry_the_same_numbers():
    argv = ["convolve", "--kernel", "picard", "--f", "sin", "--points", "9"]
    _, c = call(*argv)
    _, j = call(*argv, "--format", "json")
    from_csv = [(float(r["x"]), float(r["value"])) for r in rows(c)]
    from_json = [(r["x"], r["value"]) for r in json.loads(j)["rows"]]
    assert from_csv == from_json


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"kernel": "exponential", "t": [2.0], "x": [0.0]}))
    _, out = call("density", "--config", str(cfg))
    assert rows(out)[0]["density"] == "1"
    _, out = call("density", "--config", str(cfg), "--t", "4")
    assert rows(out)[0]["density"] == "2"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    assert call("density", "--config", str(bad))[0] == 2


def test_out_directory(tmp_path):
    code, out = call("moment", "--kernel", "mb", "--t", "1", "--out", str(tmp_path))
    assert code == 0 and out == ""
    (path,) = tmp_path.iterdir()
    assert path.name.startswith("moment-mb-") and path.suffix == ".csv"
    assert float(rows(path.read_text())[0]["moment"]) == pytest.approx(2 * math.sqrt(2 / math.pi), rel=1e-15)


def test_repeat_runs_are_byte_identical():
    argv = ["bounds", "--which", "picard", "--f", "abs-sin", "--t", "0.25", "0.125"]
    assert call(*argv) == call(*argv)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "probconv", "density", "--kernel", "picard"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "picard,1,0,0.5"
