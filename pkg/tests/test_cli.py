import io
import json
import shutil
import subprocess

import pytest

from polyspace.cli import main, parse_lengths
from polyspace.core import Mode
from polyspace.errors import EXIT_CODES, IOFailure, ParseError


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--json")
    assert code == 0, err
    data = json.loads(out)
    return {r["name"] if "index" not in r else (r["name"], r["index"]): r for r in data["results"]}, data


def test_parse_lengths_modes(tmp_path):
    assert parse_lengths("1,1,1,2").mode is Mode.EXACT
    assert parse_lengths("0.5, 1.5, 1.25").mode is Mode.FLOAT
    with pytest.raises(ParseError):
        parse_lengths("1,2.5,3")
    with pytest.raises(ParseError):
        parse_lengths("1,x,3")
    path = tmp_path / "ell.txt"
    path.write_text("3 4\n5\n")
    assert parse_lengths(f"@{path}").lengths == (3, 4, 5)
    with pytest.raises(IOFailure):
        parse_lengths(f"@{tmp_path / 'missing'}")


def test_exact_planar():
    results, data = run_json("exact", "--lengths", "1,1,1,2", "--kind", "planar")
    assert results["betti"]["value"] == ["1", "1"]
    assert results["total"]["value"] == "2"
    assert data["schema_version"] == 1 and data["pass"] is True


def test_exact_equilateral():
    results, _ = run_json("exact", "--equilateral", "5", "--kind", "planar")
    assert results["betti"]["value"] == ["1", "8", "1"]
    assert results["total"]["value"] == "10"


def test_exact_spatial_nongeneric_exit_code():
    code, out, err = run("exact", "--lengths", "1,2,3", "--kind", "spatial")
    assert code == EXIT_CODES["NON_GENERIC"]
    assert out == "" and "NON_GENERIC" in err


@pytest.mark.parametrize("argv, code", [
    (["exact", "--lengths", "1,2.5,3"], "PARSE_ERROR"),
    (["exact", "--lengths", "1,1,1", "--equilateral", "5"], "PARSE_ERROR"),
    (["exact"], "PARSE_ERROR"),
    (["exact", "--lengths", "1,1,1", "--kind", "torus"], "PARSE_ERROR"),
    (["exact", "--equilateral", "12", "--cap", "10"], "CAP_EXCEEDED"),
    (["exact", "--lengths", "1.0,2.0,3.0000000003"], "TOLERANCE_AMBIGUOUS"),
    (["equilateral", "--n", "6"], "EVEN_N"),
    (["mc", "--model", "uniform:0,1", "--n", "10", "--t", "0"], "T_NONPOSITIVE"),
    (["mc", "--model", "uniform:0,1", "--n", "10"], "PARSE_ERROR"),
    (["verify", "--config", "/nonexistent/x.cfg"], "IO_ERROR"),
    (["frobnicate"], "PARSE_ERROR"),
])
def test_error_exit_codes(argv, code):
    status, out, err = run(*argv)
    assert status == EXIT_CODES[code]
    assert out == ""
    assert code in err


def test_exit_codes_distinct():
    assert len(set(EXIT_CODES.values())) == len(EXIT_CODES)
    assert 0 not in EXIT_CODES.values() and 1 not in EXIT_CODES.values()


def test_mc_degenerate_profile():
    results, data = run_json("mc", "--lengths", "1,1,1,2", "--perms", "1000", "--seed", "7")
    assert results[("a", 0)]["value"] == 1.0
    assert results[("a", 0)]["std_error"] == 0.0
    assert data["seed"] == 7


def test_mc_mean_poincare_deterministic():
    argv = ["mc", "--model", "uniform:0,1", "--n", "16", "--t", "1", "--samples", "100000",
            "--seed", "7", "--kind", "planar"]
    first = run(*argv)
    second = run(*argv, "--threads", "3")
    assert first[0] == 0 and first[1] == second[1]
    results, _ = run_json(*argv)
    # finite-n value, increasing toward 1 with n
    assert 0.6 < results["normalized_mean_poincare"]["value"] < 1


def test_mc_mean_betti():
    results, _ = run_json("mc", "--model", "uniform:0,1", "--n", "10", "--p", "1", "--samples", "10000")
    assert abs(results[("mean_betti", 1)]["value"] / 9 - 1) < 0.02


def test_tau_stats():
    results, data = run_json("tau-stats", "--model", "uniform:0,1", "--n", "50", "--samples", "2000")
    assert 20 < results["tau_mean"]["value"] < 30
    results, _ = run_json("tau-stats", "--lengths", "1,1,1,2", "--perms", "100")
    assert results["histogram"]["value"] == ["0", "100", "0", "0"]


def test_calpha():
    results, _ = run_json("calpha", "--alpha", "0")
    assert abs(results["c_alpha"]["value"] - 1 / 3) < 1e-6


def test_equilateral_spatial_reports_both_totals():
    results, _ = run_json("equilateral", "--n", "5", "--kind", "spatial")
    assert results["betti"]["value"] == ["1", "5", "1"]
    assert results["betti_total"]["value"] == "7"
    assert results["closed_form_total"]["value"] == "6"


def test_csv_output(tmp_path):
    path = tmp_path / "out.csv"
    code, _, _ = run("exact", "--equilateral", "5", "--csv", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "name,index,value,std_error"
    assert "betti,1,8," in lines


def _write_config(tmp_path, body):
    path = tmp_path / "exp.cfg"
    path.write_text(body + f"output = {tmp_path / 'res'}\n")
    return path


def test_verify_writes_artifacts(tmp_path):
    config = _write_config(tmp_path, "experiment = mean_poincare\nn_grid = 12, 16\nn_samples = 20000\nt = 0.5\n")
    code, out, err = run("verify", "--config", str(config))
    assert code == 0, err
    assert (tmp_path / "res.json").exists() and (tmp_path / "res.csv").exists()
    saved = json.loads((tmp_path / "res.json").read_text())
    assert saved["pass"] is True


def test_verify_failed_check_exit(tmp_path):
    config = _write_config(tmp_path, "experiment = mean_poincare\nn_grid = 12\nn_samples = 1000\nt = 0.5\n"
                                     "tol.rel = 0.000001\n")
    code, out, _ = run("verify", "--config", str(config))
    assert code == 1
    assert "FAIL" in out


@pytest.mark.parametrize("body", ["experiment = clt_tau\nn_grid = 10\nn_samples = 10\n",
                                  "experiment = unknown\nn_grid = 10\n"])
def test_verify_invalid_config(tmp_path, body):
    config = _write_config(tmp_path, body)
    code, out, err = run("verify", "--config", str(config))
    assert code == EXIT_CODES["CONFIG_INVALID"]
    assert out == ""


@pytest.mark.skipif(shutil.which("polyspace") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["polyspace", "exact", "--lengths", "1,1,1,2", "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"][6]["value"] == ["1", "1"]
