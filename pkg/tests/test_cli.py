import json
import math

import numpy as np
import pytest

from sincpeak import cli, experiments as ex


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_prints_config_and_values(capsys):
    code, out, err = run(capsys, "sample", "--ensemble", "rademacher", "--n", "5", "--seed", "3")
    assert code == 0
    assert err.startswith("# config: ")
    assert json.loads(err[len("# config: "):])["seed"] == 3
    vals = [float(x) for x in out.split()]
    assert len(vals) == 5 and set(vals) <= {-1.0, 1.0}


def test_same_argv_same_stdout(capsys):
    argv = ("sup", "--ensemble", "gaussian:sigma=1", "--n", "12", "--seed", "4", "--method", "heuristic")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_sup_single_kernel(capsys):
    code, out, _ = run(capsys, "sup", "--ensemble", "rademacher", "--n", "1", "--seed", "7",
                       "--method", "certified", "--epsilon", "1e-6")
    assert code == 0
    est = json.loads(out)
    assert est["lower"] <= 1.0 <= est["upper"]
    assert est["achieved"] is True


def test_sup_from_file(tmp_path, capsys):
    f = tmp_path / "a.txt"
    f.write_text("# two coefficients\n1.0, 1.0\n")
    code, out, _ = run(capsys, "sup", "--coeffs-file", str(f), "--epsilon", "1e-8", "--out", str(tmp_path / "o.json"))
    assert code == 0
    est = json.loads(out)
    assert est["lower"] <= est["upper"] <= est["lower"] + 1e-8
    assert (tmp_path / "o.json").read_text() == out


def test_proxy_csv(tmp_path, capsys):
    f = tmp_path / "a.txt"
    f.write_text("1 1\n")
    code, out, _ = run(capsys, "proxy", "--coeffs-file", str(f))
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "k,X,Y,Z"
    assert [float(v) for v in lines[1].split(",")] == [1, 1.5, 1.0, 0.5]


def test_fit_exact(tmp_path, capsys):
    recs = []
    for n in [2**j for j in range(4, 11)]:
        y = 2 * math.sqrt(math.log(n)) + 1
        recs += [ex.TrialRecord(n, i, i, y, y, 1.0) for i in range(2)]
    ex.export(recs, tmp_path / "r.csv", "csv")
    code, out, _ = run(capsys, "fit", "--records", str(tmp_path / "r.csv"), "--model", "sqrt_log")
    assert code == 0
    fit = json.loads(out)
    assert fit["alpha"] == pytest.approx(2.0, abs=1e-9)
    assert fit["beta"] == pytest.approx(1.0, abs=1e-9)


def test_sweep_then_fit_matches_embedded(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("ensemble = rademacher\nn_grid = 16, 32, 64\ntrials_per_n = 3\noutput_path = out\n")
    code, out, err = run(capsys, "sweep", "--config", str(cfg), "--threads", "2")
    assert code == 0
    assert '"threads": 2' in err
    summary = json.loads(out)
    assert summary["records"] == 9
    doc = json.loads((tmp_path / "out" / ex.SWEEP_JSON).read_text())
    for model in ex.MODELS:
        code, out, _ = run(capsys, "fit", "--records", str(tmp_path / "out" / ex.RECORDS_CSV), "--model", model)
        embedded = next(f for f in doc["fits"] if f["model"] == model)
        assert json.loads(out) == embedded


def test_selfcheck_passes(capsys):
    code, out, _ = run(capsys, "selfcheck")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_selfcheck_failure_exit_code(capsys, monkeypatch):
    from sincpeak import selfcheck

    monkeypatch.setattr(selfcheck, "SUITES", (lambda: selfcheck.CheckResult("broken", False, "forced"),))
    assert run(capsys, "selfcheck")[0] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ("sup", "--bogus"),
        ("frobnicate",),
        (),
        ("sup", "--ensemble", "rademacher"),
        ("sample", "--ensemble", "cauchy", "--n", "3"),
        ("sup", "--ensemble", "rademacher", "--n", "3", "--epsilon", "-1"),
    ],
)
def test_validation_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err


def test_unknown_flag_prints_usage(capsys):
    _, _, err = run(capsys, "sup", "--bogus")
    assert "usage:" in err


def test_io_errors_exit_2(tmp_path, capsys):
    assert run(capsys, "sup", "--coeffs-file", str(tmp_path / "missing.txt"))[0] == 2
    assert run(capsys, "sweep", "--config", str(tmp_path / "missing.cfg"))[0] == 2
    assert run(capsys, "sample", "--n", "2", "--out", str(tmp_path / "no" / "such" / "file"))[0] == 2


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0
