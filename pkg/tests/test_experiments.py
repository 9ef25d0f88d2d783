import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ols
from sincpeak import experiments as ex
from sincpeak.ensembles import BoundedSymmetric, Gaussian, Rademacher
from sincpeak.errors import ValidationError

GRID = [2**j for j in range(4, 11)]


def rec(n, i, lower, amax=1.0, proxy=None):
    return ex.TrialRecord(n, i, 1000 * n + i, lower, lower + 0.5, amax, proxy, None)


class TestConfig:
    def test_grid_validation(self):
        with pytest.raises(ValidationError):
            ex.ExperimentConfig(Rademacher(), (32, 16))
        with pytest.raises(ValidationError):
            ex.ExperimentConfig(Rademacher(), (8, 16))
        with pytest.raises(ValidationError):
            ex.ExperimentConfig(Rademacher(), (16,), trials_per_n=0)
        with pytest.raises(ValidationError):
            ex.ExperimentConfig(Rademacher(), (16,), signal_family="walsh")
        with pytest.raises(ValidationError):
            ex.ExperimentConfig(Rademacher(), (16,), sup_method="exact")

    def test_parse_config(self, tmp_path):
        text = """
        # demo sweep
        ensemble = bounded:M=1,shape=uniform
        n_grid = 2^4, 32, 2^6
        trials_per_n = 3
        master_seed = 99
        sup_method = certified
        epsilon = 1e-5
        output_path = out
        """
        cfg = ex.parse_config(text, base_dir=tmp_path)
        assert cfg.ensemble == BoundedSymmetric(1.0, 0.5, "uniform")
        assert cfg.n_grid == (16, 32, 64)
        assert cfg.trials_per_n == 3 and cfg.master_seed == 99
        assert cfg.sup_method == "certified" and cfg.epsilon == 1e-5
        assert cfg.output_path == tmp_path / "out"

    @pytest.mark.parametrize(
        "text",
        [
            "ensemble = rademacher\nn_grid = 16\ncolour = red",
            "ensemble = rademacher",
            "ensemble = rademacher\nn_grid = 16\nn_grid = 32",
            "ensemble = rademacher\nn_grid = sixteen",
            "ensemble = rademacher\nn_grid = 16\nrecord_timing = maybe",
            "just words",
        ],
    )
    def test_parse_errors(self, text):
        with pytest.raises(ValidationError):
            ex.parse_config(text)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            ex.load_config(tmp_path / "nope.cfg")


class TestRunSweep:
    def test_single_rademacher_trial(self):
        cfg = ex.ExperimentConfig(Rademacher(), (16,), trials_per_n=1)
        recs = ex.run_sweep(cfg, threads=1)
        assert len(recs) == 1
        assert recs[0].sup_lower >= 1.0
        assert recs[0].proxy_max is None

    def test_repeatable(self):
        cfg = ex.ExperimentConfig(Gaussian(1.0), (16, 32), trials_per_n=3, master_seed=5)
        assert ex.run_sweep(cfg, threads=1) == ex.run_sweep(cfg, threads=3)

    def test_certified_method(self):
        cfg = ex.ExperimentConfig(Gaussian(1.0), (16,), trials_per_n=2, sup_method="certified", epsilon=1e-6)
        for r in ex.run_sweep(cfg, threads=1):
            assert r.sup_upper - r.sup_lower <= 1e-6
            assert r.sup_lower >= r.max_abs_coeff - 1e-9

    @pytest.mark.parametrize("family", ["fourier_baseline", "bounded_kernel", "discrete_proxy"])
    def test_families(self, family):
        cfg = ex.ExperimentConfig(Rademacher(), (16, 64), trials_per_n=2, signal_family=family)
        recs = ex.run_sweep(cfg, threads=1)
        assert len(recs) == 4
        for r in recs:
            assert r.sup_lower <= r.sup_upper
            assert (r.proxy_max is not None) == (family == "discrete_proxy")

    def test_gaussian_mean_exceeds_max_coefficient(self):
        cfg = ex.ExperimentConfig(Gaussian(1.0), (4096,), trials_per_n=200, master_seed=1)
        recs = ex.run_sweep(cfg)
        assert ex.aggregate(recs, 4096)[0] >= ex.aggregate(recs, 4096, "max_abs_coeff")[0]

    def test_scale_equivariance(self):
        base = dict(n_grid=(64, 256), trials_per_n=40, master_seed=8)
        one = ex.run_sweep(ex.ExperimentConfig(Gaussian(1.0), **base))
        two = ex.run_sweep(ex.ExperimentConfig(Gaussian(2.0), **base))
        for n in (64, 256):
            m1, se1, _ = ex.aggregate(one, n)
            m2, se2, _ = ex.aggregate(two, n)
            assert abs(m2 - 2 * m1) <= 2 * math.hypot(se2, 2 * se1) + 1e-9

    def test_timing_is_opt_in(self):
        cfg = ex.ExperimentConfig(Rademacher(), (16,), trials_per_n=1, record_timing=True)
        assert ex.run_sweep(cfg, threads=1)[0].wall_time >= 0.0
        assert ex.run_sweep(ex.ExperimentConfig(Rademacher(), (16,), trials_per_n=1))[0].wall_time is None

    def test_numeric_failure_is_recorded(self, monkeypatch):
        def boom(*args, **kwargs):
            raise FloatingPointError("synthetic")

        monkeypatch.setattr(ex.supbound, "heuristic_supremum", boom)
        cfg = ex.ExperimentConfig(Rademacher(), (16,), trials_per_n=2)
        recs = ex.run_sweep(cfg, threads=1)
        assert len(recs) == 2 and all(math.isnan(r.sup_lower) for r in recs)

    def test_writes_exports(self, tmp_path):
        cfg = ex.ExperimentConfig(Rademacher(), (16, 32, 64), trials_per_n=3, output_path=tmp_path / "run")
        recs = ex.run_sweep(cfg, threads=2)
        assert ex.read_records(tmp_path / "run" / ex.RECORDS_CSV) == recs
        config, json_recs, fits = ex.read_sweep_json(tmp_path / "run" / ex.SWEEP_JSON)
        assert json_recs == recs
        assert [f.model for f in fits] == list(ex.MODELS)
        assert config["ensemble"] == "rademacher"
        assert not (tmp_path / "run" / ex.PARTIAL_CSV).exists()

    def test_resume_skips_completed_trials(self, tmp_path, monkeypatch):
        out = tmp_path / "run"
        cfg = ex.ExperimentConfig(Rademacher(), (16, 32), trials_per_n=3, output_path=out)
        reference = ex.run_sweep(ex.ExperimentConfig(Rademacher(), (16, 32), trials_per_n=3), threads=1)
        out.mkdir()
        # a previous run finished three trials and was cut off mid-line
        partial = ex.records_csv_text(reference[:3]) + "32,0,123"
        (out / ex.PARTIAL_CSV).write_text(partial)
        calls = []
        real = ex.run_trial
        monkeypatch.setattr(ex, "run_trial", lambda c, n, i: calls.append((n, i)) or real(c, n, i))
        assert ex.run_sweep(cfg, threads=1) == reference
        assert sorted(calls) == [(32, 0), (32, 1), (32, 2)]

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        cfg = ex.ExperimentConfig(Rademacher(), (16,), trials_per_n=1, output_path=blocker / "sub")
        with pytest.raises(OSError):
            ex.run_sweep(cfg, threads=1)


class TestAggregate:
    def test_constant(self):
        assert ex.aggregate([rec(16, i, 2.5) for i in range(4)], 16) == (2.5, 0.0, 4)

    def test_two_records(self):
        mean, _, count = ex.aggregate([rec(16, 0, 1.0), rec(16, 1, 4.0)], 16)
        assert mean == 2.5 and count == 2

    def test_standard_error(self):
        x = np.random.default_rng(0).normal(size=10_000)
        _, se, _ = ex.aggregate([rec(16, i, v) for i, v in enumerate(x)], 16)
        assert abs(se - 0.01) <= 0.001

    def test_too_few(self):
        with pytest.raises(ValidationError):
            ex.aggregate([rec(16, 0, 1.0), rec(32, 0, 1.0)], 16)

    def test_ignores_failed_trials(self):
        recs = [rec(16, 0, 1.0), rec(16, 1, 3.0), rec(16, 2, float("nan"))]
        assert ex.aggregate(recs, 16)[2] == 2


class TestFits:
    @pytest.mark.parametrize("model,alpha,beta", [("sqrt_log", 2.0, 1.0), ("loglog", -0.7, 3.0), ("sqrt_nlog", 0.01, -2.0)])
    def test_exact_recovery(self, model, alpha, beta):
        pts = [(n, alpha * float(ex.regressor(model, n)) + beta) for n in GRID]
        fit = ex.fit_scaling(pts, model)
        assert fit.alpha == pytest.approx(alpha, abs=1e-9)
        assert fit.beta == pytest.approx(beta, abs=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-9)
        assert ex.select_model(ex.fit_all(pts)).model == model

    def test_constant_data(self):
        pts = [(n, 3.0) for n in GRID]
        assert ex.fit_scaling(pts, "constant").rss == 0.0
        assert ex.fit_scaling(pts, "sqrt_log").alpha == pytest.approx(0.0, abs=1e-12)
        assert ex.select_model(ex.fit_all(pts)).model == "constant"

    @settings(max_examples=50)
    @given(st.lists(st.floats(-5, 5), min_size=7, max_size=7))
    def test_matches_polyfit(self, ys):
        pts = list(zip(GRID, ys))
        for model in ("sqrt_log", "loglog", "sqrt_nlog"):
            fit = ex.fit_scaling(pts, model)
            slope, intercept = ols(ex.regressor(model, GRID), ys)
            assert fit.alpha == pytest.approx(slope, abs=1e-7)
            assert fit.beta == pytest.approx(intercept, abs=1e-7)
            assert 0.0 <= fit.r_squared <= 1.0

    def test_validation(self):
        with pytest.raises(ValidationError):
            ex.fit_scaling([(16, 1.0), (32, 2.0)], "loglog")
        with pytest.raises(ValidationError):
            ex.fit_scaling([(8, 1.0), (16, 2.0), (32, 3.0)], "loglog")
        with pytest.raises(ValidationError):
            ex.fit_scaling([(64, 1.0), (64, 2.0), (64, 3.0)], "sqrt_log")
        with pytest.raises(ValidationError):
            ex.fit_scaling([(16, 1.0)] * 3, "cubic")

    def test_tie_order(self):
        f = lambda m, rss: ex.ScalingFit(m, 1.0, 0.0, 0.5, rss, 7)  # noqa: E731
        fits = [f("constant", 1.0), f("loglog", 1.0 + 1e-13), f("sqrt_log", 1.0)]
        assert ex.select_model(fits).model == "sqrt_log"
        assert ex.select_model([f("loglog", 0.5), f("sqrt_log", 0.6)]).model == "loglog"

    def test_select_needs_two(self):
        with pytest.raises(ValidationError):
            ex.select_model([ex.ScalingFit("loglog", 1.0, 0.0, 1.0, 0.0, 7)])

    def test_nearly_flat_curve_is_constant(self):
        pts = [(n, 1.77 + 1e-5 * math.sin(n)) for n in GRID]
        assert ex.select_model(ex.fit_all(pts)).model == "constant"


class TestExport:
    def test_empty_csv(self, tmp_path):
        ex.export([], tmp_path / "r.csv", "csv")
        assert (tmp_path / "r.csv").read_bytes() == b"n,trial,seed,sup_lower,sup_upper,max_abs_coeff,proxy_max,wall_time_s\n"

    def test_one_record(self, tmp_path):
        r = ex.TrialRecord(16, 0, 2**64 - 1, 1.0 / 3.0, 2.0, 1.0, None, None)
        ex.export([r], tmp_path / "r.csv", "csv")
        lines = (tmp_path / "r.csv").read_bytes().split(b"\n")
        assert len(lines) == 3 and lines[2] == b""
        assert lines[1] == b"16,0,18446744073709551615,0.33333333333333331,2,1,,"

    @settings(max_examples=30)
    @given(
        st.lists(
            st.tuples(
                st.integers(16, 2**20), st.integers(0, 999), st.integers(0, 2**64 - 1),
                st.floats(allow_nan=False), st.floats(allow_nan=False), st.floats(0, 1e6),
                st.one_of(st.none(), st.floats(0, 10)), st.one_of(st.none(), st.floats(0, 10)),
            ),
            max_size=5,
        )
    )
    def test_round_trip(self, rows):
        import tempfile

        recs = [ex.TrialRecord(*row) for row in rows]
        with tempfile.TemporaryDirectory() as d:
            ex.export(recs, Path(d) / "r.csv", "csv")
            ex.export(recs, Path(d) / "r.json", "json")
            assert ex.read_records(Path(d) / "r.csv") == recs
            assert ex.read_records(Path(d) / "r.json") == recs

    def test_json_layout(self, tmp_path):
        fits = ex.fit_all([(n, math.log(n)) for n in GRID])
        ex.export([rec(16, 0, 1.0)], tmp_path / "s.json", "json", fits=fits)
        text = (tmp_path / "s.json").read_text()
        assert text.index('"config"') < text.index('"records"') < text.index('"fits"')
        ex.export(fits, tmp_path / "f.json", "json")
        assert [f.model for f in ex.read_sweep_json(tmp_path / "f.json")[2]] == list(ex.MODELS)

    def test_fits_not_csv(self, tmp_path):
        with pytest.raises(ValidationError):
            ex.export(ex.fit_all([(n, 1.0 * n) for n in GRID]), tmp_path / "f.csv", "csv")

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError, match="missing"):
            ex.export([], tmp_path / "missing" / "r.csv", "csv")
