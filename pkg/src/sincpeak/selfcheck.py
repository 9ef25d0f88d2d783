"""Quick oracle-equivalence checks run by ``sincpeak selfcheck``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import discrete, kernel, signals, supbound
from .ensembles import Gaussian, Rademacher, derive_trial_seed, sample


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def dense_grid_supremum(series: signals.SincSeries, points_per_unit: int = 1000, polish: int = 8) -> float:
    """max |f| over a uniform grid on [-n, 2n] by direct summation, then a
    bounded scalar search around the best grid points."""
    n = series.n
    t = np.linspace(-n, 2 * n, 3 * n * points_per_unit + 1)
    vals = np.abs(signals.evaluate(series, t))
    best = float(vals.max())
    h = 1.0 / points_per_unit
    for i in np.argsort(vals)[-polish:]:
        res = minimize_scalar(
            lambda x: -abs(float(signals.evaluate(series, x))),
            bounds=(t[i] - h, t[i] + h),
            method="bounded",
            options={"xatol": 1e-13},
        )
        best = max(best, -float(res.fun))
    return best


def check_sign_expectation(max_p: int = 12, draws: int = 20, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in range(1, max_p + 1):
        for _ in range(draws):
            b = rng.normal(size=p)
            for k in range(1, p + 1):
                err = abs(discrete.conditional_sign_expectation(b, k) - discrete.brute_force_sign_expectation(b, k))
                worst = max(worst, err)
    return CheckResult("sign_expectation", worst <= 1e-12, f"max error {worst:.3g} for p <= {max_p}")


def check_certified_vs_dense(instances: int = 12, epsilon: float = 1e-6) -> CheckResult:
    worst = 0.0
    ok = True
    for i in range(instances):
        n = 2 + i % 11
        ens = Gaussian(1.0) if i % 2 == 0 else Rademacher()
        s = signals.SincSeries(sample(ens, n, derive_trial_seed(12345, n, i)))
        est = supbound.certified_supremum(s, epsilon=epsilon)
        ref = dense_grid_supremum(s)
        inside = est.lower - 1e-9 <= ref <= est.upper + 1e-9
        ok &= inside and est.achieved and est.gap <= epsilon
        worst = max(worst, max(0.0, ref - est.upper, est.lower - ref))
    return CheckResult("certified_vs_dense", ok, f"{instances} instances, max violation {worst:.3g}")


def check_gradients(seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    t = rng.uniform(-20, 20, size=200)
    h = 1e-5
    fd1 = (kernel.sinc(t + h) - kernel.sinc(t - h)) / (2 * h)
    fd2 = (kernel.sinc_derivative(t + h) - kernel.sinc_derivative(t - h)) / (2 * h)
    e1 = float(np.max(np.abs(fd1 - kernel.sinc_derivative(t))))
    e2 = float(np.max(np.abs(fd2 - kernel.sinc_second_derivative(t))))
    s = signals.SincSeries(rng.normal(size=40))
    x = rng.uniform(-5, 45, size=100)
    fds = (signals.evaluate(s, x + h) - signals.evaluate(s, x - h)) / (2 * h)
    e3 = float(np.max(np.abs(fds - signals.evaluate_derivative(s, x))))
    ok = max(e1, e2) <= 1e-8 and e3 <= 1e-7
    return CheckResult("gradients", ok, f"kernel {max(e1, e2):.3g}, series {e3:.3g}")


def check_offset_grid(seed: int = 2) -> CheckResult:
    rng = np.random.default_rng(seed)
    s = signals.SincSeries(rng.normal(size=50))
    off = np.arange(1, 8) / 8
    err = float(np.max(np.abs(signals.evaluate_offset_grid(s, off) - signals.evaluate_offset_grid_direct(s, off))))
    return CheckResult("offset_grid_fft", err <= 1e-10, f"max error {err:.3g}")


def check_proxy(seed: int = 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    a = rng.choice([-1.0, 1.0], size=300)
    f, d = discrete.proxy(a, "fft"), discrete.proxy(a, "direct")
    err = float(max(np.max(np.abs(f.Y - d.Y)), np.max(np.abs(f.Z - d.Z))))
    return CheckResult("proxy_fft", err <= 1e-10, f"max error {err:.3g}")


SUITES = (check_sign_expectation, check_certified_vs_dense, check_gradients, check_offset_grid, check_proxy)


def run_all() -> list[CheckResult]:
    return [suite() for suite in SUITES]
