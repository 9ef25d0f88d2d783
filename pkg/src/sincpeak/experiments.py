"""Monte Carlo sweeps of signal suprema, growth-law fits and record export.

A sweep draws ``trials_per_n`` coefficient vectors for every ``n`` in the
grid, computes one supremum statistic per draw, and fits the trial means
against the candidate growth laws::

    sqrt_log    alpha * sqrt(ln n) + beta
    loglog      alpha * ln ln n + beta
    sqrt_nlog   alpha * sqrt(n ln n) + beta
    constant    beta

Every trial is seeded from ``(master_seed, n, trial)`` alone, so results do
not depend on thread count or completion order, and exports are sorted by
``(n, trial)``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import discrete, signals, supbound
from .ensembles import Ensemble, derive_trial_seed, parse_ensemble, sample
from .errors import ValidationError

log = logging.getLogger(__name__)

SIGNAL_FAMILIES = ("sinc", "fourier_baseline", "bounded_kernel", "discrete_proxy")
SUP_METHODS = ("certified", "heuristic")
MODELS = ("sqrt_log", "loglog", "sqrt_nlog", "constant")
CSV_HEADER = ("n", "trial", "seed", "sup_lower", "sup_upper", "max_abs_coeff", "proxy_max", "wall_time_s")

FOURIER_OVERSAMPLING = 32
BUMP_DENSITY = 32
RECORDS_CSV = "records.csv"
SWEEP_JSON = "sweep.json"
PARTIAL_CSV = "records.partial.csv"


@dataclass(frozen=True)
class ExperimentConfig:
    ensemble: Ensemble
    n_grid: tuple[int, ...]
    trials_per_n: int = 200
    master_seed: int = 0
    sup_method: str = "heuristic"
    epsilon: float | None = None
    points_per_unit: int | None = None
    signal_family: str = "sinc"
    output_path: Path | None = None
    record_timing: bool = False
    cell_budget: int = supbound.DEFAULT_CELL_BUDGET

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid:
            raise ValidationError("n_grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("n_grid must be strictly increasing")
        if grid[0] < 16:
            raise ValidationError("every n in n_grid must be >= 16")
        if self.trials_per_n < 1:
            raise ValidationError("trials_per_n must be >= 1")
        if self.sup_method not in SUP_METHODS:
            raise ValidationError(f"sup_method must be one of {SUP_METHODS}")
        if self.signal_family not in SIGNAL_FAMILIES:
            raise ValidationError(f"signal_family must be one of {SIGNAL_FAMILIES}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        if self.points_per_unit is not None and self.points_per_unit < 2:
            raise ValidationError("points_per_unit must be >= 2")
        if self.output_path is not None:
            object.__setattr__(self, "output_path", Path(self.output_path))

    def describe(self) -> dict:
        """Data-defining settings in fixed key order (no paths or thread counts)."""
        return {
            "ensemble": self.ensemble.spec,
            "n_grid": list(self.n_grid),
            "trials_per_n": self.trials_per_n,
            "master_seed": self.master_seed,
            "sup_method": self.sup_method,
            "epsilon": self.epsilon,
            "points_per_unit": self.points_per_unit,
            "signal_family": self.signal_family,
            "record_timing": self.record_timing,
            "cell_budget": self.cell_budget,
        }


@dataclass(frozen=True)
class TrialRecord:
    n: int
    trial_index: int
    seed: int
    sup_lower: float
    sup_upper: float
    max_abs_coeff: float
    proxy_max: float | None = None
    wall_time: float | None = None

    def row(self) -> list[str]:
        return [
            str(self.n),
            str(self.trial_index),
            str(self.seed),
            _fmt(self.sup_lower),
            _fmt(self.sup_upper),
            _fmt(self.max_abs_coeff),
            _fmt(self.proxy_max),
            _fmt(self.wall_time),
        ]

    def as_dict(self) -> dict:
        return dict(zip(CSV_HEADER, (self.n, self.trial_index, self.seed, self.sup_lower, self.sup_upper,
                                     self.max_abs_coeff, self.proxy_max, self.wall_time)))


@dataclass(frozen=True)
class ScalingFit:
    model: str
    alpha: float
    beta: float
    r_squared: float
    rss: float
    n_points: int

    def predict(self, n):
        return self.alpha * regressor(self.model, n) + self.beta

    def as_dict(self) -> dict:
        return asdict(self)


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _opt_float(text: str):
    return None if text == "" else float(text)


# ---------------------------------------------------------------------------
# Configuration files


def _parse_n_grid(text: str) -> tuple[int, ...]:
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if "^" in tok:
            base, _, exp = tok.partition("^")
            out.append(int(base) ** int(exp))
        else:
            out.append(int(tok))
    return tuple(out)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"not a boolean: {text!r}")


_CONFIG_KEYS = {
    "ensemble": parse_ensemble,
    "n_grid": _parse_n_grid,
    "trials_per_n": int,
    "master_seed": int,
    "sup_method": str,
    "epsilon": float,
    "points_per_unit": int,
    "signal_family": str,
    "output_path": Path,
    "record_timing": _parse_bool,
    "cell_budget": int,
}


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment.

    Keys are the :class:`ExperimentConfig` field names. ``n_grid`` is a
    comma-separated list whose items may be written ``2^k``; ``ensemble``
    uses the ``gaussian:sigma=1`` / ``rademacher`` /
    ``bounded:M=1,m=0.5,shape=uniform`` syntax. A relative
    ``output_path`` is resolved against ``base_dir``.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep:
            raise ValidationError(f"line {lineno}: expected 'key = value'")
        if key not in _CONFIG_KEYS:
            raise ValidationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValidationError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](val)
        except ValidationError:
            raise
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: bad value for {key}: {exc}") from None
    missing = {"ensemble", "n_grid"} - set(values)
    if missing:
        raise ValidationError(f"missing required keys: {sorted(missing)}")
    out = values.get("output_path")
    if out is not None and base_dir is not None and not out.is_absolute():
        values["output_path"] = Path(base_dir) / out
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return parse_config(text, base_dir=path.parent)


# ---------------------------------------------------------------------------
# Trials


def fourier_baseline_sup(a) -> tuple[float, float]:
    """(grid max, grid max + step * derivative bound) for the cosine baseline."""
    base = signals.FourierBaseline(a)
    n = base.coefficients.n
    points = FOURIER_OVERSAMPLING * n
    vals = signals.fourier_grid(base, points)
    lower = float(np.max(np.abs(vals)))
    slope = 2.0 * math.pi * n * math.sqrt(2.0) * float(np.sum(np.abs(base.coefficients.values)))
    return lower, lower + slope / points


def bounded_kernel_sup(a, points_per_unit: int = BUMP_DENSITY) -> tuple[float, float]:
    """(grid max, certified bound C max|a|) for the Gaussian-bump series."""
    grid = signals.bump_series_grid(a, points_per_unit)
    return float(np.max(np.abs(grid))), signals.bounded_kernel_sup_bound(a)


def run_trial(config: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    seed = derive_trial_seed(config.master_seed, n, trial)
    start = time.perf_counter()
    proxy_max = None
    max_abs = float("nan")
    try:
        coeffs = sample(config.ensemble, n, seed)
        max_abs = coeffs.max_abs
        family = config.signal_family
        if family == "sinc":
            series = signals.SincSeries(coeffs)
            if config.sup_method == "certified":
                est = supbound.certified_supremum(series, config.epsilon, config.cell_budget)
            else:
                est = supbound.heuristic_supremum(series, config.points_per_unit)
            lower, upper = est.lower, est.upper
        elif family == "fourier_baseline":
            lower, upper = fourier_baseline_sup(coeffs)
        elif family == "bounded_kernel":
            lower, upper = bounded_kernel_sup(coeffs, config.points_per_unit or BUMP_DENSITY)
        else:
            proxy_max = float(np.max(np.abs(discrete.proxy(coeffs).X)))
            lower = upper = proxy_max
    except (ArithmeticError, ValueError, FloatingPointError, MemoryError) as exc:
        log.warning("trial n=%d index=%d failed: %s", n, trial, exc)
        lower = upper = float("nan")
    elapsed = time.perf_counter() - start if config.record_timing else None
    return TrialRecord(n, trial, seed, lower, upper, max_abs, proxy_max, elapsed)


def _canonical(records):
    return sorted(records, key=lambda r: (r.n, r.trial_index))


def run_sweep(config: ExperimentConfig, threads: int | None = None, resume: bool = True) -> list[TrialRecord]:
    """Run every (n, trial) task and return records sorted by (n, trial).

    With ``output_path`` set, finished trials are appended to
    ``records.partial.csv`` as they complete; a rerun skips the (n, trial)
    pairs already present there. On completion ``records.csv`` and
    ``sweep.json`` are written and the partial file is removed.
    """
    threads = threads or os.cpu_count() or 1
    tasks = [(n, i) for n in config.n_grid for i in range(config.trials_per_n)]
    done: dict[tuple[int, int], TrialRecord] = {}
    partial = None
    if config.output_path is not None:
        out_dir = config.output_path
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {out_dir}: {exc.strerror or exc}") from exc
        partial = out_dir / PARTIAL_CSV
        if resume and partial.exists():
            wanted = set(tasks)
            for rec in read_records_csv(partial):
                if (rec.n, rec.trial_index) in wanted:
                    done[(rec.n, rec.trial_index)] = rec
        else:
            _write_text(partial, ",".join(CSV_HEADER) + "\n")
    pending = [t for t in tasks if t not in done]

    lock = threading.Lock()

    def work(task):
        rec = run_trial(config, *task)
        if partial is not None:
            with lock, open(partial, "a", newline="") as fh:
                fh.write(",".join(rec.row()) + "\n")
        return rec

    if threads == 1 or len(pending) <= 1:
        fresh = [work(t) for t in pending]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fresh = list(pool.map(work, pending))
    records = _canonical(list(done.values()) + fresh)

    if config.output_path is not None:
        fits = sweep_fits(records)
        export(records, config.output_path / RECORDS_CSV, "csv")
        export(records, config.output_path / SWEEP_JSON, "json", fits=fits, config=config)
        partial.unlink(missing_ok=True)
    return records


# ---------------------------------------------------------------------------
# Statistics


def aggregate(records, n: int, field: str = "sup_lower") -> tuple[float, float, int]:
    """(mean, standard error, count) of ``field`` over the finite records at ``n``."""
    vals = np.array([getattr(r, field) for r in records if r.n == n], dtype=float)
    vals = vals[np.isfinite(vals)]
    if vals.size < 2:
        raise ValidationError(f"need at least 2 records at n={n}, found {vals.size}")
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size)), int(vals.size)


def mean_curve(records, field: str = "sup_lower") -> list[tuple[int, float, float]]:
    """(n, mean, standard error) for every n with at least two finite records."""
    out = []
    for n in sorted({r.n for r in records}):
        try:
            mean, se, _ = aggregate(records, n, field)
        except ValidationError:
            continue
        out.append((n, mean, se))
    return out


def regressor(model: str, n):
    n = np.asarray(n, dtype=float)
    if model == "sqrt_log":
        return np.sqrt(np.log(n))
    if model == "loglog":
        return np.log(np.log(n))
    if model == "sqrt_nlog":
        return np.sqrt(n * np.log(n))
    if model == "constant":
        return np.zeros_like(n)
    raise ValidationError(f"unknown model {model!r}; expected one of {MODELS}")


def fit_scaling(points, model: str) -> ScalingFit:
    """Unweighted least squares of mean = alpha * g(n) + beta."""
    pts = [(float(n), float(y)) for n, y in points]
    if len(pts) < 3:
        raise ValidationError("need at least 3 points")
    ns = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if np.any(ns < 16):
        raise ValidationError("fits need n >= 16")
    x = regressor(model, ns)
    ybar = ys.mean()
    tss = float(np.sum((ys - ybar) ** 2))
    if model == "constant":
        alpha, beta = 0.0, float(ybar)
    else:
        xbar = x.mean()
        sxx = float(np.sum((x - xbar) ** 2))
        if sxx <= 1e-12 * max(1.0, float(np.sum(x * x))):
            raise ValidationError("regressor has no variance over these n")
        alpha = float(np.sum((x - xbar) * (ys - ybar)) / sxx)
        beta = float(ybar - alpha * xbar)
    resid = ys - (alpha * x + beta)
    rss = float(np.sum(resid**2))
    if tss > 0:
        r2 = 1.0 - rss / tss
    else:
        r2 = 1.0 if rss <= 1e-24 else 0.0
    return ScalingFit(model, alpha, beta, float(min(1.0, max(0.0, r2))), rss, len(pts))


FLAT_TOLERANCE = 1e-3


def select_model(fits, flat_tolerance: float = FLAT_TOLERANCE) -> ScalingFit:
    """Pick the growth law that best explains a mean curve.

    If a ``constant`` fit is present and the means deviate from their
    average by a relative RMS of at most ``flat_tolerance``, the curve is
    flat and ``constant`` wins. Otherwise the smallest residual sum of
    squares wins, ties within 1e-12 going to the earlier entry of
    ``sqrt_log, loglog, sqrt_nlog, constant``.
    """
    fits = list(fits)
    if len(fits) < 2:
        raise ValidationError("need at least two fits to select from")
    for f in fits:
        if f.model == "constant" and f.n_points > 0:
            rel = math.sqrt(f.rss / f.n_points) / abs(f.beta) if f.beta != 0 else math.inf
            if rel <= flat_tolerance or f.rss <= 1e-24:
                return f
    best = min(f.rss for f in fits)
    tied = [f for f in fits if f.rss - best <= 1e-12]
    return min(tied, key=lambda f: MODELS.index(f.model))


def fit_all(points, models=MODELS) -> list[ScalingFit]:
    return [fit_scaling(points, m) for m in models]


def sweep_fits(records, field: str = "sup_lower") -> list[ScalingFit]:
    """Fits of every model to the mean curve, or [] with fewer than 3 usable n."""
    curve = mean_curve(records, field)
    if len(curve) < 3:
        return []
    points = [(n, m) for n, m, _ in curve]
    out = []
    for model in MODELS:
        try:
            out.append(fit_scaling(points, model))
        except ValidationError:
            continue
    return out


# ---------------------------------------------------------------------------
# Export


def records_csv_text(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def sweep_json_text(records, fits=(), config: ExperimentConfig | None = None) -> str:
    doc = {
        "config": config.describe() if config is not None else None,
        "records": [r.as_dict() for r in records],
        "fits": [f.as_dict() for f in fits],
    }
    return json.dumps(doc, indent=2) + "\n"


def _write_text(path: Path, text: str):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def export(items, path, format: str = "csv", fits=None, config: ExperimentConfig | None = None):
    """Write records (csv or json) or fits (json) to ``path``.

    ``items`` may be a list of :class:`TrialRecord` or of
    :class:`ScalingFit`; a list of fits is written as the ``fits`` array of
    the JSON document.
    """
    path = Path(path)
    items = list(items)
    is_fits = bool(items) and isinstance(items[0], ScalingFit)
    if format == "csv":
        if is_fits:
            raise ValidationError("fits are exported as json only")
        text = records_csv_text(items)
    elif format == "json":
        if is_fits:
            text = sweep_json_text([], items, config)
        else:
            text = sweep_json_text(items, fits or (), config)
    else:
        raise ValidationError(f"unknown export format {format!r}")
    _write_text(path, text)


def _record_from_fields(vals: dict) -> TrialRecord:
    return TrialRecord(
        n=int(vals["n"]),
        trial_index=int(vals["trial"]),
        seed=int(vals["seed"]),
        sup_lower=float(vals["sup_lower"]),
        sup_upper=float(vals["sup_upper"]),
        max_abs_coeff=float(vals["max_abs_coeff"]),
        proxy_max=_opt_float(vals["proxy_max"]) if isinstance(vals["proxy_max"], str) else vals["proxy_max"],
        wall_time=_opt_float(vals["wall_time_s"]) if isinstance(vals["wall_time_s"], str) else vals["wall_time_s"],
    )


def read_records_csv(path) -> list[TrialRecord]:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != CSV_HEADER:
                raise ValidationError(f"{path}: unexpected header {header}")
            out = []
            for row in reader:
                if len(row) != len(CSV_HEADER):
                    # a torn final line from an interrupted run
                    continue
                out.append(_record_from_fields(dict(zip(CSV_HEADER, row))))
            return out
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


def read_sweep_json(path) -> tuple[dict | None, list[TrialRecord], list[ScalingFit]]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    records = [_record_from_fields(r) for r in doc.get("records", [])]
    fits = [ScalingFit(**f) for f in doc.get("fits", [])]
    return doc.get("config"), records, fits


def read_records(path) -> list[TrialRecord]:
    """Records from a CSV export or the ``records`` array of a JSON export."""
    path = Path(path)
    if path.suffix == ".json":
        return read_sweep_json(path)[1]
    return read_records_csv(path)
