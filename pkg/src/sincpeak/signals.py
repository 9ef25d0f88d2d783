"""Signal models built from random coefficient vectors.

* :class:`SincSeries` -- ``f(t) = sum_k a_k sinc(t - k)`` for ``k = 1..n``.
* :class:`FourierBaseline` -- ``sum_k a_k sqrt(2) cos(2 pi k t)`` on ``[0, 1]``.
* the Gaussian-bump contrast ``sum_k a_k exp(-(t - k)^2)``.

Whole rows of the sinc series at a fixed fractional offset are computed by
FFT correlation; :func:`evaluate` is the pointwise reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft

from . import kernel
from .errors import DomainError, ValidationError

_CHUNK = 1 << 22  # max matrix entries materialized by pointwise evaluation


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Coefficients a_1..a_n of one signal realization."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size < 1:
            raise ValidationError("coefficient vector must be non-empty")
        if not np.all(np.isfinite(v)):
            raise ValidationError("coefficients must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)


def _coeffs(a) -> CoefficientVector:
    return a if isinstance(a, CoefficientVector) else CoefficientVector(a)


@dataclass(frozen=True)
class SincSeries:
    coefficients: CoefficientVector

    def __init__(self, coefficients):
        object.__setattr__(self, "coefficients", _coeffs(coefficients))

    @property
    def a(self) -> np.ndarray:
        return self.coefficients.values

    @property
    def n(self) -> int:
        return self.coefficients.n

    def __call__(self, t):
        return evaluate(self, t)


@dataclass(frozen=True)
class FourierBaseline:
    """Orthonormal cosine system sqrt(2) cos(2 pi k t) on [0, 1]."""

    coefficients: CoefficientVector

    def __init__(self, coefficients):
        object.__setattr__(self, "coefficients", _coeffs(coefficients))


def _finite_points(t):
    x = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("evaluation point must be finite")
    return x


def _kernel_sum(series: SincSeries, t, fn):
    x = _finite_points(t)
    scalar = x.ndim == 0
    pts = np.atleast_1d(x).reshape(-1)
    a = series.a
    k = np.arange(1, series.n + 1, dtype=float)
    out = np.empty(pts.size)
    step = max(1, _CHUNK // series.n)
    for s in range(0, pts.size, step):
        block = pts[s : s + step]
        out[s : s + step] = fn(block[:, None] - k[None, :]) @ a
    if scalar:
        return float(out[0])
    return out.reshape(x.shape)


def evaluate(series: SincSeries, t):
    """Pointwise ``sum_k a_k sinc(t - k)``; ``t`` may be an array."""
    return _kernel_sum(series, t, kernel.sinc)


def evaluate_derivative(series: SincSeries, t):
    return _kernel_sum(series, t, kernel.sinc_derivative)


def evaluate_second_derivative(series: SincSeries, t):
    return _kernel_sum(series, t, kernel.sinc_second_derivative)


def _near_split(series: SincSeries, tb: np.ndarray):
    """Reciprocals 1/(t - k) with the two shifts nearest to t zeroed out."""
    n = series.n
    k = np.arange(1, n + 1, dtype=float)
    l = np.floor(tb)
    with np.errstate(divide="ignore"):
        inv = 1.0 / (tb[:, None] - k[None, :])
    rows = np.arange(tb.size)
    for off in (0.0, 1.0):
        idx = l + off
        ok = (idx >= 1) & (idx <= n)
        inv[rows[ok], idx[ok].astype(int) - 1] = 0.0
    return l, tb - l, inv


def _add_near(series: SincSeries, tb, l, vals, slopes=None):
    a = series.a
    for off in (0.0, 1.0):
        idx = l + off
        ok = (idx >= 1) & (idx <= series.n)
        if ok.any():
            xi = tb[ok] - idx[ok]
            ai = a[idx[ok].astype(int) - 1]
            vals[ok] += ai * kernel.sinc(xi)
            if slopes is not None:
                slopes[ok] += ai * kernel.sinc_derivative(xi)


def _alternating(series: SincSeries) -> np.ndarray:
    return series.a * (1.0 - 2.0 * (np.arange(1, series.n + 1) % 2))


def evaluate_with_slope(series: SincSeries, t, slopes: bool = True):
    """Return ``(f(t), f'(t))`` for a 1-d array of points.

    Writing ``t = l + tau`` with integer ``l``, every far shift satisfies
    ``sin(pi (t - k)) = (-1)^l (-1)^k sin(pi tau)``, so only the reciprocals
    ``1/(t - k)`` and their squares are needed; the two shifts nearest to
    ``t`` go through the kernel directly. With ``slopes=False`` only the
    values are computed and ``None`` is returned in place of the slopes.
    """
    pts = np.atleast_1d(_finite_points(t)).astype(float).reshape(-1)
    b = _alternating(series)
    vals = np.empty(pts.size)
    der = np.empty(pts.size) if slopes else None
    step = max(1, _CHUNK // series.n)
    for s in range(0, pts.size, step):
        tb = pts[s : s + step]
        l, tau, inv = _near_split(series, tb)
        sign = 1.0 - 2.0 * np.mod(l, 2.0)
        s1 = sign * (inv @ b)
        sin_tau = np.sin(np.pi * tau)
        v = sin_tau / np.pi * s1
        if slopes:
            s2 = sign * ((inv * inv) @ b)
            d = np.cos(np.pi * tau) * s1 - sin_tau / np.pi * s2
            _add_near(series, tb, l, v, d)
            der[s : s + step] = d
        else:
            _add_near(series, tb, l, v)
        vals[s : s + step] = v
    return vals, der


# ---------------------------------------------------------------------------
# Fast rows at fixed fractional offset.
#
# With t = l + tau and integer l, k:
#   sinc(l + tau - k) = (-1)^(l-k) sin(pi tau) / (pi (l - k + tau)),
# so row tau of the grid is (sin(pi tau)/pi) (-1)^l (b * h_tau)[l] with
# b_k = (-1)^k a_k and h_tau[j] = 1 / (j + tau): one correlation per offset.


@lru_cache(maxsize=128)
def _reciprocal_spectrum(n: int, lo: int, hi: int, tau: float, size: int, absolute: bool, drop_zero: bool):
    j = np.arange(lo - n, hi, dtype=float)  # all l - k for l in [lo, hi], k in [1, n]
    d = j + tau
    if absolute:
        d = np.abs(d)
    h = 1.0 / d
    if drop_zero:
        h[j == 0] = 0.0
    spec = sfft.rfft(h, size)
    spec.setflags(write=False)
    return spec


def _correlate_rows(b: np.ndarray, offsets, lo: int, hi: int, absolute=False, drop_zero=False):
    """Rows ``c[l] = sum_k b_k h(l - k + tau)`` for l in [lo, hi], one per offset."""
    n = b.size
    span = hi - lo + 1
    size = sfft.next_fast_len(span + n - 1, real=True)
    bspec = sfft.rfft(b, size)
    out = np.empty((span, len(offsets)))
    for col, tau in enumerate(offsets):
        hspec = _reciprocal_spectrum(n, lo, hi, float(tau), size, absolute, drop_zero)
        full = sfft.irfft(bspec * hspec, size)
        # h index m = l - k - (lo - n); with k = i + 1 the output index is l - lo + n - 1.
        out[:, col] = full[n - 1 : n - 1 + span]
    return out


def _check_offsets(offsets):
    off = np.atleast_1d(np.asarray(offsets, dtype=float))
    if off.ndim != 1 or off.size == 0:
        raise ValidationError("offsets must be a non-empty 1-d sequence")
    if np.any(off <= 0.0) or np.any(off >= 1.0):
        raise ValidationError("fractional offsets must lie strictly inside (0, 1)")
    return off


def evaluate_offset_grid(series: SincSeries, fractional_offsets, integer_range=None) -> np.ndarray:
    """Matrix ``G[i, r] = f(l_i + offset_r)`` for integers ``l_i`` in ``integer_range``.

    ``integer_range`` is an inclusive ``(lo, hi)`` pair, default ``(-n, 2n)``.
    """
    off = _check_offsets(fractional_offsets)
    n = series.n
    lo, hi = integer_range if integer_range is not None else (-n, 2 * n)
    lo, hi = int(lo), int(hi)
    if hi < lo:
        raise ValidationError("integer_range must satisfy lo <= hi")
    rows = _correlate_rows(_alternating(series), off, lo, hi)
    sign_l = 1.0 - 2.0 * (np.arange(lo, hi + 1) % 2)
    scale = np.sin(np.pi * off) / np.pi
    return rows * sign_l[:, None] * scale[None, :]


def evaluate_offset_grid_direct(series: SincSeries, fractional_offsets, integer_range=None) -> np.ndarray:
    """Pointwise reference for :func:`evaluate_offset_grid`."""
    off = _check_offsets(fractional_offsets)
    n = series.n
    lo, hi = integer_range if integer_range is not None else (-n, 2 * n)
    ls = np.arange(int(lo), int(hi) + 1, dtype=float)
    return evaluate(series, ls[:, None] + off[None, :])


def evaluate_fourier(baseline: FourierBaseline, t):
    x = _finite_points(t)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("Fourier baseline is defined on [0, 1]")
    a = baseline.coefficients.values
    k = np.arange(1, a.size + 1, dtype=float)
    vals = np.sqrt(2.0) * (np.cos(2.0 * np.pi * np.multiply.outer(x, k)) @ a)
    return float(vals) if np.ndim(vals) == 0 else vals


def fourier_grid(baseline: FourierBaseline, points: int) -> np.ndarray:
    """Values at t = j/points, j = 0..points-1, via one FFT (points > n)."""
    a = baseline.coefficients.values
    if points <= a.size:
        raise ValidationError("grid must have more points than coefficients")
    padded = np.zeros(points)
    padded[1 : a.size + 1] = a
    return np.sqrt(2.0) * sfft.rfft(padded).real.take(
        np.minimum(np.arange(points), points - np.arange(points))
    )


# ---------------------------------------------------------------------------
# Integrable contrast kernel g(t) = exp(-t^2).

BUMP_RADIUS = 10  # exp(-100) < 1e-43


def bump(t):
    return np.exp(-np.square(t))


def bump_lattice_constant(samples: int = 4097) -> float:
    """sup over t in [0, 1) of sum_{|k| <= 10} exp(-(k + t)^2).

    By Poisson summation the periodized Gaussian is a cosine series with
    positive coefficients, so the supremum sits at t = 0; the grid
    includes it and checks the claim.
    """
    t = np.linspace(0.0, 1.0, samples, endpoint=False)
    k = np.arange(-BUMP_RADIUS, BUMP_RADIUS + 1)
    sums = bump(t[:, None] + k[None, :]).sum(axis=1)
    return float(np.max(sums))


BUMP_CONSTANT = bump_lattice_constant()


def bounded_kernel_sup_bound(coefficients) -> float:
    """C * max|a_k|, a certified bound on sup_t |sum_k a_k exp(-(t - k)^2)|."""
    c = _coeffs(coefficients)
    return BUMP_CONSTANT * (1.0 + 1e-12) * c.max_abs


def bump_series_grid(coefficients, points_per_unit: int) -> np.ndarray:
    """Bump series at l + r/ppu, rows l = 1 - 10 .. n + 10, columns r = 0..ppu-1."""
    a = _coeffs(coefficients).values
    ppu = int(points_per_unit)
    j = np.arange(-BUMP_RADIUS, BUMP_RADIUS + 1)
    # value at l + tau = sum_j a_{l-j} g(j + tau); full convolution index is l - 1 + 10
    cols = [np.convolve(a, bump(j + r / ppu), mode="full") for r in range(ppu)]
    return np.stack(cols, axis=1)
