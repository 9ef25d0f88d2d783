"""Discrete harmonic-weight proxies for the sinc series and their tail tools.

For coefficients ``a_1..a_n`` the proxy ``X_k`` weights ``a_i`` by
``1 / (|k - i| + 1)``, split into the backward part ``Y_k`` (``i <= k``)
and the forward part ``Z_k`` (``i > k``). Natural logarithms are used
throughout except for window lengths, which are measured in ``log2``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .errors import ValidationError
from .signals import CoefficientVector, _correlate_rows

BRUTE_FORCE_CAP = 24


def _values(a) -> np.ndarray:
    if isinstance(a, CoefficientVector):
        return a.values
    return CoefficientVector(a).values


@dataclass(frozen=True)
class ProxyVectors:
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray


@dataclass(frozen=True)
class TruncationParams:
    L: int
    M: float

    def __post_init__(self):
        if self.L < 2:
            raise ValidationError("L must be >= 2")
        if not self.M > 0:
            raise ValidationError("M must be positive")

    @classmethod
    def for_size(cls, n: int, M: float = 1.0) -> "TruncationParams":
        """L = round(ln n), at least 2 and at most n."""
        if n < 2:
            raise ValidationError("truncation needs n >= 2")
        return cls(min(n, max(2, round(math.log(n)))), M)


@functools.lru_cache(maxsize=32)
def _harmonic_spectra(n: int, size: int):
    """Spectra of 1/l (l = 1..n) and of the same weights with the l = 1 tap zeroed."""
    w = 1.0 / np.arange(1, n + 1)
    w2 = w.copy()
    w2[0] = 0.0
    out = sfft.rfft(w, size), sfft.rfft(w2, size)
    for x in out:
        x.setflags(write=False)
    return out


def proxy(a, method: str = "fft") -> ProxyVectors:
    """X, Y, Z for the coefficient vector ``a``.

    ``method="direct"`` evaluates the defining sums in O(n^2);
    ``method="fft"`` uses two FFT convolutions with cached kernel spectra.
    """
    v = _values(a)
    n = v.size
    if method == "direct":
        Y = np.empty(n)
        Z = np.empty(n)
        for k in range(1, n + 1):
            l = np.arange(1, k + 1)
            Y[k - 1] = np.sum(v[k - l] / l)  # a_{k-l+1}
            l = np.arange(2, n - k + 2)
            Z[k - 1] = np.sum(v[l + k - 2] / l)  # a_{l+k-1}
    elif method == "fft":
        size = sfft.next_fast_len(2 * n - 1, real=True)
        back, fwd = _harmonic_spectra(n, size)
        Y = sfft.irfft(sfft.rfft(v, size) * back, size)[:n]
        # Z_k = sum_{j>=1} a_{k+j} / (j+1): a causal filter on the reversed sequence.
        Z = sfft.irfft(sfft.rfft(v[::-1], size) * fwd, size)[:n][::-1]
    else:
        raise ValidationError(f"unknown method {method!r}")
    return ProxyVectors(Y + Z, Y, Z)


def truncated_Y(a, k: int, L: int) -> float:
    """Sum over l = L+1..k of a_{k-l+1} / l."""
    v = _values(a)
    if not (2 <= L < k <= v.size):
        raise ValidationError("need 2 <= L < k <= n")
    l = np.arange(L + 1, k + 1)
    return float(np.sum(v[k - l] / l))


def head_Y(a, k: int, L: int) -> float:
    """Sum over l = 1..min(k, L) of a_{k-l+1} / l (the part removed by truncation)."""
    v = _values(a)
    l = np.arange(1, min(k, L) + 1)
    return float(np.sum(v[k - l] / l))


def truncation_bound(L: int, M: float) -> float:
    """M (1 + ln L): bounds |Y_k| for every k <= L when |a_i| <= M."""
    if L < 2:
        raise ValidationError("L must be >= 2")
    if M < 0:
        raise ValidationError("M must be non-negative")
    return M * (1.0 + math.log(L))


def hoeffding_tail(L: int, t: float, M: float) -> float:
    """2 exp(-L t^2 / (2 M^2)), capped at 1; bounds P(|Y^L_k| > t)."""
    if not t > 0:
        raise ValidationError("t must be positive")
    if not M > 0:
        raise ValidationError("M must be positive")
    return min(1.0, 2.0 * math.exp(-L * t * t / (2.0 * M * M)))


def conditional_sign_expectation(b, k: int) -> float:
    """E sum_i eps_i b_i for signs uniform over patterns with exactly k plus signs."""
    b = np.asarray(b, dtype=float)
    p = b.size
    if not 1 <= k <= p:
        raise ValidationError("need 1 <= k <= p")
    return (2 * k - p) / p * float(np.sum(b))


def brute_force_sign_expectation(b, k: int) -> float:
    """Average of sum_i eps_i b_i over all C(p, k) sign patterns."""
    b = np.asarray(b, dtype=float)
    p = b.size
    if p > BRUTE_FORCE_CAP:
        raise ValidationError(f"enumeration is capped at p = {BRUTE_FORCE_CAP}")
    if not 1 <= k <= p:
        raise ValidationError("need 1 <= k <= p")
    eps = _sign_patterns(p, k)
    return float(np.mean(eps @ b))


@functools.lru_cache(maxsize=64)
def _sign_patterns(p: int, k: int) -> np.ndarray:
    """All +-1 vectors of length p with exactly k plus signs, one per row."""
    plus = np.array(list(itertools.combinations(range(p), k)), dtype=np.intp)
    eps = -np.ones((plus.shape[0], p))
    np.put_along_axis(eps, plus, 1.0, axis=1)
    eps.setflags(write=False)
    return eps


def window_sum_statistic(signs, window_len: int) -> tuple[int, int]:
    """Largest sum over the disjoint windows [j w, (j+1) w) and the start j w
    of the first window attaining it (0-based)."""
    s = np.asarray(signs)
    w = int(window_len)
    if not 1 <= w <= s.size:
        raise ValidationError("need 1 <= window_len <= len(signs)")
    J = s.size // w
    sums = s[: J * w].reshape(J, w).sum(axis=1)
    j = int(np.argmax(sums))
    return int(sums[j]), j * w


def log2_window(n: int) -> int:
    """floor(log2 n), the natural window length for n signs."""
    return max(1, int(math.floor(math.log2(n))))


def proxy_grid(a, offset: float) -> np.ndarray:
    """sum_{k != l} a_k / |l + offset - k| for l = -n..2n (FFT correlation)."""
    v = _values(a)
    if not 0.0 < offset < 1.0:
        raise ValidationError("offset must lie strictly inside (0, 1)")
    n = v.size
    return _correlate_rows(v, [offset], -n, 2 * n, absolute=True, drop_zero=True)[:, 0]


def proxy_grid_direct(a, offset: float) -> np.ndarray:
    v = _values(a)
    if not 0.0 < offset < 1.0:
        raise ValidationError("offset must lie strictly inside (0, 1)")
    n = v.size
    l = np.arange(-n, 2 * n + 1)[:, None]
    k = np.arange(1, n + 1)[None, :]
    w = np.where(l == k, 0.0, 1.0 / np.abs(l + offset - k))
    return w @ v
