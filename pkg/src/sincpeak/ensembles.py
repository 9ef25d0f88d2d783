"""Seeded, platform-independent sampling of symmetric coefficient laws.

Random words come from the SplitMix64 generator used in counter mode:
draw ``i`` of stream ``seed`` is ``mix64(seed + (i + 1) * GOLDEN)`` where
``mix64`` is the SplitMix64 finalizer (Steele, Lea & Flood, 2014)::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

All arithmetic is on unsigned 64-bit integers, so streams are bit-identical
on every platform and for any evaluation order. Uniforms use the top 52
bits, ``u = ((z >> 12) + 1/2) / 2^52``, which stays inside the open
interval (0, 1) after rounding, and normals use the inverse CDF with
Acklam's rational approximation (relative error below 1.2e-9), which needs
only ``log``, ``sqrt`` and arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .signals import CoefficientVector

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
# Odd multipliers folding n and the trial index into the seed.
_N_SALT = 0xD6E8FEB86659FD93
_TRIAL_SALT = 0xA0761D6478BD642F


def mix64(z):
    """SplitMix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def random_words(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Words ``start .. start + count - 1`` of the stream keyed by ``seed``."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN)
    return mix64(z)


def words_to_uniform(words: np.ndarray) -> np.ndarray:
    return ((words >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52


def _u64(v):
    if np.ndim(v) == 0:
        return np.uint64(int(v) & MASK64)
    return np.asarray(v).astype(np.uint64)


def derive_trial_seed(master_seed, n, trial_index):
    """Seed for trial ``trial_index`` at size ``n`` of a sweep.

    ``mix64(mix64(mix64(master + GOLDEN) ^ n * N_SALT) ^ (trial + 1) * TRIAL_SALT)``.
    Accepts scalars or equal-shape integer arrays.
    """
    scalar = np.ndim(master_seed) == 0 and np.ndim(n) == 0 and np.ndim(trial_index) == 0
    s, nn, tt = (_u64(v) for v in (master_seed, n, trial_index))
    with np.errstate(over="ignore"):
        h = mix64(s + np.uint64(GOLDEN))
        h = mix64(h ^ (nn * np.uint64(_N_SALT)))
        h = mix64(h ^ ((tt + np.uint64(1)) * np.uint64(_TRIAL_SALT)))
    return int(h) if scalar else h


# Acklam's coefficients for the inverse normal CDF.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def normal_quantile(u: np.ndarray) -> np.ndarray:
    """Inverse standard normal CDF for u in (0, 1) (Acklam's approximation)."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    low = u < _P_LOW
    high = u > 1.0 - _P_LOW
    mid = ~(low | high)

    q = u[mid] - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    out[mid] = num / den

    def tail(p):
        q = np.sqrt(-2.0 * np.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return num / den

    out[low] = tail(u[low])
    out[high] = -tail(1.0 - u[high])
    return out


@dataclass(frozen=True)
class Gaussian:
    sigma: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValidationError("Gaussian sigma must be a positive finite number")

    @property
    def spec(self) -> str:
        return f"gaussian:sigma={self.sigma!r}"


@dataclass(frozen=True)
class Rademacher:
    @property
    def spec(self) -> str:
        return "rademacher"


BOUNDED_SHAPES = ("uniform", "scaled_rademacher", "two_point_mixture")


@dataclass(frozen=True)
class BoundedSymmetric:
    """Symmetric law with |a| <= M and E|a| >= m.

    Shapes:

    * ``uniform`` -- uniform on [-M, M], E|a| = M/2;
    * ``scaled_rademacher`` -- +-M with equal probability, E|a| = M;
    * ``two_point_mixture`` -- magnitude M or m with probability 1/2 each and
      an independent fair sign, E|a| = (M + m)/2.
    """

    M: float = 1.0
    m: float = 0.5
    shape: str = "uniform"

    def __post_init__(self):
        if self.shape not in BOUNDED_SHAPES:
            raise ValidationError(f"unknown bounded shape {self.shape!r}; expected one of {BOUNDED_SHAPES}")
        if not (np.isfinite(self.M) and self.M > 0):
            raise ValidationError("M must be positive and finite")
        if not (0 < self.m <= self.M):
            raise ValidationError("m must lie in (0, M]")
        if self.mean_abs < self.m:
            raise ValidationError(
                f"{self.shape} law on [-M, M] has E|a| = {self.mean_abs!r} < m = {self.m!r}"
            )

    @property
    def mean_abs(self) -> float:
        return {
            "uniform": self.M / 2.0,
            "scaled_rademacher": self.M,
            "two_point_mixture": (self.M + self.m) / 2.0,
        }[self.shape]

    @property
    def spec(self) -> str:
        return f"bounded:M={self.M!r},m={self.m!r},shape={self.shape}"


Ensemble = Gaussian | Rademacher | BoundedSymmetric


def _signs(words: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * (words >> np.uint64(63)).astype(np.float64)


def sample(ensemble: Ensemble, n: int, seed: int) -> CoefficientVector:
    """n independent draws from ``ensemble``; a pure function of its arguments."""
    n = int(n)
    if n < 1:
        raise ValidationError("n must be >= 1")
    words = random_words(int(seed), n)
    if isinstance(ensemble, Rademacher):
        vals = _signs(words)
    elif isinstance(ensemble, Gaussian):
        vals = ensemble.sigma * normal_quantile(words_to_uniform(words))
    elif isinstance(ensemble, BoundedSymmetric):
        if ensemble.shape == "uniform":
            vals = ensemble.M * (2.0 * words_to_uniform(words) - 1.0)
        elif ensemble.shape == "scaled_rademacher":
            vals = ensemble.M * _signs(words)
        else:
            big = ((words >> np.uint64(62)) & np.uint64(1)).astype(bool)
            vals = _signs(words) * np.where(big, ensemble.M, ensemble.m)
    else:
        raise ValidationError(f"unsupported ensemble {ensemble!r}")
    return CoefficientVector(vals)


def parse_ensemble(text: str) -> Ensemble:
    """Parse ``gaussian[:sigma=S]``, ``rademacher`` or ``bounded[:M=..,m=..,shape=..]``."""
    name, _, rest = text.strip().partition(":")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise ValidationError(f"malformed ensemble parameter {item!r}")
        params[key.strip()] = val.strip()
    name = name.strip().lower()
    try:
        if name == "gaussian":
            _only(params, {"sigma"})
            return Gaussian(float(params.get("sigma", 1.0)))
        if name == "rademacher":
            _only(params, set())
            return Rademacher()
        if name == "bounded":
            _only(params, {"M", "m", "shape"})
            M = float(params.get("M", 1.0))
            shape = params.get("shape", "uniform")
            default_m = M if shape == "scaled_rademacher" else M / 2.0
            return BoundedSymmetric(M, float(params.get("m", default_m)), shape)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad ensemble parameter in {text!r}: {exc}") from None
    raise ValidationError(f"unknown ensemble {name!r}")


def _only(params, allowed):
    extra = set(params) - allowed
    if extra:
        raise ValidationError(f"unknown ensemble parameters: {sorted(extra)}")
