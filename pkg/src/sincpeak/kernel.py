"""The sinc kernel sin(pi t)/(pi t), its derivatives, and derivative envelopes.

All functions accept scalars or numpy arrays and return the same shape.
``sin(pi t)`` is evaluated after reducing ``t`` to ``[-1/2, 1/2]`` so that
the kernel vanishes exactly at nonzero integers and large arguments keep
full relative accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError

# Taylor zone for sinc itself; the degree-4 remainder is below 1e-30 there.
TAYLOR_RADIUS = 1e-6
# Closed-form derivative loses digits to cancellation as t -> 0, so the
# derivative switches to its series on a wider zone (remainder < 1e-20).
DERIVATIVE_TAYLOR_RADIUS = 1e-2
NEAR_RADIUS = 0.5
ENVELOPE_INFLATION = 1.0 + 1e-12

PI = np.pi
PI2 = PI * PI


def _as_finite(t):
    x = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("kernel argument must be finite")
    return x


def _pi_trig(x):
    """Return (sin(pi x), cos(pi x)) with argument reduction to [-1/2, 1/2]."""
    m = np.round(x)
    r = x - m
    sign = 1.0 - 2.0 * np.mod(m, 2.0)
    return sign * np.sin(PI * r), sign * np.cos(PI * r)


def _unwrap(out, scalar):
    return float(out[0]) if scalar else out


def sinc(t):
    """Normalized sinc, equal to 1 at t = 0."""
    x = _as_finite(t)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    s, _ = _pi_trig(x)
    near = np.abs(x) < TAYLOR_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        out = s / (PI * x)
    if near.any():
        u = (PI * x[near]) ** 2
        out[near] = 1.0 - u / 6.0 + u * u / 120.0
    return _unwrap(out, scalar)


def sinc_derivative(t):
    """d/dt sinc(t) = (pi t cos(pi t) - sin(pi t)) / (pi t^2)."""
    x = _as_finite(t)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    s, c = _pi_trig(x)
    near = np.abs(x) < DERIVATIVE_TAYLOR_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (PI * x * c - s) / (PI * x * x)
    if near.any():
        y = x[near]
        y2 = y * y
        out[near] = y * (
            -PI2 / 3.0
            + y2 * (PI2**2 / 30.0 + y2 * (-(PI2**3) / 840.0 + y2 * PI2**4 / 45360.0))
        )
    return _unwrap(out, scalar)


def sinc_second_derivative(t):
    """d^2/dt^2 sinc(t), used by the tightened cell bounds in :mod:`supbound`."""
    x = _as_finite(t)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    s, c = _pi_trig(x)
    near = np.abs(x) < DERIVATIVE_TAYLOR_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -PI * s / x - 2.0 * c / (x * x) + 2.0 * s / (PI * x**3)
    if near.any():
        y2 = x[near] ** 2
        out[near] = -PI2 / 3.0 + y2 * (
            PI2**2 / 10.0 + y2 * (-(PI2**3) / 168.0 + y2 * PI2**4 / 6480.0)
        )
    return _unwrap(out, scalar)


def far_envelope(r):
    """1/r + 1/(pi r^2): dominates |sinc'| at every |x| >= r > 0."""
    r = np.asarray(r, dtype=float)
    return 1.0 / r + 1.0 / (PI * r * r)


def _dense_near_bound(samples: int = 10**6, inflation: float = 1.05) -> float:
    grid = np.linspace(0.0, NEAR_RADIUS, samples)
    return float(np.max(np.abs(sinc_derivative(grid))) * inflation)


@dataclass(frozen=True)
class KernelEnvelope:
    """Certified bound on |sinc'| split into a near zone and a far form.

    Inside ``|t| <= near_radius`` the constant ``near_derivative_bound``
    applies; outside, ``1/|t| + 1/(pi t^2)`` evaluated at the smallest
    admissible ``|t|``.
    """

    near_radius: float
    near_derivative_bound: float

    def __post_init__(self):
        if not 0.0 < self.near_radius <= 0.5:
            raise ValidationError("near_radius must lie in (0, 1/2]")

    def __call__(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if np.any(lo > hi):
            raise ValidationError("envelope interval must satisfy lo <= hi")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise DomainError("envelope interval endpoints must be finite")
        R = self.near_radius
        # Smallest |x| over the interval.
        closest = np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))
        touches_near = closest < R
        spills_out = (lo < -R) | (hi > R)
        far = far_envelope(np.maximum(closest, R))
        out = np.where(
            touches_near,
            np.where(spills_out, np.maximum(self.near_derivative_bound, far), self.near_derivative_bound),
            far,
        )
        out = out * ENVELOPE_INFLATION
        return float(out) if out.ndim == 0 else out


DEFAULT_ENVELOPE = KernelEnvelope(NEAR_RADIUS, _dense_near_bound())


def derivative_envelope(lo, hi, envelope: KernelEnvelope = DEFAULT_ENVELOPE):
    """Upper bound on |sinc'(x)| for x in [lo, hi] (vectorized over intervals)."""
    return envelope(lo, hi)


# |sinc''| <= pi^2/3 everywhere (its spectrum lives on [-1/2, 1/2]).
SECOND_DERIVATIVE_GLOBAL = PI2 / 3.0


def second_derivative_envelope(lo, hi):
    """Upper bound on |sinc''(x)| for x in [lo, hi] (vectorized).

    Far from the origin ``pi/r + 2/r^2 + 2/(pi r^3)`` dominates; it is
    capped by the global bound ``pi^2/3``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    closest = np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))
    with np.errstate(divide="ignore", over="ignore"):
        far = PI / closest + 2.0 / closest**2 + 2.0 / (PI * closest**3)
    out = np.minimum(far, SECOND_DERIVATIVE_GLOBAL) * ENVELOPE_INFLATION
    return float(out) if out.ndim == 0 else out
