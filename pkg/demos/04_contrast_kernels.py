"""
What the sinc kernel is contrasted with
=======================================

Two neighbours of the sinc series behave very differently. A cosine system
on [0, 1] with random signs peaks like sqrt(n log n). A series built from
an integrable bump, here exp(-t^2), never exceeds a fixed multiple of
max|a_k|.
"""

import math

import numpy as np

from sincpeak import Rademacher, sample, signals

for n in (64, 256, 1024, 4096):
    a = sample(Rademacher(), n, seed=n)
    cos_peak = np.abs(signals.fourier_grid(signals.FourierBaseline(a), 32 * n)).max()
    bump_peak = np.abs(signals.bump_series_grid(a, 32)).max()
    print(f"n = {n:5d}  cosine peak / sqrt(n ln n) = {cos_peak / math.sqrt(n * math.log(n)):.3f}"
          f"   bump peak = {bump_peak:.6f}")

print(f"bump bound C max|a| = {signals.bounded_kernel_sup_bound([1.0]):.6f}")
