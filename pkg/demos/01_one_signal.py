"""
Bracketing the peak of one sinc series
======================================

A random coefficient vector defines f(t) = sum_k a_k sinc(t - k). Its
supremum over the real line is attained on [-n, 2n], and can be bracketed
by cheap bounds or enclosed to any tolerance by branch and bound.
"""

import numpy as np

from sincpeak import Rademacher, SincSeries, sample
from sincpeak import certified_supremum, half_integer_lower_bound, heuristic_supremum, paper_grid_upper_bound

# Draw 64 random signs. The same seed always gives the same vector.
a = sample(Rademacher(), 64, seed=7)
f = SincSeries(a)

# The series interpolates its coefficients at the integers.
print("f(1..5)  =", np.round(f(np.arange(1, 6)), 12))
print("a_1..a_5 =", a.values[:5])

# Between the integers it can exceed max|a_k| = 1.
t = np.linspace(-64, 128, 20001)
print(f"max |f| on a coarse grid: {np.abs(f(t)).max():.6f}")

# Cheap bracket: half-integer samples from below, a grid plus slack from above.
print(f"half-integer lower bound: {half_integer_lower_bound(f):.6f}")
print(f"grid upper bound:         {paper_grid_upper_bound(f):.6f}")

# Certified enclosure, gap at most 1e-9.
est = certified_supremum(f, epsilon=1e-9)
print(f"certified: [{est.lower:.12f}, {est.upper:.12f}] at t = {est.witness:.6f} "
      f"after {est.cells_processed} cells")

# The heuristic search is what large sweeps use; it returns the same peak here.
fast = heuristic_supremum(f)
print(f"heuristic: {fast.lower:.12f}")
