"""
The harmonic-weight proxy
=========================

Sampling the sinc series halfway between integers turns it, up to signs and
bounded error, into the discrete sums X_k = sum_i a_i / (|k - i| + 1). This
script looks at X, its truncated tail and the sign-window mechanism behind
the log log n lower bound.
"""

import math

import numpy as np

from sincpeak import Rademacher, derive_trial_seed, sample
from sincpeak import discrete

a = sample(Rademacher(), 2**16, seed=3)
pv = discrete.proxy(a)
print(f"max |X_k| = {np.abs(pv.X).max():.3f}, 4 ln ln n = {4 * math.log(math.log(a.n)):.3f}")

# Y_k splits into a head of L terms, bounded by M (1 + ln L), and a tail
# that concentrates.
n, L = 10_000, 100
print(f"head bound M(1 + ln L) = {discrete.truncation_bound(L, 1.0):.3f}")
tails = np.array([
    discrete.truncated_Y(sample(Rademacher(), n, derive_trial_seed(0, n, i)), n, L)
    for i in range(2000)
])
for t in (0.1, 0.2, 0.3):
    print(f"P(|tail| > {t}) ~ {np.mean(np.abs(tails) > t):.4f}   Hoeffding: {discrete.hoeffding_tail(L, t, 1.0):.4f}")

# Conditioning on how many signs are positive shifts the mean linearly.
b = np.array([1.0, 0.5, 0.25, 0.125])
for k in range(1, 5):
    print(f"k = {k}: E sum eps_i b_i = {discrete.conditional_sign_expectation(b, k):+.4f} "
          f"(enumerated {discrete.brute_force_sign_expectation(b, k):+.4f})")

# Among n/log2(n) disjoint windows of length log2(n) some window is biased.
signs = sample(Rademacher(), 2**20, seed=5).values
w = discrete.log2_window(signs.size)
best, start = discrete.window_sum_statistic(signs, w)
print(f"best window of length {w} starts at {start} with sum {best}")
