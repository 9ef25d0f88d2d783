"""
Gaussian versus bounded coefficients
====================================

With Gaussian coefficients the expected peak grows like sqrt(log n); with
bounded symmetric coefficients it grows only like log log n. This script
runs a small sweep of both and fits the candidate growth laws. The sizes
here finish in about a minute; the acceptance suite runs the full-size
version.
"""

from sincpeak import Gaussian, Rademacher
from sincpeak import experiments as ex

grid = tuple(2**j for j in range(8, 14))

for ensemble in (Gaussian(1.0), Rademacher()):
    cfg = ex.ExperimentConfig(ensemble, grid, trials_per_n=40, master_seed=1)
    records = ex.run_sweep(cfg)

    print(f"\n{ensemble.spec}")
    for n, mean, se in ex.mean_curve(records):
        print(f"  n = {n:5d}   E sup = {mean:.3f} +- {se:.3f}")

    fits = ex.sweep_fits(records)
    for fit in fits:
        print(f"  {fit.model:10s} alpha = {fit.alpha:8.4f}  beta = {fit.beta:7.3f}  rss = {fit.rss:.2e}")
    print("  selected:", ex.select_model(fits).model)

# With only 40 trials and n <= 2^13 the two slow laws are hard to tell
# apart; the ratio of the two curves still widens as n grows.
