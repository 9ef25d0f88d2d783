"""Suprema of random sinc series: evaluation, certified bounds and sweeps."""

from .errors import DomainError, ValidationError
from .kernel import sinc, sinc_derivative, sinc_second_derivative
from .signals import CoefficientVector, FourierBaseline, SincSeries, evaluate, evaluate_offset_grid
from .ensembles import BoundedSymmetric, Gaussian, Rademacher, derive_trial_seed, parse_ensemble, sample
from .supbound import (
    SupEstimate,
    certified_supremum,
    half_integer_lower_bound,
    heuristic_supremum,
    paper_grid_upper_bound,
)
from .discrete import proxy, hoeffding_tail, conditional_sign_expectation
from .experiments import (
    ExperimentConfig,
    ScalingFit,
    TrialRecord,
    aggregate,
    export,
    fit_scaling,
    run_sweep,
    select_model,
)

__version__ = "0.1.0"
