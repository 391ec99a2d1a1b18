"""Monte Carlo verification of the cone-exponent identity sigma = kappa/4.

The package ties together four simulation engines: drifted Brownian
hitting times with an exact Laplace oracle, correlated planar Brownian
cone events, two-force-point Loewner evolution, and a log-correlated
boundary field with its multiplicative-chaos measure.  Each engine
exposes estimators whose power-law exponents are fit and compared with
closed-form predictions; the command line wires them into reproducible
experiments.
"""

from .boundary_gmc import (
    BoundaryFieldSampler,
    BoundaryGrid,
    WedgeSpec,
    estimate_joint_moment,
    find_x_delta,
    fit_moment_exponent,
    make_grid_for,
    moment_sandwich,
    quantum_boundary_measure,
    sample_boundary_field,
    tau_estimator_crosscheck,
)
from .cone_time import (
    ConeEventConfig,
    CorrelationSpec,
    cone_prob_grid,
    cone_prob_independent_theory,
    correlation_from_kappa,
    estimate_cone_prob,
    fit_cone_exponents,
    sigma_from_correlation,
)
from .exponent_stats import (
    ExponentFit,
    FitPoint,
    batch_means,
    loglog_fit,
    two_var_fit,
)
from .quantum_event import (
    QuantumEventConfig,
    consistency_split,
    direct_estimate,
    fit_quantum_exponent,
    quantum_theory_slope,
    rao_blackwell_estimate,
    sample_quantum_event,
)
from .rng import RandomStream
from .sle_loewner import (
    SleParams,
    estimate_event_prob,
    euclid_exponent_fit,
    initial_martingale,
    martingale_check,
)
from .stochastic_core import (
    estimate_laplace,
    laplace_theory,
    sample_bessel_ensemble,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryFieldSampler",
    "BoundaryGrid",
    "ConeEventConfig",
    "CorrelationSpec",
    "ExponentFit",
    "FitPoint",
    "QuantumEventConfig",
    "RandomStream",
    "SleParams",
    "WedgeSpec",
    "batch_means",
    "cone_prob_grid",
    "cone_prob_independent_theory",
    "consistency_split",
    "correlation_from_kappa",
    "direct_estimate",
    "estimate_cone_prob",
    "estimate_event_prob",
    "estimate_joint_moment",
    "estimate_laplace",
    "euclid_exponent_fit",
    "find_x_delta",
    "fit_cone_exponents",
    "fit_moment_exponent",
    "fit_quantum_exponent",
    "initial_martingale",
    "laplace_theory",
    "loglog_fit",
    "make_grid_for",
    "martingale_check",
    "moment_sandwich",
    "quantum_boundary_measure",
    "quantum_theory_slope",
    "rao_blackwell_estimate",
    "sample_bessel_ensemble",
    "sample_boundary_field",
    "sample_quantum_event",
    "sigma_from_correlation",
    "tau_estimator_crosscheck",
    "two_var_fit",
]
