"""Numerical laboratory for the random field Curie-Weiss model.

Exact finite-size magnetization laws, free-energy landscape analysis with
minima classification and phase assignment, large/moderate deviation rate
functions, a seeded Glauber sampler, and experiment runners that check the
model's limit theorems at desk scale.
"""

from ._kernels import DISABLE_ENV, NUMBA_ENABLED
from .exact import (
    HSDensity,
    LogPMF,
    exact_log_pmf,
    gaussian_convolve,
    hs_log_density,
    interval_log_prob,
)
from .fields import (
    FieldDistribution,
    FieldRealization,
    expect_lncosh,
    expect_tanh_poly,
    make_distribution,
    sample_fields,
)
from .gfunction import (
    GFunction,
    MinimumInfo,
    PhaseClassification,
    classify_minimum,
    classify_phase,
    find_minima,
    g_deriv,
    q_polynomial,
)
from .glauber import ChainConfig, EmpiricalPMF, empirical_pmf, run_chains, run_glauber
from .rates import RateSpec, ScalingInfo, hs_rate, ldp_rate, mdp_rate, scaling
from .verify import (
    VerificationReport,
    run_experiment,
    transition_beta,
    tricritical_field,
    verify_counterexample,
    verify_hs_consistency,
    verify_phase_formulas,
    verify_rate,
    verify_uniform_convergence,
    zero_curvature_beta,
)

__version__ = "0.1.0"
