"""Numerical laboratory for exponential sums on the torus.

Builds random frequency sets, computes L^p norms of the associated
exponential sums, optimizes coefficients to measure majorant ratios and
Lambda(p) constants, and runs seeded Monte Carlo experiments against the
corresponding expectation and probability bounds.
"""

from .trigpoly import (
    FrequencySet,
    TrigPolynomial,
    NormResult,
    ConvolutionBudgetError,
    NormConvergenceError,
    evaluate_on_grid,
    lp_norm_quadrature,
    lp_norm_even_exact,
    lp_norm_adaptive,
    l2_norm,
)
from .randsets import (
    SeededRng,
    BernoulliSelector,
    PerturbedAP,
    BlockUniform,
    NestedBlock,
    CorrelatedDyadic,
    FullRange,
    CurveEmbedding,
    sample,
    embed_curve,
    full_range,
    dirichlet,
)
from .extremal import (
    OptimizerConfig,
    ExtremalResult,
    majorant_numerator,
    majorant_ratio,
    lambda_p_constant,
    brute_force_sup,
)
from .montecarlo import (
    ExperimentSpec,
    ExperimentReport,
    NormPolicy,
    ExperimentError,
    run_trials,
    check_chernoff,
    check_lower_bound_product,
    check_lower_bound_pap,
    check_selector_moment,
    majorant_scaling_study,
    probability_estimate,
    lambda_expectation,
)

__version__ = "0.1.0"
