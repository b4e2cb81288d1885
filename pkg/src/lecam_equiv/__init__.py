"""Simulation toolkit for Gaussian approximation of regression experiments.

Submodules build up a pipeline: parametric observation families with
variance-stabilizing transforms (`families`), smoothness classes and
localization rates (`function_space`), experiment samplers and
log-likelihood expansions (`experiments`), Hellinger/total-variation
machinery (`distances`), common-space likelihood coupling (`coupling`),
the block Gaussianization kernel (`globalization`), and a reproducible
batch study driver (`harness`, CLI entry point `lecam-equiv`).

The most commonly used names are re-exported here; everything else is
importable from its submodule.
"""

__version__ = "0.1.0"

from .coupling import (
    CcAuditReport,
    CoupledLikelihoodDraw,
    CouplingPlan,
    TruncationOutput,
    audit_cc_conditions,
    build_coupled_draw,
    truncate_scores,
)
from .distances import (
    DistanceReport,
    exp_moment_margins,
    hellinger_gaussian,
    hellinger_sq_1d,
    hellinger_sq_product,
    mc_hellinger_coupled,
    tv_and_deficiency_bound,
)
from .errors import (
    ArgumentError,
    ConfigError,
    DomainError,
    NumericError,
)
from .experiments import (
    ExperimentDraw,
    LaseTerms,
    lase_terms,
    lindeberg_sum,
    read_draw,
    sample_local_gaussian,
    sample_original,
    standard_test_pair,
    write_draw,
)
from .families import (
    ParametricFamily,
    check_regularity,
    fisher_info,
    gamma_transform,
    get_family,
)
from .function_space import (
    RegressionFunction,
    holder_check,
    localization_rate,
    parse_function,
    rate_gamma_bar,
)
from .globalization import (
    GaussianizedData,
    gamma_scale_estimate,
    gaussianize,
    homoscedastic_transform_check,
    preliminary_estimate,
    risk_transfer_demo,
)
from .harness import (
    StudyConfig,
    StudyResult,
    derive_seed,
    parse_config,
    run_study,
    stream_rng,
)

__all__ = [
    "__version__",
    # families
    "ParametricFamily",
    "get_family",
    "gamma_transform",
    "fisher_info",
    "check_regularity",
    # function space
    "RegressionFunction",
    "parse_function",
    "rate_gamma_bar",
    "localization_rate",
    "holder_check",
    # experiments
    "ExperimentDraw",
    "sample_original",
    "sample_local_gaussian",
    "standard_test_pair",
    "lase_terms",
    "LaseTerms",
    "lindeberg_sum",
    "write_draw",
    "read_draw",
    # distances
    "hellinger_sq_1d",
    "hellinger_sq_product",
    "hellinger_gaussian",
    "tv_and_deficiency_bound",
    "mc_hellinger_coupled",
    "exp_moment_margins",
    "DistanceReport",
    # coupling
    "CouplingPlan",
    "build_coupled_draw",
    "truncate_scores",
    "audit_cc_conditions",
    "CoupledLikelihoodDraw",
    "TruncationOutput",
    "CcAuditReport",
    # globalization
    "preliminary_estimate",
    "gaussianize",
    "GaussianizedData",
    "gamma_scale_estimate",
    "homoscedastic_transform_check",
    "risk_transfer_demo",
    # harness
    "StudyConfig",
    "parse_config",
    "run_study",
    "StudyResult",
    "derive_seed",
    "stream_rng",
    # errors
    "ArgumentError",
    "DomainError",
    "ConfigError",
    "NumericError",
]
