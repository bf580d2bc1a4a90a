"""Maximum-likelihood estimation for multivariate generalized Gaussian distributions."""

from ._core import (
    DegenerateData,
    FitReport,
    MggdError,
    NotPositiveDefinite,
    alpha_equation,
    estimate_scale,
    fit,
    fp_map,
    log_pdf,
    log_profile_objective,
    sample,
    toeplitz_rho,
)

__all__ = [
    "DegenerateData",
    "FitReport",
    "MggdError",
    "NotPositiveDefinite",
    "alpha_equation",
    "estimate_scale",
    "fit",
    "fp_map",
    "log_pdf",
    "log_profile_objective",
    "sample",
    "toeplitz_rho",
]

__version__ = "1.0.0"
