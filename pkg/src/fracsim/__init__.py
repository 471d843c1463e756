"""Simulation and verification toolkit for linear stochastic fractional-order
evolution equations: Mittag-Leffler evaluation, exact-in-time spectral
sampling, FEM/convolution-quadrature time stepping, pathwise Holder error
measurement, and seeded convergence studies."""

from .exceptions import AccuracyError, FracsimError, ValidationError
from .experiment import StudyConfig, parse_config, run_study
from .fem import (
    FemMatrices,
    FemSolution,
    LcqWeights,
    assemble,
    fem_error_path,
    lcq_convolve_check,
    lcq_weights,
    simulate_fem,
)
from .grids import Mesh1D, TimeGrid
from .mlf import MlfRequest, mlf, mlf_grid
from .norms import (
    NormedPath,
    RateStudy,
    empirical_rate,
    holder_seminorm,
    lp_omega_estimate,
    sup_norm,
    theoretical_rate,
)
from .spectral import (
    CovarianceFactor,
    SpectralParams,
    SpectralSolution,
    factor_covariance,
    mode_covariance,
    resolvent_diag,
    sample_mode_path,
    simulate_spectral,
    spectral_error_path,
)

__version__ = "1.0.0"

__all__ = [
    "AccuracyError",
    "FracsimError",
    "ValidationError",
    "StudyConfig",
    "parse_config",
    "run_study",
    "FemMatrices",
    "FemSolution",
    "LcqWeights",
    "assemble",
    "fem_error_path",
    "lcq_convolve_check",
    "lcq_weights",
    "simulate_fem",
    "Mesh1D",
    "TimeGrid",
    "MlfRequest",
    "mlf",
    "mlf_grid",
    "NormedPath",
    "RateStudy",
    "empirical_rate",
    "holder_seminorm",
    "lp_omega_estimate",
    "sup_norm",
    "theoretical_rate",
    "CovarianceFactor",
    "SpectralParams",
    "SpectralSolution",
    "factor_covariance",
    "mode_covariance",
    "resolvent_diag",
    "sample_mode_path",
    "simulate_spectral",
    "spectral_error_path",
    "__version__",
]
