"""Degenerate three-level cascade laser with a parametric amplifier and a
squeezed vacuum reservoir: closed forms, moment dynamics, Fock and Langevin
oracles, spectra and a CSV-producing command line."""

from .core import (
    DerivedCoefficients,
    MicroscopicParams,
    Stability,
    SystemParams,
    derive_coefficients,
    from_microscopic,
    reduced_eigenvalues,
    reservoir_moments,
    stability_classify,
    threshold_epsilon,
)
from .errors import (
    CascadeLaserError,
    ConfigError,
    DomainError,
    FormulaValidityError,
    StabilityError,
    TruncationError,
)
from .analytics import (
    QuadraturePair,
    SpectrumSeries,
    cavity_variances,
    hwhm_of_spectrum,
    mean_photon_cavity,
    mean_photon_output,
    minimize_over_beta,
    output_variances,
    power_spectrum_cavity,
    power_spectrum_output,
    squeezing_spectrum_output,
)
from .moments import MomentState, integrate_moments, steady_state_moments
from .fock import fock_evolve
from .langevin import simulate_ensemble, two_time_correlation_mc
from .spectra import CorrelationSeries, parseval_check, spectrum_from_correlation
from .config import RunConfig, SweepSpec, parse_config
from .csvio import emit_csv

__version__ = "0.1.0"
