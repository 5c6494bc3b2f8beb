"""Quantum backflow of a particle on a ring: current bounds, backflow-maximizing
states and the fractal dimension of their current."""

__version__ = "0.1.0"

from .state import (ALPHA_OPT, CoefficientVector, DimensionalParams, load_state,
                    mean_energy, normalize, save_state)
from .spectral import closed_form_spectrum, instantaneous_bounds
from .dynamics import TimeSeries, current_at, sample_current
from .transfer import transfer_decomposed, transfer_double_sum, transfer_by_quadrature
from .optimizer import minimize_transfer, scan_alpha
from .guess import build_guess, fidelity, guess_transfer
from .fractal import HiguchiConfig, higuchi_dimension, spectrum_slope

__all__ = [
    "ALPHA_OPT", "CoefficientVector", "DimensionalParams", "load_state", "mean_energy",
    "normalize", "save_state", "closed_form_spectrum", "instantaneous_bounds",
    "TimeSeries", "current_at", "sample_current", "transfer_decomposed",
    "transfer_double_sum", "transfer_by_quadrature", "minimize_transfer", "scan_alpha",
    "build_guess", "fidelity", "guess_transfer", "HiguchiConfig", "higuchi_dimension",
    "spectrum_slope",
]
