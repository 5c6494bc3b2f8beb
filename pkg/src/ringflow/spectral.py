"""Eigenstructure of the current operator ``j_N = (1/2pi) sum |m>(m+n)<n|``.

The operator has rank two. Its nonzero eigenvalues ``lambda_-`` and
``lambda_+`` are the sharp lower and upper bounds on the dimensionless
current at any instant, and its eigenvectors are linear in ``m``:
``chi_pm[m] = A_pm (m + a_pm)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOperatorError, InvalidValueError
from .linalg import jacobi_eigh
from .state import CoefficientVector

MAX_DENSE_N = 10_000


def _check_n(n_max: int) -> int:
    if int(n_max) != n_max:
        raise InvalidValueError(f"n_max must be an integer, got {n_max!r}")
    n_max = int(n_max)
    if n_max == 0:
        raise DegenerateOperatorError("N = 0: single state, the current vanishes identically")
    if n_max < 0:
        raise InvalidValueError(f"n_max must be >= 1, got {n_max}")
    return n_max


def current_operator_matrix(n_max: int) -> np.ndarray:
    """Dense ``(N+1) x (N+1)`` matrix with entries ``(m + n) / 2pi``."""
    n_max = _check_n(n_max)
    if n_max > MAX_DENSE_N:
        raise InvalidValueError(f"n_max={n_max} exceeds dense limit {MAX_DENSE_N}")
    m = np.arange(n_max + 1, dtype=np.float64)
    return (m[:, None] + m[None, :]) / (2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class SpectralPair:
    n_max: int
    a_plus: float
    a_minus: float
    lambda_plus: float
    lambda_minus: float
    A_plus: float
    A_minus: float
    chi_plus: CoefficientVector
    chi_minus: CoefficientVector


def closed_form_spectrum(n_max: int) -> SpectralPair:
    """Closed-form ``a_pm``, ``lambda_pm``, ``A_pm`` and ``chi_pm`` for a given N.

    Both eigenvectors come out with a positive last component, which is the
    sign convention used throughout.
    """
    n = _check_n(n_max)
    a = math.sqrt(n * (2 * n + 1) / 6.0)
    root = math.sqrt((4 * n + 2) / (3.0 * n))
    pref = n * (n + 1) / (4.0 * math.pi)
    lam_p = pref * (1.0 + root)
    lam_m = pref * (1.0 - root)
    third = (2 * n + 1) / 3.0
    A_p = (n * (n + 1) * (third + a)) ** -0.5
    A_m = (n * (n + 1) * (third - a)) ** -0.5

    m = np.arange(n + 1, dtype=np.float64)
    chi_p = A_p * (m + a)
    chi_m = A_m * (m - a)
    return SpectralPair(
        n_max=n, a_plus=a, a_minus=-a,
        lambda_plus=lam_p, lambda_minus=lam_m,
        A_plus=A_p, A_minus=A_m,
        chi_plus=CoefficientVector(chi_p), chi_minus=CoefficientVector(chi_m),
    )


def instantaneous_bounds(n_max: int) -> tuple[float, float]:
    """``(lambda_-, lambda_+)``: the extreme values the current can take."""
    sp = closed_form_spectrum(n_max)
    return sp.lambda_minus, sp.lambda_plus


def asymptotic_bounds(n_max: int) -> tuple[float, float]:
    """Large-N form ``(-(sqrt(4/3)-1), sqrt(4/3)+1) * N^2 / 4pi``."""
    r = math.sqrt(4.0 / 3.0)
    scale = n_max**2 / (4.0 * math.pi)
    return -(r - 1.0) * scale, (r + 1.0) * scale


def verify_rank2_decomposition(n_max: int, block: int = 1024) -> float:
    """Max-abs difference between ``sum_pm lambda chi chi^T`` and ``(m+n)/2pi``.

    Evaluated in row blocks so that N ~ 10^4 fits in memory.
    """
    sp = closed_form_spectrum(n_max)
    cp = sp.chi_plus.coeffs
    cm = sp.chi_minus.coeffs
    m = np.arange(sp.n_max + 1, dtype=np.float64)
    worst = 0.0
    for lo in range(0, m.size, block):
        hi = min(lo + block, m.size)
        recon = (sp.lambda_plus * np.outer(cp[lo:hi], cp)
                 + sp.lambda_minus * np.outer(cm[lo:hi], cm))
        exact = (m[lo:hi, None] + m[None, :]) / (2.0 * np.pi)
        worst = max(worst, float(np.max(np.abs(recon - exact))))
    return worst


def brute_force_spectrum(n_max: int) -> np.ndarray:
    """Ascending eigenvalues of the dense current operator via cyclic Jacobi."""
    w, _ = jacobi_eigh(current_operator_matrix(n_max))
    return w


def expectation(state: CoefficientVector | np.ndarray, n_max: int | None = None) -> float:
    """``<psi| j_N |psi>`` for a real state, using the rank-two form."""
    c = state.coeffs if isinstance(state, CoefficientVector) else np.asarray(state)
    sp = closed_form_spectrum(c.size - 1 if n_max is None else n_max)
    return (sp.lambda_plus * float(sp.chi_plus.coeffs @ c) ** 2
            + sp.lambda_minus * float(sp.chi_minus.coeffs @ c) ** 2)
