"""Closed-form approximation to the backflow-maximizing state.

    |g> = C_N ( |0> - (1/2) sum_{m=1}^{N} sinc(alpha m^2) |m> ),
    C_N = (1 + (1/4) sum_{m=1}^{N} sinc^2(alpha m^2))^{-1/2}.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import reduced_phase
from .errors import DimensionMismatchError, InvalidValueError
from .state import ALPHA_OPT, CoefficientVector
from .transfer import transfer_double_sum

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GuessState:
    n_max: int
    alpha: float
    normalization: float
    state: CoefficientVector


def guess_sinc_terms(n_max: int, alpha: float) -> np.ndarray:
    """``sinc(alpha m^2)`` for ``m = 1..N`` with an exactly reduced numerator."""
    m2 = np.arange(1, n_max + 1, dtype=np.int64) ** 2
    return np.sin(reduced_phase(m2, alpha)) / (alpha * m2.astype(np.float64))


def build_guess(n_max: int, alpha: float = ALPHA_OPT) -> GuessState:
    if int(n_max) != n_max or n_max < 1:
        raise InvalidValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidValueError(f"alpha must be positive, got {alpha!r}")
    n_max = int(n_max)
    s = guess_sinc_terms(n_max, alpha)
    norm = 1.0 / math.sqrt(1.0 + 0.25 * math.fsum(s * s))
    c = np.empty(n_max + 1)
    c[0] = norm
    c[1:] = -0.5 * norm * s
    return GuessState(n_max, float(alpha), norm, CoefficientVector(c, alpha))


def fidelity(a: CoefficientVector, b: CoefficientVector) -> float:
    """Squared overlap ``<a|b>^2`` of two real states on the same basis."""
    if a.n_max != b.n_max:
        raise DimensionMismatchError(f"N differs: {a.n_max} vs {b.n_max}")
    ov = math.fsum(a.coeffs * b.coeffs)
    return min(1.0, ov * ov)


def guess_transfer(n_max: int, alpha: float = ALPHA_OPT) -> float:
    return transfer_double_sum(build_guess(n_max, alpha).state)


def check_transfer_monotone(ns=(10, 100, 1000, 9999), alpha: float = ALPHA_OPT,
                            slack: float = 1e-12) -> bool:
    """Whether the guess transfer is nonincreasing along ``ns``; logs a warning if not."""
    values = [guess_transfer(n, alpha) for n in ns]
    ok = all(b <= a + slack for a, b in zip(values, values[1:]))
    if not ok:
        log.warning("guess transfer not monotone in N: %s", dict(zip(ns, values)))
    return ok
