"""Probability transferred through theta = 0 during the window ``[-alpha, alpha]``.

Three routes are provided and cross-checked in the test suite:

* the closed double sum ``(alpha/pi) sum c_m c_n (m+n) sinc(alpha (m^2-n^2))``;
* composite Simpson quadrature of ``j_N(t)``;
* the split into a non-negative and a non-positive part, each the Simpson
  integral of a squared modulus.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import current_at, reduced_phase
from .errors import InvalidValueError
from .spectral import closed_form_spectrum
from .state import CoefficientVector

SINC_SERIES_CUTOFF = 1e-8
MIN_PANELS = 64
# Simpson panels are chosen so that the fastest mode advances at most this
# many radians per panel; the relative Simpson error is then ~ x^4/180.
_AUTO_STEP = 1e-3
_ROW_BLOCK = 512


def sinc(z):
    """``sin(z)/z`` with the removable singularity handled by ``1 - z^2/6``."""
    z = np.asarray(z, dtype=np.float64)
    small = np.abs(z) < SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, z)
    out = np.where(small, 1.0 - z * z / 6.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def _alpha(state: CoefficientVector, alpha: float | None) -> float:
    a = state.alpha if alpha is None else float(alpha)
    if not (math.isfinite(a) and a > 0):
        raise InvalidValueError(f"alpha must be positive, got {a!r}")
    return a


def kernel_rows(lo: int, hi: int, n_max: int, alpha: float) -> np.ndarray:
    """Rows ``lo..hi-1`` of ``K_mn = (alpha/pi)(m+n) sinc(alpha (m^2 - n^2))``."""
    m = np.arange(lo, hi, dtype=np.int64)[:, None]
    n = np.arange(n_max + 1, dtype=np.int64)[None, :]
    diff = (m * m - n * n).astype(np.float64)
    return (alpha / math.pi) * (m + n) * sinc(alpha * diff)


def transfer_double_sum(state: CoefficientVector, alpha: float | None = None) -> float:
    """``P_N`` from the closed double sum, evaluated in row blocks."""
    a = _alpha(state, alpha)
    c = state.coeffs
    n_max = c.size - 1
    parts = []
    for lo in range(0, n_max + 1, _ROW_BLOCK):
        hi = min(lo + _ROW_BLOCK, n_max + 1)
        parts.append(float(c[lo:hi] @ (kernel_rows(lo, hi, n_max, a) @ c)))
    return math.fsum(parts)


# --------------------------------------------------------------------------
# Simpson quadrature

def simpson(values, h: float) -> float:
    """Composite Simpson rule on an odd number of equally spaced samples."""
    y = np.asarray(values, dtype=np.float64)
    if y.size < 3 or y.size % 2 == 0:
        raise InvalidValueError("Simpson's rule needs an odd number (>= 3) of samples")
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def _even_panels(panels: int) -> int:
    panels = int(panels)
    if panels < MIN_PANELS:
        raise InvalidValueError(f"need at least {MIN_PANELS} panels, got {panels}")
    if panels % 2:
        warnings.warn(f"odd panel count {panels} rounded up to {panels + 1}",
                      RuntimeWarning, stacklevel=3)
        panels += 1
    return panels


def auto_panels(n_max: int, alpha: float) -> int:
    """Panel count resolving the highest frequency ``N^2`` to ``_AUTO_STEP`` rad/panel."""
    p = int(math.ceil(2.0 * alpha * max(n_max, 1) ** 2 / _AUTO_STEP))
    p = max(p, MIN_PANELS)
    return p + (p % 2)


def simpson_mode_weights(k, alpha: float, panels: int):
    """Simpson sum of ``cos(k t)`` over ``[-alpha, alpha]`` in closed form.

    Summing the node values as Dirichlet kernels, with ``h = 2 alpha / panels``
    and ``x = k h``, gives

        (2h/3) sin(k alpha) [cot(x/2) + 1/sin(x)],

    which tends to the exact integral ``2 sin(k alpha)/k`` as ``x -> 0``.
    ``k = 0`` returns ``2 alpha``. The value equals what the rule produces from
    node samples, so the cost does not depend on the panel count.
    """
    k = np.asarray(k, dtype=np.float64)
    h = 2.0 * alpha / panels
    x = k * h
    zero = k == 0
    x_safe = np.where(zero, 1.0, x)
    s_ka = np.sin(reduced_phase(k.astype(np.int64), alpha))
    val = (2.0 * h / 3.0) * s_ka * (1.0 / np.tan(0.5 * x_safe) + 1.0 / np.sin(x_safe))
    return np.where(zero, 2.0 * alpha, val)


def _simpson_quadratic_form(c_left, c_right, alpha, panels, weight_fn):
    """``sum_{m,n} cL_m cR_n w(m,n) Q(m^2 - n^2)`` in row blocks."""
    n_max = c_left.size - 1
    n = np.arange(n_max + 1, dtype=np.int64)
    parts = []
    for lo in range(0, n_max + 1, _ROW_BLOCK):
        hi = min(lo + _ROW_BLOCK, n_max + 1)
        m = n[lo:hi, None]
        q = simpson_mode_weights((m * m - n[None, :] ** 2).astype(np.float64), alpha, panels)
        parts.append(float(c_left[lo:hi] @ ((weight_fn(m, n[None, :]) * q) @ c_right)))
    return math.fsum(parts)


def transfer_by_quadrature(state: CoefficientVector, panels: int | None = None,
                           alpha: float | None = None, method: str = "modes") -> float:
    """Composite Simpson integral of ``j_N(t)`` over ``[-alpha, alpha]``.

    ``method="nodes"`` samples the current on ``panels + 1`` nodes and applies
    the rule directly. ``method="modes"`` returns the same Simpson sum
    evaluated frequency by frequency, which makes large panel counts free.
    With ``panels=None`` the count resolves the fastest frequency ``N^2``.
    """
    a = _alpha(state, alpha)
    c = state.coeffs
    panels = auto_panels(c.size - 1, a) if panels is None else _even_panels(panels)
    if method == "nodes":
        t = np.linspace(-a, a, panels + 1)
        return simpson(current_at(c, t), 2.0 * a / panels)
    if method == "modes":
        return _simpson_quadratic_form(c, c, a, panels,
                                       lambda m, n: (m + n) / (2.0 * math.pi))
    raise InvalidValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class TransferBreakdown:
    total: float
    plus_part: float
    minus_part: float
    alpha: float
    panels: int

    def as_dict(self) -> dict:
        return {"total": self.total, "plus": self.plus_part,
                "minus": self.minus_part, "alpha": self.alpha}


def transfer_decomposed(state: CoefficientVector, panels: int | None = None,
                        alpha: float | None = None, method: str = "modes") -> TransferBreakdown:
    """Split ``P_N`` into its non-negative and non-positive parts.

    ``P^(pm) = (1/(4 pi a_pm)) int |sum c_m (m + a_pm) exp(-i m^2 t)|^2 dt``
    with ``a_+ = -a_- > 0``. The integrands are squared moduli, so the sign
    of each part is fixed by the sign of ``a_pm``.
    """
    a = _alpha(state, alpha)
    c = state.coeffs
    n_max = c.size - 1
    panels = auto_panels(n_max, a) if panels is None else _even_panels(panels)
    sp = closed_form_spectrum(n_max)
    m = np.arange(n_max + 1, dtype=np.float64)

    parts = []
    for shift in (sp.a_plus, sp.a_minus):
        g = c * (m + shift)
        if method == "nodes":
            t = np.linspace(-a, a, panels + 1)
            integral = simpson(_modulus_squared(g, t), 2.0 * a / panels)
        elif method == "modes":
            # |sum g_m e^{-i m^2 t}|^2 = sum g_m g_n cos((m^2 - n^2) t)
            integral = _simpson_quadratic_form(g, g, a, panels, lambda mm, nn: 1.0)
        else:
            raise InvalidValueError(f"unknown method {method!r}")
        parts.append(integral / (4.0 * math.pi * shift))
    plus, minus = parts
    return TransferBreakdown(float(plus + minus), float(plus), float(minus), a, panels)


def _modulus_squared(g: np.ndarray, t: np.ndarray) -> np.ndarray:
    m2 = np.arange(g.size, dtype=np.int64) ** 2
    out = np.empty(t.size)
    step = max(1, (1 << 21) // g.size)
    for lo in range(0, t.size, step):
        e = np.exp(-1j * reduced_phase(m2[None, :], t[lo:lo + step, None]))
        out[lo:lo + step] = np.abs(e @ g) ** 2
    return out
