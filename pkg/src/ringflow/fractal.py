"""Fractal dimension of sampled signals and of lacunary Fourier series.

Two independent estimators:

* Higuchi's curve-length method on a uniformly sampled series; the
  dimension is minus the slope of ``log2 L_k`` against ``log2 k``.
* The power-spectrum rule for ``f(t) = sum_m a_m exp(-i m^2 t)``. With
  ``l = m^2`` the spectral density is ``|a_m|^2 dm/dl = |a_m|^2 / (2m)``; if
  it decays like ``l^-beta`` with ``1 < beta <= 3`` the graph has dimension
  ``(5 - beta) / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .dynamics import TimeSeries
from .errors import (DegenerateSeriesError, InsufficientRangeError,
                     InvalidValueError, StrideTooLargeError)
from .state import CoefficientVector

DIMENSION_WINDOW = (0.5, 2.5)
BETA_WINDOW = (1.0, 3.0)


def _values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.samples
    x = np.asarray(series, dtype=np.float64).ravel()
    if x.size < 2:
        raise InvalidValueError("series needs at least two samples")
    return x


def default_strides(k_max: int = 8192, count: int = 47) -> np.ndarray:
    """``count`` distinct integers from 1 to ``k_max``, evenly spaced in log k.

    Rounds ``geomspace(1, k_max, n)`` for the smallest ``n`` that leaves
    ``count`` distinct values. If ``k_max < count`` every integer is used.
    """
    k_max = int(k_max)
    if k_max < 1:
        raise InvalidValueError("k_max must be >= 1")
    if k_max <= count:
        return np.arange(1, k_max + 1)
    best = None
    for n in range(count, 20 * count):
        ks = np.unique(np.rint(np.geomspace(1, k_max, n)).astype(np.int64))
        if ks.size >= count:
            best = ks
            if ks.size == count:
                return ks
            break
    return best


@dataclass(frozen=True)
class HiguchiConfig:
    k_values: tuple[int, ...] = field(default_factory=lambda: tuple(default_strides().tolist()))
    fit_range: tuple[int, int] | None = None

    def __post_init__(self):
        ks = tuple(int(k) for k in self.k_values)
        if any(k < 1 for k in ks):
            raise InvalidValueError("strides must be >= 1")
        if len(set(ks)) != len(ks) or list(ks) != sorted(ks):
            raise InvalidValueError("strides must be distinct and sorted")
        object.__setattr__(self, "k_values", ks)

    @classmethod
    def for_length(cls, length: int, k_max: int = 8192, count: int = 47) -> HiguchiConfig:
        """Default schedule capped so every stride leaves two points per subsequence."""
        return cls(tuple(default_strides(min(k_max, length // 2), count).tolist()))


@dataclass(frozen=True, eq=False)
class FitReport:
    slope: float
    intercept: float
    slope_stderr: float
    points: np.ndarray
    dimension: float
    flagged: bool = False
    kind: str = "higuchi"
    notes: str = ""

    @property
    def beta(self) -> float:
        """Spectral exponent (only meaningful for spectrum fits)."""
        return -self.slope

    def as_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "slope": self.slope,
            "intercept": self.intercept,
            "slope_stderr": self.slope_stderr,
            "dimension": self.dimension,
            "flagged": self.flagged,
            "n_points": int(len(self.points)),
        }
        if self.kind == "spectrum":
            d["beta"] = self.beta
        if self.notes:
            d["notes"] = self.notes
        return d

    def table_csv(self) -> str:
        head = "log2_k,log2_L" if self.kind == "higuchi" else "log2_l,log2_power"
        rows = [head] + [f"{x!r},{y!r}" for x, y in self.points.tolist()]
        return "\n".join(rows) + "\n"


def higuchi_lengths(series, k: int) -> float:
    """Mean normalized curve length ``L_k`` at stride ``k``.

    For offset ``s = 1..k`` with ``n_s = floor((S - s)/k)`` increments,
    ``L_k^(s) = (S - 1)/(n_s k^2) sum_r |x(s + rk) - x(s + (r-1)k)|`` and
    ``L_k`` is their average.
    """
    x = _values(series)
    size = x.size
    k = int(k)
    if k < 1 or k > size - 1:
        raise StrideTooLargeError(f"stride {k} outside 1..{size - 1}")
    n_s = (size - np.arange(1, k + 1)) // k
    if n_s.min() == 0:
        raise StrideTooLargeError(f"stride {k} leaves an empty subsequence for S={size}")
    incr = np.abs(x[k:] - x[:-k])
    # increment i starts at 0-based index i, i.e. offset s = i mod k + 1
    sums = np.bincount(np.arange(incr.size) % k, weights=incr, minlength=k)
    per_offset = (size - 1) * sums / (n_s * k * k)
    return float(per_offset.mean())


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    fit = stats.linregress(x, y)
    return float(fit.slope), float(fit.intercept), float(fit.stderr)


def higuchi_dimension(series, config: HiguchiConfig | None = None) -> FitReport:
    """Least-squares slope of ``log2 L_k`` against ``log2 k``; dimension is minus it."""
    x = _values(series)
    config = config or HiguchiConfig.for_length(x.size)
    ks = np.array(config.k_values)
    if config.fit_range is not None:
        lo, hi = config.fit_range
        ks = ks[(ks >= lo) & (ks <= hi)]
    if ks.size < 5:
        raise InvalidValueError(f"need at least 5 strides, got {ks.size}")
    if ks[-1] > x.size - 1:
        raise StrideTooLargeError(f"largest stride {ks[-1]} exceeds S-1={x.size - 1}")
    lengths = np.array([higuchi_lengths(x, k) for k in ks])
    if np.any(lengths <= 0):
        raise DegenerateSeriesError("zero curve length; the series is constant at some stride")
    lx = np.log2(ks.astype(np.float64))
    ly = np.log2(lengths)
    slope, intercept, err = _ols(lx, ly)
    dim = -slope
    flagged = not DIMENSION_WINDOW[0] < dim < DIMENSION_WINDOW[1]
    return FitReport(slope, intercept, err, np.column_stack([lx, ly]), dim, flagged, "higuchi")


def spectrum_slope(coeffs: CoefficientVector | np.ndarray, weight: str = "none",
                   bins_per_decade: int = 16) -> FitReport:
    """Power-spectrum exponent of ``sum_m w_m c_m exp(-i m^2 t)``.

    ``weight="none"`` analyses ``h0`` (``w_m = 1``), ``weight="m"`` analyses
    ``h1`` (``w_m = m``). Densities ``|w_m c_m|^2 / (2m)`` are averaged in
    logarithmic bins of ``l = m^2``; bins holding fewer than two modes are
    merged forward. The fit runs over ``l`` in ``[max(10, sqrt N), min(N^1.8,
    0.9 N^2)]``, skipping the lowest decade and the truncation edge.
    """
    c = coeffs.coeffs if isinstance(coeffs, CoefficientVector) else np.asarray(coeffs, float)
    n_max = c.size - 1
    if n_max < 100:
        raise InsufficientRangeError(f"need N >= 100 for a spectral fit, got {n_max}")
    if weight not in ("none", "m"):
        raise InvalidValueError(f"weight must be 'none' or 'm', got {weight!r}")
    m = np.arange(1, n_max + 1, dtype=np.float64)
    amp = c[1:] * (m if weight == "m" else 1.0)
    density = amp * amp / (2.0 * m)
    ell = m * m

    l_lo = max(10.0, math.sqrt(n_max))
    l_hi = min(n_max**1.8, 0.9 * n_max**2)
    sel = (ell >= l_lo) & (ell <= l_hi)
    ell, density = ell[sel], density[sel]
    bin_idx = np.floor(np.log10(ell) * bins_per_decade).astype(np.int64)

    xs, ys = [], []
    acc_l, acc_p = [], []
    for b in np.unique(bin_idx):
        mask = bin_idx == b
        acc_l.extend(np.log2(ell[mask]).tolist())
        acc_p.extend(density[mask].tolist())
        if len(acc_l) < 2:
            continue
        mean_p = float(np.mean(acc_p))
        if mean_p > 0:
            xs.append(float(np.mean(acc_l)))
            ys.append(math.log2(mean_p))
        acc_l, acc_p = [], []
    if len(xs) < 8:
        raise InsufficientRangeError(f"only {len(xs)} usable spectral bins (need 8)")
    x, y = np.array(xs), np.array(ys)
    slope, intercept, err = _ols(x, y)
    beta = -slope
    dim = (5.0 - beta) / 2.0
    notes = ""
    flagged = False
    if not BETA_WINDOW[0] < beta <= BETA_WINDOW[1]:
        flagged = True
        notes = f"beta={beta:.3g} outside (1, 3]; dimension rule does not apply"
    elif not DIMENSION_WINDOW[0] < dim < DIMENSION_WINDOW[1]:
        flagged = True
    return FitReport(slope, intercept, err, np.column_stack([x, y]), dim, flagged,
                     "spectrum", notes)


def weierstrass(t, hurst: float, terms: int = 31) -> np.ndarray:
    """``sum_{j<terms} 2^{-j H} cos(2^j t)``; graph dimension ``2 - H``."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    for j in range(terms):
        out += 2.0 ** (-j * hurst) * np.cos(2.0**j * t)
    return out


def read_series_csv(path) -> np.ndarray:
    """Second column of a ``t,j`` CSV as written by the ``current`` command."""
    from .errors import ParseError

    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or (lineno == 1 and not s[0].isdigit() and s[0] not in "+-."):
                continue
            cols = s.split(",")
            try:
                values.append(float(cols[-1]))
            except ValueError:
                raise ParseError(f"not a number: {cols[-1]!r}", line=lineno, path=path) from None
    if len(values) < 2:
        raise ParseError("fewer than two samples", path=path)
    return np.array(values)
