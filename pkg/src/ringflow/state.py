"""Superpositions of non-negative angular-momentum eigenstates on a ring.

A state is stored as the real expansion coefficients ``c_0 ... c_N`` of
``|psi> = sum_m c_m |m>`` together with the dimensionless half-window
``alpha`` it was built for. Time is measured in units of ``2 M R^2 / hbar``.
"""
from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (InvalidStateError, InvalidValueError, ParseError,
                     ZeroVectorError)

#: Window half-width at which the probability-transfer bound is attained.
ALPHA_OPT = 1.163635

NORM_TOL = 1e-12
LOAD_NORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Real, normalized expansion coefficients of a ring state.

    ``coeffs`` is stored as a read-only float64 array. The sign convention
    ``c_0 > 0`` is applied by :func:`normalize`; it is not enforced here
    because eigenvectors such as the current-operator extremizers follow a
    different convention.
    """

    coeffs: np.ndarray
    alpha: float = ALPHA_OPT

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64, copy=True).ravel()
        if c.size < 2:
            raise InvalidValueError("need at least two coefficients (N >= 1)")
        if not np.all(np.isfinite(c)):
            raise InvalidValueError("coefficients must be finite")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidValueError(f"alpha must be positive, got {self.alpha!r}")
        norm2 = math.fsum(c * c)
        if abs(norm2 - 1.0) > LOAD_NORM_TOL:
            raise InvalidStateError(f"sum of squared coefficients is {norm2!r}, not 1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def n_max(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def with_alpha(self, alpha: float) -> CoefficientVector:
        return CoefficientVector(self.coeffs, alpha)

    def digest(self) -> str:
        """SHA-256 over the raw coefficient bytes and alpha."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.coeffs, dtype="<f8").tobytes())
        h.update(np.float64(self.alpha).astype("<f8").tobytes())
        return h.hexdigest()


def normalize(coeffs, alpha: float = ALPHA_OPT) -> CoefficientVector:
    """Scale ``coeffs`` to unit Euclidean norm with ``c_0 >= 0``."""
    c = np.asarray(coeffs, dtype=np.float64).ravel()
    if c.size < 2:
        raise InvalidValueError("need at least two coefficients (N >= 1)")
    if not np.all(np.isfinite(c)):
        raise InvalidValueError("coefficients must be finite")
    norm = np.linalg.norm(c)
    if norm == 0.0:
        raise ZeroVectorError("cannot normalize the zero vector")
    c = c / norm
    if c[0] < 0:
        c = -c
    return CoefficientVector(c, alpha)


def basis_state(m: int, n_max: int, alpha: float = ALPHA_OPT) -> CoefficientVector:
    """The angular-momentum eigenstate ``|m>`` embedded in ``span{|0>..|N>}``."""
    if not 0 <= m <= n_max:
        raise InvalidValueError(f"basis index {m} outside 0..{n_max}")
    c = np.zeros(n_max + 1)
    c[m] = 1.0
    return CoefficientVector(c, alpha)


def random_state(n_max: int, rng: np.random.Generator, alpha: float = ALPHA_OPT) -> CoefficientVector:
    """Uniformly distributed point on the unit sphere (Gaussian draw)."""
    return normalize(rng.standard_normal(n_max + 1), alpha)


@dataclass(frozen=True)
class DimensionalParams:
    """Particle mass, ring radius and reduced Planck constant (any consistent units)."""

    mass: float = 1.0
    radius: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("mass", "radius", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidValueError(f"{name} must be positive and finite, got {v!r}")

    @property
    def time_unit(self) -> float:
        """``2 M R^2 / hbar``: one unit of dimensionless time in physical units."""
        return 2.0 * self.mass * self.radius**2 / self.hbar

    @property
    def energy_unit(self) -> float:
        """``hbar^2 / (2 M R^2)``, the energy of ``|1>``."""
        return self.hbar**2 / (2.0 * self.mass * self.radius**2)


def to_dimensionless_time(T, params: DimensionalParams):
    return T / params.time_unit


def to_dimensional_time(t, params: DimensionalParams):
    return t * params.time_unit


def to_dimensional_current(j, params: DimensionalParams):
    """Physical current ``J = j / (2 M R^2 / hbar)``."""
    return j / params.time_unit


def window_to_alpha(delta: float, params: DimensionalParams) -> float:
    """Half-window ``alpha = hbar Delta / (4 M R^2)`` for a physical window ``Delta``."""
    return 0.5 * to_dimensionless_time(delta, params)


def mean_energy(state: CoefficientVector, params: DimensionalParams = DimensionalParams()) -> float:
    m = np.arange(state.coeffs.size, dtype=np.float64)
    return params.energy_unit * math.fsum(m * m * state.coeffs**2)


# --------------------------------------------------------------------------
# persistence

def format_state(state: CoefficientVector) -> str:
    lines = [f"N={state.n_max} alpha={state.alpha!r}"]
    lines.extend(repr(float(c)) for c in state.coeffs)
    return "\n".join(lines) + "\n"


def parse_state(text: str, path=None) -> CoefficientVector:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", line=1, path=path)
    header = lines[0].split()
    fields = {}
    for tok in header:
        key, sep, val = tok.partition("=")
        if not sep:
            raise ParseError(f"bad header token {tok!r}", line=1, path=path)
        fields[key] = val
    if set(fields) != {"N", "alpha"}:
        raise ParseError("header must be 'N=<int> alpha=<float>'", line=1, path=path)
    try:
        n_max = int(fields["N"])
        alpha = float(fields["alpha"])
    except ValueError as exc:
        raise ParseError(f"bad header value: {exc}", line=1, path=path) from None

    coeffs = []
    for lineno, raw in enumerate(lines[1:], start=2):
        s = raw.strip()
        if not s:
            continue
        try:
            coeffs.append(float(s))
        except ValueError:
            raise ParseError(f"not a number: {s!r}", line=lineno, path=path) from None
    if len(coeffs) != n_max + 1:
        raise ParseError(f"header says N={n_max} ({n_max + 1} coefficients) "
                         f"but found {len(coeffs)}", line=1, path=path)
    c = np.array(coeffs)
    if not np.all(np.isfinite(c)):
        raise ParseError("non-finite coefficient", path=path)
    norm2 = math.fsum(c * c)
    if abs(norm2 - 1.0) > LOAD_NORM_TOL:
        raise InvalidStateError(f"{path or 'state'}: sum of squares {norm2!r} violates normalization")
    return CoefficientVector(c, alpha)


def save_state(path: str | os.PathLike, state: CoefficientVector) -> Path:
    path = Path(path)
    path.write_text(format_state(state), encoding="utf-8")
    return path


def load_state(path: str | os.PathLike) -> CoefficientVector:
    path = Path(path)
    return parse_state(path.read_text(encoding="utf-8"), path=path)


def looks_like_state_file(path: str | os.PathLike) -> bool:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    return first.startswith("N=")
