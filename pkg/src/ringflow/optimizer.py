"""Minimal probability transfer as the lowest eigenpair of the sinc kernel.

Minimizing ``P_N = c^T K c`` subject to ``|c| = 1`` gives the eigenproblem
``K c = mu c`` with

    K_mn = (alpha/pi) (m + n) sinc(alpha (m^2 - n^2)).

Using ``sin(a - b) = sin a cos b - cos a sin b`` the off-diagonal entries are
``(s_m c_n - c_m s_n) / (pi (m - n))`` with ``s_m = sin(alpha m^2)`` and
``c_m = cos(alpha m^2)``, so ``K`` is a diagonal plus two diagonally scaled
copies of the Toeplitz matrix ``1/(m - n)``. The ``"fft"`` backend applies it
in O(N log N) without storing anything.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft
from scipy import optimize

from .dynamics import reduced_phase
from .errors import ConvergenceFailure, InvalidValueError, KernelTooLargeError
from .linalg import EigenResult, davidson_smallest, lanczos_smallest
from .state import ALPHA_OPT, CoefficientVector
from .transfer import kernel_rows

log = logging.getLogger(__name__)

DEFAULT_MEMORY_CAP = 2 * 1024**3
MATRIX_FREE_ABOVE = 4000
_EPS = np.finfo(np.float64).eps


def _check(n_max: int, alpha: float) -> tuple[int, float]:
    if int(n_max) != n_max or n_max < 1:
        raise InvalidValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidValueError(f"alpha must be positive, got {alpha!r}")
    return int(n_max), float(alpha)


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    n_max: int
    alpha: float
    entries: np.ndarray

    def quadratic_form(self, c) -> float:
        c = np.asarray(c.coeffs if isinstance(c, CoefficientVector) else c)
        return float(c @ self.entries @ c)


def build_kernel(n_max: int, alpha: float, memory_cap: int = DEFAULT_MEMORY_CAP) -> KernelMatrix:
    """Dense kernel; the upper triangle is computed and mirrored."""
    n_max, alpha = _check(n_max, alpha)
    need = 8 * (n_max + 1) ** 2
    if need > memory_cap:
        raise KernelTooLargeError(
            f"dense kernel for N={n_max} needs {need / 2**20:.0f} MiB "
            f"(cap {memory_cap / 2**20:.0f} MiB); use a matrix-free backend")
    size = n_max + 1
    k = np.empty((size, size))
    block = 512
    for lo in range(0, size, block):
        hi = min(lo + block, size)
        k[lo:hi] = kernel_rows(lo, hi, n_max, alpha)
    iu = np.triu_indices(size, 1)
    k.T[iu] = k[iu]
    k[np.diag_indices(size)] = 2.0 * alpha * np.arange(size) / math.pi
    k.setflags(write=False)
    return KernelMatrix(n_max, alpha, k)


class KernelOperator:
    """Matrix-vector products with the sinc kernel.

    backend
        ``"dense"`` stores the matrix, ``"direct"`` recomputes row blocks of
        entries for every product, ``"fft"`` uses the Toeplitz factorization.
    """

    def __init__(self, n_max: int, alpha: float, backend: str = "dense",
                 memory_cap: int = DEFAULT_MEMORY_CAP):
        self.n_max, self.alpha = _check(n_max, alpha)
        self.backend = backend
        self.size = self.n_max + 1
        m = np.arange(self.size, dtype=np.float64)
        self.diagonal = 2.0 * self.alpha * m / math.pi
        self.matvecs = 0
        if backend == "dense":
            self._k = build_kernel(self.n_max, self.alpha, memory_cap).entries
        elif backend == "direct":
            pass
        elif backend == "fft":
            m2 = np.arange(self.size, dtype=np.int64) ** 2
            ph = reduced_phase(m2, self.alpha)
            self._sin = np.sin(ph)
            self._cos = np.cos(ph)
            self._len = sfft.next_fast_len(2 * self.size - 1, real=True)
            kern = np.zeros(self._len)
            d = np.arange(1, self.size, dtype=np.float64)
            kern[1:self.size] = 1.0 / d
            kern[self._len - self.size + 1:] = -1.0 / d[::-1]
            self._kern_hat = sfft.rfft(kern)
        else:
            raise InvalidValueError(f"unknown kernel backend {backend!r}")

    def norm_estimate(self) -> float:
        """Gershgorin-type upper bound on the spectral radius."""
        if self.backend == "dense":
            return float(np.max(np.abs(self._k).sum(axis=1)))
        return float(self.diagonal[-1] + (2.0 / math.pi) * (1.0 + math.log(self.size)))

    def _toeplitz(self, u: np.ndarray) -> np.ndarray:
        prod = sfft.rfft(u, self._len) * self._kern_hat
        return sfft.irfft(prod, self._len)[: self.size]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        self.matvecs += 1
        v = np.asarray(v, dtype=np.float64)
        if self.backend == "dense":
            return self._k @ v
        if self.backend == "direct":
            out = np.empty(self.size)
            for lo in range(0, self.size, 256):
                hi = min(lo + 256, self.size)
                out[lo:hi] = kernel_rows(lo, hi, self.n_max, self.alpha) @ v
            return out
        off = (self._sin * self._toeplitz(self._cos * v)
               - self._cos * self._toeplitz(self._sin * v)) / math.pi
        return off + self.diagonal * v

    __matmul__ = matvec


def default_backend(n_max: int) -> str:
    return "dense" if n_max <= MATRIX_FREE_ABOVE else "fft"


@dataclass(frozen=True, eq=False)
class MinimizationResult:
    p_min: float
    state: CoefficientVector
    iterations: int
    residual_norm: float
    method: str = "davidson"
    backend: str = "dense"
    next_eigenvalue: float = math.nan
    degenerate: bool = False
    metadata: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        c = self.state.coeffs
        return {
            "n": self.state.n_max,
            "alpha": self.state.alpha,
            "p_min": self.p_min,
            "iterations": self.iterations,
            "residual_norm": self.residual_norm,
            "method": self.method,
            "backend": self.backend,
            "next_eigenvalue": self.next_eigenvalue,
            "degenerate": self.degenerate,
            "c0": float(c[0]), "c1": float(c[1]),
            "c2": float(c[2]) if c.size > 2 else None,
        }


def _sign_fix(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(v)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def minimize_transfer(n_max: int, alpha: float = ALPHA_OPT, tol: float = 1e-12, *,
                      method: str = "davidson", backend: str | None = None,
                      x0=None, max_iter: int = 500) -> MinimizationResult:
    """Smallest eigenvalue ``P_N^min`` of the kernel and its eigenvector.

    ``tol`` is relative to the kernel norm. The stopping residual is capped
    at 1e-10 and floored at a few ulps of the norm, below which the
    products themselves are not accurate. The returned vector has unit norm
    and ``c_0 > 0``.
    """
    n_max, alpha = _check(n_max, alpha)
    if not tol >= 1e-12:
        raise InvalidValueError(f"tol must be >= 1e-12, got {tol!r}")
    backend = backend or default_backend(n_max)
    op = KernelOperator(n_max, alpha, backend)
    norm = op.norm_estimate()
    abs_tol = max(min(tol * norm, 1e-10), 8 * _EPS * norm)

    if method == "davidson":
        res: EigenResult = davidson_smallest(op.matvec, op.diagonal, x0=x0,
                                             abs_tol=abs_tol, max_iter=max_iter)
    elif method == "lanczos":
        res = lanczos_smallest(op.matvec, op.size, x0=x0, abs_tol=abs_tol,
                               max_restarts=max(1, max_iter // 100))
    else:
        raise InvalidValueError(f"unknown method {method!r}")

    vec = res.vector / np.linalg.norm(res.vector)
    degenerate = bool(math.isfinite(res.next_eigenvalue)
                      and res.next_eigenvalue - res.eigenvalue < 1e-8 * max(1.0, norm))
    if degenerate and res.next_vector is not None:
        other = res.next_vector / np.linalg.norm(res.next_vector)
        if abs(other[0]) > abs(vec[0]):
            vec = other
        log.warning("near-degenerate lowest eigenvalues at N=%d alpha=%g", n_max, alpha)
    vec = _sign_fix(vec)
    p_min = float(vec @ op.matvec(vec))
    residual = float(np.linalg.norm(op.matvec(vec) - p_min * vec))
    return MinimizationResult(
        p_min=p_min,
        state=CoefficientVector(vec, alpha),
        iterations=res.iterations,
        residual_norm=residual,
        method=method,
        backend=backend,
        next_eigenvalue=res.next_eigenvalue,
        degenerate=degenerate,
        metadata={"abs_tol": abs_tol, "norm_estimate": norm, "matvecs": op.matvecs},
    )


@dataclass
class ScanResult:
    points: list[tuple[float, float]]
    minima: list[tuple[float, float]]
    failures: dict[float, str]

    @property
    def best(self) -> tuple[float, float] | None:
        if not self.minima:
            return None
        return min(self.minima, key=lambda am: am[1])


def _refine_minimum(n_max: int, bracket, kwargs, failures: dict, xatol: float):
    """Brent search (parabolic steps, golden-section fallback) inside a grid bracket."""
    xa, xb, xc = bracket

    def objective(a: float) -> float:
        try:
            return minimize_transfer(n_max, a, **kwargs).p_min
        except ConvergenceFailure as exc:
            failures[a] = str(exc)
            return math.inf

    res = optimize.minimize_scalar(objective, bracket=(xa, xb, xc), method="brent",
                                   options={"xtol": xatol})
    if xa < res.x < xc and math.isfinite(res.fun):
        return float(res.x), float(res.fun)
    return None


def scan_alpha(n_max: int, alpha_grid, *, xatol: float = 1e-5, **kwargs) -> ScanResult:
    """``P_N^min`` over a sorted grid of window half-widths.

    Every interior grid minimum is refined inside its two neighbours by
    successive parabolic interpolation with a golden-section safeguard. The
    curve can have kinks where the two lowest eigenvalues cross, which a
    single parabola through three grid points would miss. The refined point
    replaces the grid point only if it is lower. Per-point convergence
    failures are recorded, not raised.
    """
    grid = [float(a) for a in alpha_grid]
    if any(a <= 0 for a in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidValueError("alpha grid must be positive and strictly increasing")
    points, failures = [], {}
    x0 = None
    for a in grid:
        try:
            r = minimize_transfer(n_max, a, x0=x0, **kwargs)
        except ConvergenceFailure as exc:
            failures[a] = str(exc)
            points.append((a, math.nan))
            continue
        x0 = r.state.coeffs
        points.append((a, r.p_min))

    minima = []
    for i in range(1, len(points) - 1):
        (xa, ya), (xb, yb), (xc, yc) = points[i - 1:i + 2]
        if not all(map(math.isfinite, (ya, yb, yc))):
            continue
        if yb <= ya and yb <= yc:
            best = (xb, yb)
            refined = _refine_minimum(n_max, (xa, xb, xc), kwargs, failures, xatol)
            if refined is not None and refined[1] <= yb:
                best = refined
            minima.append(best)
    return ScanResult(points, minima, failures)
