"""Small in-repo symmetric eigensolvers.

``jacobi_eigh`` is a dense cyclic-Jacobi diagonalizer used as an oracle for
closed-form spectra on small matrices. ``davidson_smallest`` and
``lanczos_smallest`` find the lowest eigenpair of a large symmetric operator
given only its matrix-vector product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceFailure

MatVec = Callable[[np.ndarray], np.ndarray]


def jacobi_eigh(a, tol: float = 1e-15, max_sweeps: int = 50):
    """Eigen-decompose a real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with ascending eigenvalues ``w`` and orthonormal
    eigenvectors in the columns of ``v``. The input is not modified.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix must be symmetric")
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.diag(a).copy(), v

    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a[offdiag]))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * scale:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise ConvergenceFailure("Jacobi sweeps did not converge", float("nan"), v,
                                 float("nan"), max_sweeps)

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


@dataclass
class EigenResult:
    eigenvalue: float
    vector: np.ndarray
    residual: float
    iterations: int
    next_eigenvalue: float = math.nan
    next_vector: np.ndarray | None = None


def _orthonormalize_against(basis: np.ndarray, t: np.ndarray) -> np.ndarray | None:
    # two passes of classical Gram-Schmidt are enough in floating point
    for _ in range(2):
        t = t - basis @ (basis.T @ t)
    nrm = np.linalg.norm(t)
    if nrm < 1e-14:
        return None
    return t / nrm


def davidson_smallest(matvec: MatVec, diagonal: np.ndarray, *, x0=None,
                      abs_tol: float = 1e-10, rel_change: float = 1e-13,
                      max_iter: int = 500, max_subspace: int = 40) -> EigenResult:
    """Lowest eigenpair by Davidson iteration with a diagonal preconditioner.

    Converged when the residual norm drops below ``abs_tol`` and the Ritz
    value moves by less than ``rel_change`` (relative) between iterations.
    """
    diagonal = np.asarray(diagonal, dtype=np.float64)
    n = diagonal.size
    if x0 is None:
        x = np.zeros(n)
        x[int(np.argmin(diagonal))] = 1.0
    else:
        x = np.asarray(x0, dtype=np.float64) / np.linalg.norm(x0)

    V = x[:, None]
    AV = matvec(x)[:, None]
    theta_prev = math.inf
    best = None
    for it in range(1, max_iter + 1):
        H = V.T @ AV
        H = 0.5 * (H + H.T)
        w, s = np.linalg.eigh(H)
        theta = float(w[0])
        u = V @ s[:, 0]
        Au = AV @ s[:, 0]
        r = Au - theta * u
        rn = float(np.linalg.norm(r))
        nxt = (float(w[1]), V @ s[:, 1]) if w.size > 1 else (math.nan, None)
        if best is None or rn < best.residual:
            best = EigenResult(theta, u, rn, it, *nxt)
        converged = rn <= abs_tol and abs(theta - theta_prev) <= rel_change * max(1.0, abs(theta))
        if converged or rn == 0.0:
            return EigenResult(theta, u, rn, it, *nxt)
        theta_prev = theta

        denom = diagonal - theta
        small = np.abs(denom) < 1e-8
        denom[small] = np.where(denom[small] >= 0, 1e-8, -1e-8)
        t = r / denom
        if V.shape[1] >= max_subspace:
            keep = np.column_stack([u, V @ s[:, 1]]) if w.size > 1 else u[:, None]
            keep_a = np.column_stack([Au, AV @ s[:, 1]]) if w.size > 1 else Au[:, None]
            V, AV = keep, keep_a
        t = _orthonormalize_against(V, t)
        if t is None:
            # preconditioned residual lies in the subspace; fall back to the raw residual
            t = _orthonormalize_against(V, r)
            if t is None:
                return EigenResult(theta, u, rn, it, *nxt)
        V = np.column_stack([V, t])
        AV = np.column_stack([AV, matvec(t)])

    raise ConvergenceFailure(f"Davidson did not converge in {max_iter} iterations "
                             f"(residual {best.residual:.3e})",
                             best.eigenvalue, best.vector, best.residual, max_iter)


def lanczos_smallest(matvec: MatVec, n: int, *, x0=None, steps: int = 500,
                     abs_tol: float = 1e-10, max_restarts: int = 50,
                     rng: np.random.Generator | None = None) -> EigenResult:
    """Lowest eigenpair by restarted Lanczos with full reorthogonalization.

    Each cycle runs at most ``steps`` Lanczos steps and restarts from the
    current Ritz vector.
    """
    if x0 is None:
        rng = rng or np.random.default_rng(0)
        x = rng.standard_normal(n)
    else:
        x = np.asarray(x0, dtype=np.float64).copy()
    x /= np.linalg.norm(x)
    steps = min(steps, n)
    total = 0
    best = None
    for _ in range(max_restarts):
        Q = np.zeros((n, steps))
        alphas, betas = [], []
        Q[:, 0] = x
        k = 0
        for k in range(steps):
            w = matvec(Q[:, k])
            total += 1
            a_k = float(Q[:, k] @ w)
            alphas.append(a_k)
            w -= Q[:, : k + 1] @ (Q[:, : k + 1].T @ w)
            w -= Q[:, : k + 1] @ (Q[:, : k + 1].T @ w)
            b_k = float(np.linalg.norm(w))
            if k + 1 == steps or b_k < 1e-14:
                betas.append(b_k)
                break
            betas.append(b_k)
            Q[:, k + 1] = w / b_k
        m = len(alphas)
        T = np.diag(alphas) + np.diag(betas[: m - 1], 1) + np.diag(betas[: m - 1], -1)
        w_t, s_t = np.linalg.eigh(T)
        y = Q[:, :m] @ s_t[:, 0]
        y /= np.linalg.norm(y)
        r = matvec(y) - w_t[0] * y
        total += 1
        rn = float(np.linalg.norm(r))
        nxt = (float(w_t[1]), Q[:, :m] @ s_t[:, 1]) if m > 1 else (math.nan, None)
        res = EigenResult(float(w_t[0]), y, rn, total, *nxt)
        if best is None or rn < best.residual:
            best = res
        if rn <= abs_tol or m < steps:
            return res
        x = y
    raise ConvergenceFailure(f"Lanczos did not converge after {max_restarts} restarts "
                             f"(residual {best.residual:.3e})",
                             best.eigenvalue, best.vector, best.residual, total)
