"""Dense linear-algebra kernels: full SVD and operator-norm estimation.

The SVD is a one-sided (Hestenes) Jacobi factorization: deterministic for a
fixed input, accurate at desk scale, and hot enough in the singular-value
thresholding loop to justify the compiled kernel (see augdual._kernels).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._kernels import jacobi_rotate
from .linop import LinearOperator, random_point

# Relative Jacobi off-diagonal tolerance and sweep cap. Convergence is
# quadratic; 100 sweeps is far beyond anything needed at desk scale.
_JACOBI_TOL = 5e-15
_MAX_SWEEPS = 100

# Singular values below this fraction of the largest are clamped to zero to
# stabilize rank decisions.
RANK_CLAMP = 1e-12


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD m = u @ diag(s) @ v.T with orthonormal u, v columns and
    s sorted nonincreasing."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.T


def svd(m) -> SvdResult:
    """One-sided Jacobi SVD of a dense matrix.

    For an r-by-c input, u is r-by-k and v is c-by-k with k = min(r, c).
    Raises ValueError on non-finite input.
    """
    mat = np.asarray(m, dtype=float)
    if mat.ndim != 2:
        raise ValueError("svd needs a 2-D matrix")
    if not np.all(np.isfinite(mat)):
        raise ValueError("svd input must be finite")
    if mat.shape[0] >= mat.shape[1]:
        u, s, v = _svd_tall(mat)
    else:
        v, s, u = _svd_tall(mat.T)
    return SvdResult(u=u, s=s, v=v)


def _svd_tall(mat: np.ndarray):
    """SVD of a matrix with rows >= cols."""
    n, k = mat.shape
    a = np.ascontiguousarray(mat.copy())
    v = np.ascontiguousarray(np.eye(k))
    jacobi_rotate(a, v, _JACOBI_TOL, _MAX_SWEEPS)

    s = np.linalg.norm(a, axis=0)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    a = a[:, order]
    v = v[:, order]

    if s[0] > 0:
        s = np.where(s < RANK_CLAMP * s[0], 0.0, s)
    u = np.zeros((n, k))
    nonzero = s > 0
    u[:, nonzero] = a[:, nonzero] / np.where(s[nonzero] == 0, 1.0, s[nonzero])
    # Columns belonging to exactly-zero norms carry no direction; complete
    # them to an orthonormal basis from canonical vectors.
    _complete_basis(u, int(np.count_nonzero(nonzero)))
    return u, s, v


def _complete_basis(u: np.ndarray, rank: int):
    n, k = u.shape
    col = rank
    for basis in range(n):
        if col >= k:
            return
        cand = np.zeros(n)
        cand[basis] = 1.0
        for _ in range(2):
            cand -= u[:, :col] @ (u[:, :col].T @ cand)
        nrm = np.linalg.norm(cand)
        if nrm > 0.5:
            u[:, col] = cand / nrm
            col += 1


def power_iteration(
    op: LinearOperator, tol: float, max_iter: int, seed: int
) -> tuple[float, bool, int]:
    """Power iteration on A*A from a seeded random start.

    Returns (estimate of ||A||, converged flag, iterations). Convergence is
    relative change of the Rayleigh quotient <= tol. The estimate never
    exceeds the true norm, so callers inflate it by a small safety factor.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rng = np.random.default_rng(seed)
    x = random_point(op.domain_tag, rng)
    nrm = x.norm()
    if nrm == 0:
        return 0.0, True, 0
    x = x * (1.0 / nrm)
    rho_prev = -1.0
    for it in range(1, max_iter + 1):
        z = op.adjoint(op.apply(x))
        rho = x.dot(z)
        if rho <= 0:
            return 0.0, True, it
        if rho_prev >= 0 and abs(rho - rho_prev) <= tol * rho:
            return float(np.sqrt(rho)), True, it
        rho_prev = rho
        znrm = z.norm()
        if znrm == 0:
            return 0.0, True, it
        x = z * (1.0 / znrm)
    return float(np.sqrt(max(rho_prev, 0.0))), False, max_iter


def operator_norm_estimate(
    op: LinearOperator, tol: float = 1e-12, max_iter: int = 5000, seed: int = 0
) -> float:
    """Largest-singular-value estimate of ``op`` (lower bound up to tol)."""
    value, converged, _ = power_iteration(op, tol, max_iter, seed)
    if not converged:
        warnings.warn(
            "operator norm power iteration did not reach tolerance; "
            "returning the best estimate",
            RuntimeWarning,
            stacklevel=2,
        )
    return value
