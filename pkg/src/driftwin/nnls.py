"""Lawson-Hanson active-set non-negative least squares.

Small dense solver: minimize ||Ax - b||_2 subject to x >= 0.  Normal
equations on the passive column set are solved via QR.  Entering-variable
ties break toward the lowest index so results are deterministic across
platforms.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class NnlsResult:
    x: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool


def _solve_passive(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solve restricted to the passive columns."""
    Q, R = np.linalg.qr(A)
    rhs = Q.T @ b
    diag = np.abs(np.diag(R))
    if diag.size and diag.min() > 1e-13 * max(diag.max(), 1.0):
        return np.linalg.solve(R, rhs)
    return np.linalg.lstsq(A, b, rcond=None)[0]


def nnls(
    A: np.ndarray,
    b: np.ndarray,
    max_iter: int | None = None,
    tol: float = 1e-10,
) -> NnlsResult:
    """Solve min ||Ax - b|| s.t. x >= 0 to KKT tolerance ``tol``.

    The tolerance is scaled by the infinity norm of A^T A: positive
    coordinates must have near-zero gradient, zero coordinates must have
    non-negative gradient up to the scaled tolerance.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"A is {A.shape}, b is {b.shape}")
    p, q = A.shape
    if p < 1 or q < 1:
        raise DimensionMismatch("A must have at least one row and column")
    if max_iter is None:
        max_iter = 3 * q
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    scale = max(np.abs(A.T @ A).sum(axis=1).max(), np.finfo(float).tiny)
    grad_tol = tol * scale

    x = np.zeros(q)
    passive = np.zeros(q, dtype=bool)
    iterations = 0
    converged = False

    while iterations < max_iter:
        w = A.T @ (b - A @ x)
        active = ~passive
        if not active.any() or w[active].max() <= grad_tol:
            converged = True
            break
        iterations += 1
        # np.argmax takes the first maximizer: lowest-index tie break
        candidates = np.flatnonzero(active)
        passive[candidates[np.argmax(w[candidates])]] = True

        while True:
            z = np.zeros(q)
            z[passive] = _solve_passive(A[:, passive], b)
            if z[passive].min() > 0.0:
                x = z
                break
            # feasibility restoration: step toward z until a passive
            # variable hits zero, then drop it from the passive set
            mask = passive & (z <= 0.0)
            diff = x[mask] - z[mask]
            ratios = np.where(diff > 0.0, x[mask] / np.where(diff > 0.0, diff, 1.0), 0.0)
            alpha = float(ratios.min())
            x = x + alpha * (z - x)
            passive &= x > 1e-15 * max(1.0, np.abs(x).max())
            x[~passive] = 0.0
            if not passive.any():
                break

    return NnlsResult(
        x=x,
        residual_norm=float(np.linalg.norm(A @ x - b)),
        iterations=iterations,
        converged=converged,
    )
