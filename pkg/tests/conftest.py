"""Shared test helpers: random instances, processes, and KKT checks."""

import numpy as np
import pytest

from driftwin import DistributionProcess, induce_observations
from driftwin.windows import IncidenceMatrix


def random_process(rng, N=None, m=None, min_weight=0.05):
    """Random strictly-positive process over N atoms and m categories."""
    if N is None:
        N = int(rng.integers(2, 9))
    if m is None:
        m = int(rng.integers(2, 6))
    P = rng.uniform(min_weight, 1.0, N)
    P = P / P.sum()
    D = rng.dirichlet(np.ones(m), size=N)
    return DistributionProcess(P=P, D=D)


def singleton_union_incidence(N):
    """All singleton windows, adjacent-pair unions, and the full union."""
    rows = [np.eye(N)[t] for t in range(N)]
    rows += [np.eye(N)[t] + np.eye(N)[t + 1] for t in range(N - 1)]
    rows.append(np.ones(N))
    return IncidenceMatrix(np.array(rows))


def induced(process, incidence):
    return induce_observations(process, incidence)


def nnls_kkt_violation(A, x, b):
    """Max KKT violation, scaled: positive coords need zero gradient,
    zero coords need non-negative gradient."""
    g = A.T @ (A @ x - b)
    scale = max(np.abs(A.T @ A).sum(axis=1).max(), np.finfo(float).tiny)
    scale *= max(1.0, float(np.abs(x).max()) if x.size else 1.0)
    viol = np.where(x > 0.0, np.abs(g), np.maximum(-g, 0.0))
    return float(viol.max()) / scale


def projected_gradient_nnls(A, b, max_iter=100_000, tol=1e-14):
    """Accelerated projected gradient NNLS oracle, run to tight KKT
    tolerance; independent of the package's active-set implementation."""
    AtA = A.T @ A
    Atb = A.T @ b
    L = max(np.linalg.norm(A, 2) ** 2, np.finfo(float).tiny)
    scale = max(np.abs(AtA).sum(axis=1).max(), np.finfo(float).tiny)
    x = np.zeros(A.shape[1])
    y = x.copy()
    t = 1.0
    for _ in range(max_iter):
        x_new = np.maximum(y - (AtA @ y - Atb) / L, 0.0)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_new + (t - 1.0) / t_new * (x_new - x)
        x, t = x_new, t_new
        g = AtA @ x - Atb
        if np.where(x > 0.0, np.abs(g), np.maximum(-g, 0.0)).max() <= tol * scale:
            break
    return x


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
