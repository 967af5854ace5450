"""Nelder-Mead baseline: derivative-free search over the time weights.

Only P is optimized, in softmax parameterization so every candidate is a
valid simplex point; D is obtained from the NNLS D-step at every
objective evaluation and at termination.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, UncoveredAtom
from .reconstruction import (
    DIRECT,
    ReconstructionConfig,
    ReconstructionResult,
    _d_step,
    _direct_objective_arrays,
    _objective_arrays,
)
from .wds import DistributionProcess, WindowObservations
from .windows import IncidenceMatrix

# standard coefficients: reflect, expand, contract, shrink
REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5
INITIAL_STEP = 0.05


@dataclass
class SimplexState:
    """Vertices and values kept sorted ascending by value."""

    vertices: np.ndarray  # (d+1, d)
    values: np.ndarray    # (d+1,)

    def sort(self):
        order = np.argsort(self.values, kind="stable")
        self.vertices = self.vertices[order]
        self.values = self.values[order]


def nelder_mead_minimize(
    f,
    x0: np.ndarray,
    max_iter: int = 2000,
    xtol: float = 1e-10,
    ftol: float = 1e-14,
    step: float = INITIAL_STEP,
):
    """Minimize ``f`` from ``x0``; returns (x_best, f_best, trace, converged)."""
    x0 = np.asarray(x0, dtype=float)
    d = x0.shape[0]
    vertices = np.vstack([x0] + [x0 + step * np.eye(d)[i] for i in range(d)])
    values = np.array([f(v) for v in vertices])
    state = SimplexState(vertices=vertices, values=values)
    state.sort()

    trace = [float(state.values[0])]
    converged = False
    for _ in range(max_iter):
        best, worst = state.values[0], state.values[-1]
        if (
            worst - best <= ftol
            and np.abs(state.vertices - state.vertices[0]).max() <= xtol
        ):
            converged = True
            break
        centroid = state.vertices[:-1].mean(axis=0)
        xr = centroid + REFLECT * (centroid - state.vertices[-1])
        fr = f(xr)
        if fr < state.values[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                state.vertices[-1], state.values[-1] = xe, fe
            else:
                state.vertices[-1], state.values[-1] = xr, fr
        elif fr < state.values[-2]:
            state.vertices[-1], state.values[-1] = xr, fr
        else:
            if fr < state.values[-1]:
                xc = centroid + CONTRACT * (xr - centroid)
            else:
                xc = centroid + CONTRACT * (state.vertices[-1] - centroid)
            fc = f(xc)
            if fc < min(fr, state.values[-1]):
                state.vertices[-1], state.values[-1] = xc, fc
            else:
                state.vertices[1:] = state.vertices[0] + SHRINK * (
                    state.vertices[1:] - state.vertices[0]
                )
                state.values[1:] = [f(v) for v in state.vertices[1:]]
        state.sort()
        trace.append(float(state.values[0]))
    return state.vertices[0], float(state.values[0]), trace, converged


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def nelder_mead_reconstruct(
    incidence: IncidenceMatrix,
    obs: WindowObservations,
    config: ReconstructionConfig = ReconstructionConfig(),
    max_iter: int | None = None,
) -> ReconstructionResult:
    """Reconstruct (P, D) by Nelder-Mead over softmax-parameterized P."""
    W = incidence.entries
    R = obs.R
    if obs.incidence.entries.shape != W.shape or not np.array_equal(
        obs.incidence.entries, W
    ):
        raise DimensionMismatch("observations were built over a different incidence")
    if np.any(W.sum(axis=0) == 0):
        raise UncoveredAtom("some atom is covered by no window")

    variant = config.objective_variant
    obj_fn = _direct_objective_arrays if variant == DIRECT else _objective_arrays
    N = W.shape[1]

    def evaluate(z: np.ndarray) -> float:
        P = _softmax(z)
        D = _d_step(W, R, P, variant, config)
        return obj_fn(W, R, P, D)

    if N == 1:
        P = np.array([1.0])
        D = _d_step(W, R, P, variant, config)
        val = obj_fn(W, R, P, D)
        return ReconstructionResult(
            process=DistributionProcess(P=P, D=D),
            objective=val,
            objective_trace=(val,),
            converged=True,
            iterations=0,
        )

    if max_iter is None:
        max_iter = 200 * N
    z0 = np.zeros(N)
    z_best, f_best, trace, converged = nelder_mead_minimize(
        evaluate, z0, max_iter=max_iter,
        ftol=config.convergence_tol, xtol=1e-10,
    )
    P = _softmax(z_best)
    D = _d_step(W, R, P, variant, config)
    return ReconstructionResult(
        process=DistributionProcess(P=P, D=D),
        objective=f_best,
        objective_trace=tuple(trace),
        converged=converged,
        iterations=len(trace) - 1,
    )
