"""Forward model over atoms: distribution processes, induced window
observations, drift / axiom / compatibility checks, and the exact
noiseless time-weight recovery oracle."""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ConstantWDS, DimensionMismatch, NullWindowMass, UnchainableAtom
from .nnls import nnls
from .reports import AxiomCheck, AxiomReport, CompatibilityReport
from .windows import IncidenceMatrix, TimeAtomSet

# user-supplied data may be slightly off row-stochastic; internally
# produced matrices are held to a tighter tolerance
INPUT_ROW_TOL = 1e-9
INTERNAL_ROW_TOL = 1e-12
DRIFT_TOL = 1e-10


@dataclass(frozen=True)
class DistributionProcess:
    """Ground-truth or reconstructed pair (P, D) over a fixed atom set.

    P: length-N simplex vector of time weights.
    D: N x m row-stochastic matrix; D[t, j] is the mass of data cell j
    at time cell t.
    """

    P: np.ndarray
    D: np.ndarray
    atom_set: TimeAtomSet | None = None

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        D = np.asarray(self.D, dtype=float)
        if P.ndim != 1 or D.ndim != 2 or D.shape[0] != P.shape[0]:
            raise DimensionMismatch(f"P is {P.shape}, D is {D.shape}")
        if np.any(P < 0) or np.any(D < 0):
            raise ValueError("P and D must be nonnegative")
        if abs(P.sum() - 1.0) > INTERNAL_ROW_TOL:
            raise ValueError(f"P must sum to 1, got {P.sum()!r}")
        if np.abs(D.sum(axis=1) - 1.0).max() > INTERNAL_ROW_TOL:
            raise ValueError("rows of D must sum to 1")
        if self.atom_set is not None and len(self.atom_set) != P.shape[0]:
            raise DimensionMismatch("atom_set size does not match P")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "D", D)

    @property
    def n_atoms(self) -> int:
        return self.P.shape[0]

    @property
    def n_categories(self) -> int:
        return self.D.shape[1]


@dataclass(frozen=True)
class WindowObservations:
    """n x m matrix R of window mean distributions plus the incidence."""

    R: np.ndarray
    incidence: IncidenceMatrix

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        if R.ndim != 2:
            raise DimensionMismatch(f"R must be 2-D, got {R.shape}")
        if R.shape[0] != self.incidence.n_windows:
            raise DimensionMismatch("R row count does not match incidence")
        if np.any(R < 0):
            raise ValueError("R must be nonnegative")
        if np.abs(R.sum(axis=1) - 1.0).max() > INPUT_ROW_TOL:
            raise ValueError("rows of R must sum to 1")
        object.__setattr__(self, "R", R)

    @property
    def n_windows(self) -> int:
        return self.R.shape[0]

    @property
    def n_categories(self) -> int:
        return self.R.shape[1]


# --------------------------------------------------------------------------


def induce_observations(
    process: DistributionProcess, incidence: IncidenceMatrix
) -> WindowObservations:
    """Forward map R = diag(WP)^-1 W diag(P) D."""
    W = incidence.entries
    if W.shape[1] != process.n_atoms:
        raise DimensionMismatch("incidence atom count does not match process")
    masses = W @ process.P
    if masses.min() <= 0.0:
        i = int(np.argmin(masses))
        raise NullWindowMass(f"window {i} has zero time mass")
    R = (W * process.P) @ process.D / masses[:, None]
    return WindowObservations(R=R, incidence=incidence)


def has_drift(process: DistributionProcess, tol: float = DRIFT_TOL) -> bool:
    """True iff two positive-weight atoms carry distinct distributions."""
    pos = process.P > 0.0
    if pos.sum() < 2:
        return False
    rows = process.D[pos]
    return float(np.abs(rows - rows[0]).max()) > tol


def _window_masks(incidence: IncidenceMatrix) -> list[frozenset[int]]:
    return [frozenset(np.flatnonzero(row)) for row in incidence.entries]


def _disjoint_families(masks, max_size):
    """Index families of pairwise-disjoint windows whose union is a window."""
    union_lookup: dict[frozenset, int] = {}
    for i, m in enumerate(masks):
        union_lookup.setdefault(m, i)
    for size in range(2, max_size + 1):
        for family in combinations(range(len(masks)), size):
            sets = [masks[i] for i in family]
            total = frozenset().union(*sets)
            if len(total) != sum(len(s) for s in sets):
                continue  # not pairwise disjoint
            u = union_lookup.get(total)
            if u is not None and u not in family:
                yield family, u


def _best_convex_combination(parts: np.ndarray, target: np.ndarray):
    """Least-squares weights on the simplex for target ~ sum_k w_k parts_k."""
    scale = max(np.abs(parts).max(), 1.0)
    S = np.vstack([parts.T, scale * np.ones(parts.shape[0])])
    rhs = np.concatenate([target, [scale]])
    res = nnls(S, rhs)
    w = res.x
    s = w.sum()
    if s <= 0.0:
        return np.full(parts.shape[0], np.nan), np.inf
    w = w / s
    dev = float(np.abs(w @ parts - target).max())
    return w, dev


def check_wds_axioms(
    obs: WindowObservations,
    weights: np.ndarray | None = None,
    tol: float = 1e-8,
    max_family_size: int = 3,
) -> AxiomReport:
    """Check the finite-scale WDS axioms on the observed window system.

    Axiom 1: windows covering identical atom sets have identical rows.
    Axiom 2 (monotone limits) has no finite content and is reported as
    not applicable.  Axiom 3: for every disjoint window family (up to
    ``max_family_size``) whose union is present, the union row is a
    strictly-positive convex combination of the part rows; with
    ``weights`` given, with exactly those weights.
    """
    R = obs.R
    masks = _window_masks(obs.incidence)
    checks: list[AxiomCheck] = []

    groups: dict[frozenset, list[int]] = {}
    for i, m in enumerate(masks):
        groups.setdefault(m, []).append(i)
    witness1 = None
    for members in groups.values():
        for i, j in combinations(members, 2):
            dev = float(np.abs(R[i] - R[j]).max())
            if dev > tol:
                witness1 = {"windows": (i, j), "max_deviation": dev}
                break
        if witness1:
            break
    checks.append(
        AxiomCheck("axiom1_null_invariance", witness1 is None, witness=witness1)
    )

    checks.append(
        AxiomCheck(
            "axiom2_limits",
            True,
            detail="not applicable - finite system",
        )
    )

    witness3 = None
    worst = 0.0
    for family, u in _disjoint_families(masks, max_family_size):
        parts = R[list(family)]
        if weights is not None:
            w = np.asarray(weights, dtype=float)[list(family)]
            if w.min() <= 0.0:
                witness3 = {"family": family, "union": u,
                            "max_deviation": float("inf"),
                            "reason": "non-positive weight"}
                break
            w = w / w.sum()
            dev = float(np.abs(w @ parts - R[u]).max())
        else:
            w, dev = _best_convex_combination(parts, R[u])
        worst = max(worst, dev)
        if dev > tol:
            witness3 = {"family": family, "union": u, "max_deviation": dev}
            break
    checks.append(
        AxiomCheck(
            "axiom3_convex_mixture",
            witness3 is None,
            witness=witness3,
            detail=f"max residual {worst:.3e}",
        )
    )
    return AxiomReport(checks=tuple(checks))


def check_compatibility(
    obs: WindowObservations,
    P: np.ndarray,
    tol: float = 1e-8,
    max_family_size: int = 3,
) -> CompatibilityReport:
    """Check whether candidate time weights P act as the mixture weights.

    Condition 1: every window has strictly positive mass under P.
    Condition 2 (null windows carry no mass) has no finite content here
    since atoms outside every window are never represented.  Condition 3:
    for every disjoint family with union present, the union row equals
    the window-mass-weighted mixture of the part rows.
    """
    P = np.asarray(P, dtype=float)
    W = obs.incidence.entries
    if P.shape != (W.shape[1],):
        raise DimensionMismatch(f"P has shape {P.shape}, expected ({W.shape[1]},)")
    if np.any(P < 0):
        raise ValueError("P must be nonnegative")
    masks = _window_masks(obs.incidence)
    masses = W @ P
    checks: list[AxiomCheck] = []

    if masses.min() > 0.0:
        checks.append(AxiomCheck("condition1_positive_mass", True))
    else:
        i = int(np.argmin(masses))
        checks.append(
            AxiomCheck(
                "condition1_positive_mass",
                False,
                witness={"window": i, "mass": float(masses[i])},
            )
        )

    checks.append(
        AxiomCheck(
            "condition2_null_mass",
            True,
            detail="not applicable - every represented atom lies in a window",
        )
    )

    worst = 0.0
    witness = None
    for family, u in _disjoint_families(masks, max_family_size):
        lam = masses[list(family)]
        if lam.sum() <= 0.0:
            continue  # already flagged under condition 1
        mix = (lam / lam.sum()) @ obs.R[list(family)]
        dev = float(np.abs(mix - obs.R[u]).max())
        if dev > worst:
            worst = dev
            witness = {"family": family, "union": u, "max_deviation": dev}
    checks.append(
        AxiomCheck(
            "condition3_mixture_weights",
            worst <= tol,
            witness=witness if worst > tol else None,
            detail=f"max residual {worst:.3e}",
        )
    )
    return CompatibilityReport(checks=tuple(checks), max_residual=worst)


# --------------------------------------------------------------------------
# exact noiseless recovery of the time weights


def _mixture_ratio(r_i, r_j, r_u) -> float:
    """Least-squares lambda in r_u = lambda r_i + (1-lambda) r_j."""
    d = r_i - r_j
    return float(d @ (r_u - r_j) / (d @ d))


def exact_time_weights(obs: WindowObservations, tol: float = DRIFT_TOL) -> np.ndarray:
    """Recover the time weights of a noiseless, non-constant system.

    For each disjoint window pair (i, j) with distinct rows and union u
    present, the 1-D mixture ratio in R_u = lambda R_i + (1-lambda) R_j
    fixes the mass ratio of i and j.  Ratios are propagated (together
    with union sum relations) from the best-conditioned anchor pair, and
    the masses of the singleton-atom windows are normalized into P.
    """
    R = obs.R
    n = obs.n_windows
    masks = _window_masks(obs.incidence)
    n_atoms = obs.incidence.n_atoms

    spread = 0.0
    for i, j in combinations(range(n), 2):
        spread = max(spread, float(np.abs(R[i] - R[j]).max()))
    if spread <= tol:
        raise ConstantWDS("all window rows coincide; weights are arbitrary")

    triples = []  # (i, j, union_index, rows_distinct)
    union_lookup: dict[frozenset, int] = {}
    for i, m in enumerate(masks):
        union_lookup.setdefault(m, i)
    for i, j in combinations(range(n), 2):
        if masks[i] & masks[j]:
            continue
        u = union_lookup.get(masks[i] | masks[j])
        if u is None or u in (i, j):
            continue
        distinct = float(np.abs(R[i] - R[j]).max()) > tol
        triples.append((i, j, u, distinct))

    anchors = [t for t in triples if t[3]]
    if not anchors:
        raise UnchainableAtom(
            "no disjoint window pair with distinct rows and union present"
        )
    ai, aj, au, _ = max(
        anchors, key=lambda t: float(np.abs(R[t[0]] - R[t[1]]).max())
    )
    lam = _mixture_ratio(R[ai], R[aj], R[au])
    # unnormalized masses; any positive rescaling yields the same P
    mass: dict[int, float] = {au: 1.0, ai: lam, aj: 1.0 - lam}

    changed = True
    while changed:
        changed = False
        for i, j, u, distinct in triples:
            known = [k for k in (i, j, u) if k in mass]
            if len(known) == 3:
                continue
            if distinct:
                lam = _mixture_ratio(R[i], R[j], R[u])
                if u in mass:
                    mass[i] = lam * mass[u]
                    mass[j] = (1.0 - lam) * mass[u]
                elif i in mass and 0.0 < lam:
                    mass[u] = mass[i] / lam
                    mass[j] = mass[u] - mass[i]
                elif j in mass and lam < 1.0:
                    mass[u] = mass[j] / (1.0 - lam)
                    mass[i] = mass[u] - mass[j]
                else:
                    continue
                changed = True
            elif len(known) == 2:
                # identical rows: only the sum relation mass_u = mass_i + mass_j
                if u not in mass:
                    mass[u] = mass[i] + mass[j]
                elif i not in mass:
                    mass[i] = mass[u] - mass[j]
                else:
                    mass[j] = mass[u] - mass[i]
                changed = True

    P = np.zeros(n_atoms)
    for t in range(n_atoms):
        w = union_lookup.get(frozenset({t}))
        if w is None or w not in mass:
            raise UnchainableAtom(
                f"atom {t}: no singleton window reachable through the ratio chain"
            )
        P[t] = mass[w]
    total = P.sum()
    if total <= 0.0:
        raise UnchainableAtom("propagated masses are not positive")
    return P / total
