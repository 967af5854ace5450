"""Finite window algebra over half-open real intervals.

Windows are finite unions of half-open intervals [a, b).  ``atomize``
partitions the union of a family of windows into elementary cells
(atoms) by an endpoint sweep and produces the binary window-by-atom
incidence matrix.  ``check_window_system`` verifies the window-system
axioms for the finite family generated by the atoms.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateWindow, EmptyInput, TooLarge
from .reports import AxiomCheck, AxiomReport

Interval = tuple[float, float]

# --------------------------------------------------------------------------
# interval-set helpers (lists of disjoint, sorted half-open intervals)


def merge_intervals(intervals) -> tuple[Interval, ...]:
    """Sort and merge touching/overlapping half-open intervals."""
    ivs = sorted((float(a), float(b)) for a, b in intervals if b > a)
    out: list[Interval] = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return tuple(out)


def intersect_intervals(xs, ys) -> tuple[Interval, ...]:
    out = []
    for a, b in xs:
        for c, d in ys:
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                out.append((lo, hi))
    return merge_intervals(out)


def subtract_intervals(xs, ys) -> tuple[Interval, ...]:
    out = []
    for a, b in xs:
        pieces = [(a, b)]
        for c, d in ys:
            nxt = []
            for lo, hi in pieces:
                if d <= lo or c >= hi:
                    nxt.append((lo, hi))
                    continue
                if lo < c:
                    nxt.append((lo, c))
                if d < hi:
                    nxt.append((d, hi))
            pieces = nxt
        out.extend(pieces)
    return merge_intervals(out)


def total_length(intervals) -> float:
    return float(sum(b - a for a, b in intervals))


def contains_point(intervals, t: float) -> bool:
    return any(a <= t < b for a, b in intervals)


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class IntervalWindow:
    """A named window: a disjoint, sorted union of half-open intervals."""

    id: str
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        for a, b in ivs:
            if not a < b:
                raise ValueError(f"window {self.id!r}: empty interval [{a}, {b})")
        for (_, b1), (a2, _) in zip(ivs, ivs[1:]):
            if a2 < b1:
                raise ValueError(
                    f"window {self.id!r}: intervals must be disjoint and sorted"
                )
        object.__setattr__(self, "intervals", ivs)

    @property
    def length(self) -> float:
        return total_length(self.intervals)

    def contains(self, t: float) -> bool:
        return contains_point(self.intervals, t)


@dataclass(frozen=True)
class Atom:
    """Elementary cell: all time points sharing one membership signature.

    ``signature[i]`` is +1 if the atom lies inside window i, -1 otherwise.
    Realized as a finite union of half-open intervals.
    """

    index: int
    signature: tuple[int, ...]
    intervals: tuple[Interval, ...]
    length: float

    def contains(self, t: float) -> bool:
        return contains_point(self.intervals, t)


@dataclass(frozen=True)
class TimeAtomSet:
    atoms: tuple[Atom, ...]
    horizon: Interval

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class IncidenceMatrix:
    """n x N binary matrix; entries[i][t] = 1 iff atom t lies in window i."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2:
            raise ValueError("incidence matrix must be 2-D")
        if not np.all((e == 0.0) | (e == 1.0)):
            raise ValueError("incidence entries must be 0 or 1")
        if e.shape[0] > 0 and not np.all(e.sum(axis=1) >= 1):
            raise ValueError("every window must contain at least one atom")
        object.__setattr__(self, "entries", e)

    @property
    def n_windows(self) -> int:
        return self.entries.shape[0]

    @property
    def n_atoms(self) -> int:
        return self.entries.shape[1]


# --------------------------------------------------------------------------
# atomization


def atomize(windows: list[IntervalWindow]) -> tuple[TimeAtomSet, IncidenceMatrix]:
    """Partition the union of ``windows`` into atoms by an endpoint sweep.

    Every elementary segment between consecutive endpoints is classified
    by its membership signature; segments with identical signatures merge
    into one atom.  The all-outside cell (complement of the union inside
    the horizon) is dropped.  Endpoints are compared exactly as supplied.
    """
    if not windows:
        raise EmptyInput("windows list is empty")
    for w in windows:
        if w.length <= 0.0:
            raise DegenerateWindow(f"window {w.id!r} has zero total length")

    endpoints = sorted({e for w in windows for iv in w.intervals for e in iv})
    horizon = (endpoints[0], endpoints[-1])

    by_signature: dict[tuple[int, ...], list[Interval]] = {}
    for a, b in zip(endpoints, endpoints[1:]):
        mid = 0.5 * (a + b)
        sig = tuple(1 if w.contains(mid) else -1 for w in windows)
        if all(s == -1 for s in sig):
            continue  # complement cell, not an atom
        by_signature.setdefault(sig, []).append((a, b))

    ordered = sorted(by_signature.items(), key=lambda kv: kv[1][0][0])
    atoms = tuple(
        Atom(
            index=k,
            signature=sig,
            intervals=merge_intervals(ivs),
            length=total_length(ivs),
        )
        for k, (sig, ivs) in enumerate(ordered)
    )
    entries = np.array(
        [[1.0 if atom.signature[i] == 1 else 0.0 for atom in atoms]
         for i in range(len(windows))]
    )
    return TimeAtomSet(atoms=atoms, horizon=horizon), IncidenceMatrix(entries)


# --------------------------------------------------------------------------
# window-system axiom checker


def check_window_system(
    atoms: TimeAtomSet,
    null_windows: list[IntervalWindow] = (),
    mode: str = "auto",
    sample_size: int = 256,
    seed: int = 0,
    member_cap: int = 1 << 16,
    length_tol: float = 1e-12,
) -> AxiomReport:
    """Check the window-system axioms on the family generated by the atoms.

    The generated family consists of all nonempty unions of atoms; the
    null ideal is Lebesgue-null finite interval unions plus the declared
    ``null_windows``.  When the family has more than ``member_cap``
    members the pair checks run on a seeded random subfamily and the
    sample size is recorded in the report.
    """
    n = len(atoms.atoms)
    n_members = (1 << n) - 1
    exhaustive = n_members <= member_cap
    if mode == "exhaustive" and not exhaustive:
        raise TooLarge(
            f"generated family has {n_members} members, cap is {member_cap}"
        )
    if mode == "sampled":
        exhaustive = False

    checks: list[AxiomCheck] = []

    # axiom 1: closed under finite disjoint unions.  Members are unions
    # of atoms, so the index-set union of two members with disjoint index
    # sets is again a member; the substantive content is that distinct
    # atoms are actually disjoint sets.  In sampled mode additionally
    # spot-check member pairs drawn from the generated family.
    overlap = None
    for a, b in combinations(atoms.atoms, 2):
        common = intersect_intervals(a.intervals, b.intervals)
        if total_length(common) > length_tol:
            overlap = (a.index, b.index, total_length(common))
            break
    if overlap is None and not exhaustive:
        rng = np.random.default_rng(seed)
        for _ in range(sample_size):
            mask_a = rng.integers(0, 2, size=n)
            mask_b = (1 - mask_a) * rng.integers(0, 2, size=n)
            ivs_a = [iv for t in np.flatnonzero(mask_a)
                     for iv in atoms.atoms[t].intervals]
            ivs_b = [iv for t in np.flatnonzero(mask_b)
                     for iv in atoms.atoms[t].intervals]
            common = intersect_intervals(ivs_a, ivs_b)
            if total_length(common) > length_tol:
                overlap = (tuple(np.flatnonzero(mask_a)),
                           tuple(np.flatnonzero(mask_b)),
                           total_length(common))
                break
    if overlap is None:
        detail = (
            f"exhaustive over {n_members} members"
            if exhaustive
            else f"sampled subfamily of size {sample_size}"
        )
        checks.append(AxiomCheck("axiom1_disjoint_unions", True, detail=detail))
    else:
        checks.append(
            AxiomCheck(
                "axiom1_disjoint_unions",
                False,
                witness={"atoms": overlap[:2], "overlap_length": overlap[2]},
                detail="atoms overlap; unions are not disjoint",
            )
        )

    # axiom 2: W and N disjoint (length-null ideal) and W u N a semi-ring.
    bad = next((a for a in atoms.atoms if a.length <= length_tol), None)
    if bad is not None:
        checks.append(
            AxiomCheck(
                "axiom2_semi_ring",
                False,
                witness={"atom": bad.index, "length": bad.length},
                detail="zero-length member of W lies in the null ideal",
            )
        )
    else:
        offender = None
        for w in null_windows:
            for a in atoms.atoms:
                common = intersect_intervals(w.intervals, a.intervals)
                if total_length(common) > length_tol:
                    offender = (w.id, a.index, total_length(common))
                    break
            if offender:
                break
        if offender is None:
            checks.append(AxiomCheck("axiom2_semi_ring", True))
        else:
            checks.append(
                AxiomCheck(
                    "axiom2_semi_ring",
                    False,
                    witness={
                        "null_window": offender[0],
                        "atom": offender[1],
                        "overlap_length": offender[2],
                    },
                    detail="declared null window carries positive length inside W",
                )
            )

    # axiom 3: local generation.  The finitely generated family contains
    # every atom by construction, so the sigma-algebra restricted to any
    # member is exactly the atom unions inside it.
    checks.append(
        AxiomCheck(
            "axiom3_locally_generates",
            True,
            detail="holds by construction for the finitely generated family",
        )
    )

    # axiom 4: covering.  Everything in the horizon outside the atoms and
    # the declared null windows must be length-null.
    covered = merge_intervals(
        [iv for a in atoms.atoms for iv in a.intervals]
        + [iv for w in null_windows for iv in w.intervals]
    )
    uncovered = subtract_intervals([atoms.horizon], covered)
    gap = total_length(uncovered)
    if gap <= length_tol:
        checks.append(AxiomCheck("axiom4_covering", True))
    else:
        checks.append(
            AxiomCheck(
                "axiom4_covering",
                False,
                witness={"uncovered_intervals": list(uncovered), "length": gap},
                detail="positive-length region not covered by W or N",
            )
        )

    return AxiomReport(checks=tuple(checks))
