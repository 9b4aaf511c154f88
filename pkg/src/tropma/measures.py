"""Measures on the boundaries A and B: atoms, face-uniform pieces, comparison."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .geometry import (
    BaryPoint,
    SideError,
    face_chart_indices,
    orbit,
    total_measure,
)

# Atoms closer than this (barycentric sup distance) are merged.
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class AtomicMeasure:
    """A finite nonnegative atomic measure on one side."""

    side: str
    atoms: tuple  # of (BaryPoint, float weight)

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise SideError(f"side must be 'A' or 'B', got {self.side!r}")
        atoms = _merge_atoms(self.atoms, MERGE_TOL)
        for p, w in atoms:
            if p.side != self.side:
                raise SideError("atom points must lie on the measure's side")
            if w < 0:
                raise ValueError(f"negative atom weight {w}")
        object.__setattr__(self, "atoms", atoms)

    @property
    def d(self) -> int:
        return self.atoms[0][0].d

    def total_mass(self) -> float:
        return float(sum(w for _, w in self.atoms))

    def points(self) -> list[BaryPoint]:
        return [p for p, _ in self.atoms]

    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    def _index(self) -> "_PointIndex":
        try:
            return object.__getattribute__(self, "_point_index")
        except AttributeError:
            index = _PointIndex(self.d + 2)
            for idx, (q, _) in enumerate(self.atoms):
                index.add(q.weights, idx)
            object.__setattr__(self, "_point_index", index)
            return index

    def weight_at(self, p: BaryPoint, tol: float = MERGE_TOL) -> float:
        index = self._index()
        for idx in index.candidates(p.weights):
            q, w = self.atoms[idx]
            if p.same_point(q, tol):
                return w
        return 0.0

    def scaled(self, factor: float) -> "AtomicMeasure":
        return AtomicMeasure(
            self.side, tuple((p, w * factor) for p, w in self.atoms)
        )

    def integrate(self, f) -> float:
        """Integral of f (anything with .value(BaryPoint)) against the measure."""
        return float(sum(w * f.value(p) for p, w in self.atoms))

    def same_measure(self, other: "AtomicMeasure", tol: float = 1e-9) -> bool:
        if self.side != other.side or len(self.atoms) != len(other.atoms):
            return False
        return all(
            abs(other.weight_at(p, tol) - w) <= tol for p, w in self.atoms
        ) and all(abs(self.weight_at(p, tol) - w) <= tol for p, w in other.atoms)

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "atoms": [
                {"point": p.to_json(), "weight": float(w)} for p, w in self.atoms
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AtomicMeasure":
        atoms = tuple(
            (BaryPoint.from_json(a["point"]), float(a["weight"]))
            for a in obj["atoms"]
        )
        return cls(obj["side"], atoms)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        k = self.d + 2
        writer.writerow([f"w{j}" for j in range(k)] + ["weight"])
        for p, w in self.atoms:
            writer.writerow([f"{x:.17g}" for x in p.weights] + [f"{w:.17g}"])
        return buf.getvalue()


class _PointIndex:
    """Floor-grid spatial index over barycentric weights.

    The bucket width (1e-6) is far above the merge tolerance, so any two
    points within tolerance land in the same or an adjacent bucket; exact
    duplicates hit the zero-offset bucket first.
    """

    SCALE = 1e6

    def __init__(self, k: int):
        import itertools

        self.buckets: dict[tuple, list[int]] = {}
        offs = np.array(list(itertools.product((-1, 0, 1), repeat=k)))
        order = np.argsort(np.abs(offs).sum(axis=1), kind="stable")
        self.offsets = offs[order]

    def _key(self, w: np.ndarray) -> np.ndarray:
        return np.floor(w * self.SCALE).astype(int)

    def add(self, w: np.ndarray, idx: int) -> None:
        self.buckets.setdefault(tuple(self._key(w)), []).append(idx)

    def candidates(self, w: np.ndarray):
        base = self._key(w)
        for off in self.offsets:
            yield from self.buckets.get(tuple(base + off), ())


def _merge_atoms(atoms: Iterable, tol: float) -> tuple:
    atoms = list(atoms)
    merged: list[list] = []
    index = None
    for p, w in atoms:
        if index is None:
            index = _PointIndex(p.weights.size)
        hit = None
        for idx in index.candidates(p.weights):
            if merged[idx][0].same_point(p, tol):
                hit = idx
                break
        if hit is not None:
            merged[hit][1] += float(w)
        else:
            merged.append([p, float(w)])
            index.add(p.weights, len(merged) - 1)
    if not merged:
        raise ValueError("a measure needs at least one atom")
    return tuple((p, w) for p, w in merged)


@dataclass(frozen=True)
class LebesgueMeasure:
    """Face-constant density against the normalized Lebesgue measure.

    density[l] multiplies the normalized mass of face l (each face carries
    total/(d+2)); density 1 everywhere is the reference measure itself.
    """

    side: str
    density: tuple  # one nonnegative real per face

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise SideError(f"side must be 'A' or 'B', got {self.side!r}")
        dens = tuple(float(x) for x in self.density)
        if len(dens) < 3:
            raise ValueError("need one density per face (d+2 >= 3)")
        if min(dens) < 0:
            raise ValueError("face densities must be nonnegative")
        object.__setattr__(self, "density", dens)

    @property
    def d(self) -> int:
        return len(self.density) - 2

    def total_mass(self) -> float:
        face = total_measure(self.side, self.d) / (self.d + 2)
        return float(sum(self.density)) * face

    def to_atoms(self, budget_per_face: int, seed: int = 0) -> AtomicMeasure:
        """Low-discrepancy atomic approximation with exact total mass."""
        d = self.d
        face = total_measure(self.side, d) / (d + 2)
        atoms = []
        for l in range(d + 2):
            if self.density[l] == 0:
                continue
            pts = _halton_simplex(d, budget_per_face, seed=seed + 7 * l)
            w = self.density[l] * face / budget_per_face
            J = face_chart_indices(l, d)
            for lam in pts:
                full = np.zeros(d + 2)
                full[J] = lam
                atoms.append((BaryPoint.repaired(self.side, full), w))
        return AtomicMeasure(self.side, tuple(atoms))

    def to_json(self) -> dict:
        return {"side": self.side, "faceDensity": [float(x) for x in self.density]}

    @classmethod
    def from_json(cls, obj: dict) -> "LebesgueMeasure":
        return cls(obj["side"], tuple(obj["faceDensity"]))


def measure_from_json(obj: dict):
    if "faceDensity" in obj:
        return LebesgueMeasure.from_json(obj)
    return AtomicMeasure.from_json(obj)


def _halton_simplex(d: int, count: int, seed: int = 0) -> np.ndarray:
    """Low-discrepancy points of the standard d-simplex (barycentric, d+1)."""
    from scipy.stats import qmc

    sampler = qmc.Halton(d=d, scramble=True, seed=seed)
    u = sampler.random(count)
    cuts = np.sort(u, axis=1)
    padded = np.hstack([np.zeros((count, 1)), cuts, np.ones((count, 1))])
    return np.diff(padded, axis=1)


def symmetrize(m: AtomicMeasure) -> AtomicMeasure:
    """Average of the measure over the G-action; idempotent, mass preserving."""
    atoms = []
    for p, w in m.atoms:
        orb = orbit(p)
        share = w / len(orb)
        atoms.extend((q, share) for q in orb)
    return AtomicMeasure(m.side, tuple(atoms))


def is_symmetric_measure(m: AtomicMeasure, tol: float = 1e-9) -> bool:
    return m.same_measure(symmetrize(m), tol)


@dataclass(frozen=True)
class MeasureDistance:
    """A bounded-Lipschitz discrepancy value from a fixed probe family."""

    value: float


class _ProbeFn:
    """min of a few affine forms in the weights; 1-Lipschitz for ell-1."""

    def __init__(self, planes: np.ndarray, consts: np.ndarray):
        self.planes = planes
        self.consts = consts

    def value(self, p: BaryPoint) -> float:
        return float((self.planes @ p.weights + self.consts).min())


def lipschitz_probes(d: int, count: int, seed: int = 0) -> list[_ProbeFn]:
    """A deterministic family of 1-Lipschitz (barycentric ell-1) functions."""
    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(count):
        npl = int(rng.integers(1, 4))
        # sup-norm 1/2 gives |u.(w - w')| <= ||w - w'||_1 / 2... keep <= 1.
        planes = rng.uniform(-0.5, 0.5, size=(npl, d + 2))
        consts = rng.uniform(-0.5, 0.5, size=npl)
        probes.append(_ProbeFn(planes, consts))
    return probes


def bl_distance(m1, m2, probe_count: int = 128, seed: int = 0,
                atom_budget: int = 512) -> MeasureDistance:
    """sup over the probe family of |integral f dm1 - integral f dm2|.

    LebesgueMeasure arguments are replaced by a low-discrepancy atomic
    approximation with `atom_budget` points per face.
    """
    if m1.side != m2.side:
        raise SideError("measures live on different sides")
    if isinstance(m1, LebesgueMeasure):
        m1 = m1.to_atoms(atom_budget, seed=seed + 1)
    if isinstance(m2, LebesgueMeasure):
        m2 = m2.to_atoms(atom_budget, seed=seed + 2)
    d = m1.d
    best = 0.0
    for f in lipschitz_probes(d, probe_count, seed=seed):
        best = max(best, abs(m1.integrate(f) - m2.integrate(f)))
    return MeasureDistance(best)


def lebesgue_on_B(d: int, budget_per_face: int, seed: int = 0) -> AtomicMeasure:
    """Symmetric atomic stand-in for Lebesgue on B, rescaled to mass |A|.

    The solver's normalization requires targets of total mass
    (d+2)^{d+1}/d!, so the B-side reference measure is rescaled accordingly.
    """
    base = LebesgueMeasure("B", (1.0,) * (d + 2)).to_atoms(budget_per_face, seed=seed)
    sym = symmetrize(base)
    return sym.scaled(total_measure("A", d) / sym.total_mass())
