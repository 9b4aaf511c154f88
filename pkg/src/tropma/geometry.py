"""Numerical model of the two dual simplex boundaries and their symmetries.

Everything lives in barycentric coordinates over the d+2 vertices of the
ambient simplices.  The A side is the boundary of the moment simplex (vertices
``m_i``), the B side the boundary of its polar (vertices ``n_i``).  The
permutation group on the d+2 coordinates acts on both sides and leaves the
pairing invariant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Validity tolerance on barycentric constraints (min weight 0, sum 1).
BARY_TOL = 1e-12
# Tolerance for geometric classification and deduplication.
CLASSIFY_TOL = 1e-9

# Orbit enumeration is capped at (d+2)! = 5040.
MAX_ENUM_DIM = 5


class DimensionError(ValueError):
    """Inconsistent or unsupported dimension."""


class SideError(ValueError):
    """Operation applied to the wrong side (A vs B)."""


def check_dim(d: int) -> int:
    d = int(d)
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    return d


def vertex_m(d: int, i: int) -> np.ndarray:
    """Vertex m_i = (d+1)e_i - sum_{j != i} e_j of the A-side simplex."""
    check_dim(d)
    m = -np.ones(d + 2)
    m[i] = d + 1
    return m


def vertex_n(d: int, i: int) -> np.ndarray:
    """Canonical representative -e_i of the B-side vertex n_i."""
    check_dim(d)
    n = np.zeros(d + 2)
    n[i] = -1.0
    return n


def n_canonical(x: np.ndarray) -> np.ndarray:
    """Canonical representative of a class mod constants: max coordinate 0."""
    x = np.asarray(x, dtype=float)
    return x - x.max()


def n_equal(x: np.ndarray, y: np.ndarray, tol: float = CLASSIFY_TOL) -> bool:
    """Equality of B-side vectors modulo addition of a constant."""
    return bool(np.max(np.abs(n_canonical(x) - n_canonical(y))) <= tol)


def pairing(m: np.ndarray, n: np.ndarray) -> float:
    """Pairing <m, n>; well defined for any representative of n since m sums to 0."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    if m.shape != n.shape:
        raise DimensionError(f"shape mismatch {m.shape} vs {n.shape}")
    if abs(m.sum()) > 1e-9 * max(1.0, np.abs(m).max()):
        raise ValueError("first argument must have coordinate sum 0")
    return float(m @ n)


def pairing_weights(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Pairing in barycentric coordinates: 1 - (d+2) sum_j alpha_j beta_j.

    Accepts stacked arrays; broadcasting over leading axes.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    k = alpha.shape[-1]
    return 1.0 - k * np.einsum("...j,...j->...", alpha, beta)


def pairing_matrix(alphas: np.ndarray, betas: np.ndarray) -> np.ndarray:
    """All pairings between rows of `alphas` (A side) and rows of `betas` (B side)."""
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    betas = np.atleast_2d(np.asarray(betas, dtype=float))
    k = alphas.shape[1]
    return 1.0 - k * (alphas @ betas.T)


@dataclass(frozen=True)
class BaryPoint:
    """A point of A or B in barycentric coordinates (min weight 0, sum 1)."""

    side: str
    weights: np.ndarray

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise SideError(f"side must be 'A' or 'B', got {self.side!r}")
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size < 3:
            raise DimensionError("weights must be a vector of length d+2 >= 3")
        if abs(w.min()) > BARY_TOL:
            raise ValueError(f"min weight must be 0, got {w.min():.3e}")
        if abs(w.sum() - 1.0) > BARY_TOL * w.size:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")

    @property
    def d(self) -> int:
        return self.weights.size - 2

    @classmethod
    def repaired(cls, side: str, weights: Sequence[float]) -> "BaryPoint":
        """Clamp and renormalize raw weights; for I/O boundaries only."""
        w = np.asarray(weights, dtype=float)
        w = w - w.min()
        s = w.sum()
        if s <= 0:
            raise ValueError("cannot repair weights with nonpositive total")
        return cls(side, w / s)

    def vector(self) -> np.ndarray:
        """Ambient-coordinate representative (sum 0 on A; canonical on B)."""
        return bary_to_vector(self)

    def same_point(self, other: "BaryPoint", tol: float = CLASSIFY_TOL) -> bool:
        return (
            self.side == other.side
            and self.weights.size == other.weights.size
            and float(np.max(np.abs(self.weights - other.weights))) <= tol
        )

    def to_json(self) -> dict:
        return {"side": self.side, "weights": [float(w) for w in self.weights]}

    @classmethod
    def from_json(cls, obj: dict) -> "BaryPoint":
        return cls.repaired(obj["side"], obj["weights"])

    def __repr__(self):
        ws = ", ".join(f"{w:.6g}" for w in self.weights)
        return f"BaryPoint({self.side}, [{ws}])"


def bary_to_vector(p: BaryPoint) -> np.ndarray:
    """Sum of weights times the matching side's vertices.

    On A this yields the sum-zero representative; on B the canonical one
    (n = -beta has max coordinate 0 since min beta = 0).
    """
    if p.side == "A":
        # m_j = (d+2) e_j - (1,...,1) and the weights sum to 1.
        return (p.weights.size) * p.weights - 1.0
    return -p.weights


def vector_to_bary(x: np.ndarray, side: str) -> BaryPoint:
    """Inverse of :func:`bary_to_vector`; accepts any representative on B."""
    x = np.asarray(x, dtype=float)
    if side == "A":
        w = (x + 1.0) / x.size
    elif side == "B":
        w = -n_canonical(x)
    else:
        raise SideError(f"unknown side {side!r}")
    w = w - w.min()
    s = w.sum()
    if abs(s - 1.0) > 1e-9:
        raise ValueError(f"vector is not on the boundary {side} (weight sum {s!r})")
    return BaryPoint(side, w / s)


@dataclass(frozen=True)
class FaceId:
    """A face (sigma/tau) or a vertex star (S/T) with its index."""

    kind: str  # "sigma" | "tau" | "S" | "T"
    i: int

    def __post_init__(self):
        if self.kind not in ("sigma", "tau", "S", "T"):
            raise ValueError(f"unknown face kind {self.kind!r}")
        if self.i < 0:
            raise ValueError("face index must be nonnegative")

    @property
    def side(self) -> str:
        return "A" if self.kind in ("sigma", "S") else "B"

    def to_json(self) -> dict:
        return {"kind": self.kind, "i": self.i}

    @classmethod
    def from_json(cls, obj: dict) -> "FaceId":
        return cls(obj["kind"], int(obj["i"]))


@dataclass(frozen=True)
class Classification:
    """All faces/stars containing a point, with interiority flags."""

    members: tuple  # of (FaceId, bool interior)
    in_regular_locus: bool  # membership in A_0 (resp. B_0)

    def contains(self, kind: str, i: int, interior: bool | None = None) -> bool:
        for f, flag in self.members:
            if f.kind == kind and f.i == i and (interior is None or flag == interior):
                return True
        return False


def classify(p: BaryPoint, tol: float = CLASSIFY_TOL) -> Classification:
    """Faces and stars containing p, with strict-inequality interior flags.

    On the B side: tau_i = {beta_i = 0}, T_i = {beta_i maximal}; the regular
    locus B_0 is the union of the open faces and open stars.  The A side is
    the mirror statement with sigma_i and S_i.
    """
    w = p.weights
    k = w.size
    face_kind, star_kind = ("sigma", "S") if p.side == "A" else ("tau", "T")
    members = []
    in_regular = False
    wmax = w.max()
    for i in range(k):
        others = np.delete(w, i)
        if w[i] <= tol:
            interior = bool(others.min() > tol)
            members.append((FaceId(face_kind, i), interior))
            in_regular = in_regular or interior
        if w[i] >= wmax - tol:
            interior = bool(w[i] > np.max(others) + tol)
            members.append((FaceId(star_kind, i), interior))
            in_regular = in_regular or interior
    return Classification(tuple(members), in_regular)


def in_star(p: BaryPoint, i: int, tol: float = CLASSIFY_TOL) -> bool:
    """Membership in the closed star of vertex i (union of faces not opposite i)."""
    others = np.delete(p.weights, i)
    return bool(others.min() <= tol)


@dataclass(frozen=True)
class GroupElement:
    """A permutation of the d+2 coordinates; perm[j] is the image of j."""

    perm: tuple

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"not a permutation: {self.perm}")

    @classmethod
    def identity(cls, k: int) -> "GroupElement":
        return cls(tuple(range(k)))

    @classmethod
    def transposition(cls, k: int, a: int, b: int) -> "GroupElement":
        p = list(range(k))
        p[a], p[b] = p[b], p[a]
        return cls(tuple(p))

    def compose(self, other: "GroupElement") -> "GroupElement":
        """self after other: (self*other)(j) = self(other(j))."""
        return GroupElement(tuple(self.perm[j] for j in other.perm))

    def inverse(self) -> "GroupElement":
        inv = [0] * len(self.perm)
        for j, im in enumerate(self.perm):
            inv[im] = j
        return GroupElement(tuple(inv))

    def apply_array(self, x: np.ndarray) -> np.ndarray:
        out = np.empty_like(np.asarray(x, dtype=float))
        out[list(self.perm)] = x
        return out


def group_elements(d: int) -> list[GroupElement]:
    """All of S_{d+2}; enumeration only feasible at desk scale."""
    if d > MAX_ENUM_DIM:
        raise DimensionError(f"group enumeration capped at d <= {MAX_ENUM_DIM}")
    return [GroupElement(p) for p in itertools.permutations(range(d + 2))]


def permutation_matrix(d: int) -> np.ndarray:
    """All permutations of range(d+2) as an ((d+2)!, d+2) index array."""
    if d > MAX_ENUM_DIM:
        raise DimensionError(f"group enumeration capped at d <= {MAX_ENUM_DIM}")
    return np.array(list(itertools.permutations(range(d + 2))), dtype=int)


def act(g: GroupElement, p):
    """Coordinate permutation action on BaryPoints or raw vectors."""
    if isinstance(p, BaryPoint):
        return BaryPoint(p.side, g.apply_array(p.weights))
    return g.apply_array(p)


def orbit(p: BaryPoint, tol: float = CLASSIFY_TOL) -> list[BaryPoint]:
    """Deduplicated G-orbit of p; length divides (d+2)!."""
    return [BaryPoint(p.side, w) for w in orbit_weights(p.weights, tol)]


def orbit_weights(w: np.ndarray, tol: float = CLASSIFY_TOL) -> np.ndarray:
    """Deduplicated orbit of a weight vector under all coordinate permutations."""
    w = np.asarray(w, dtype=float)
    d = w.size - 2
    perms = permutation_matrix(d)
    images = np.empty((perms.shape[0], w.size))
    rows = np.arange(perms.shape[0])[:, None]
    images[rows, perms] = w[None, :]
    uniq: list[np.ndarray] = []
    for im in images:
        if not any(np.max(np.abs(im - u)) <= tol for u in uniq):
            uniq.append(im)
    return np.array(uniq)


def orbit_key(w: np.ndarray, decimals: int = 8) -> tuple:
    """Canonical orbit invariant: the sorted, rounded weight multiset."""
    return tuple(np.round(np.sort(np.asarray(w, dtype=float)), decimals))


def symmetrized_max_pairing(m: BaryPoint, n: BaryPoint, tol: float = CLASSIFY_TOL):
    """Max over g of <m, g(n)> together with the argmax set of group elements."""
    if m.side != "A" or n.side != "B":
        raise SideError("expected an (A, B) pair")
    d = m.d
    if d != n.d:
        raise DimensionError("dimension mismatch")
    if d > MAX_ENUM_DIM:
        raise DimensionError(f"group enumeration capped at d <= {MAX_ENUM_DIM}")
    perms = permutation_matrix(d)
    images = np.empty((perms.shape[0], d + 2))
    rows = np.arange(perms.shape[0])[:, None]
    images[rows, perms] = n.weights[None, :]
    vals = pairing_weights(m.weights[None, :], images)
    best = vals.max()
    witnesses = [GroupElement(tuple(perms[i])) for i in np.nonzero(vals >= best - tol)[0]]
    return float(best), witnesses


def total_measure(side: str, d: int) -> float:
    """Normalized Lebesgue mass: |A| = (d+2)^{d+1}/d!, |B| = (d+2)/(d+1)!."""
    check_dim(d)
    if side == "A":
        return (d + 2) ** (d + 1) / _factorial(d)
    if side == "B":
        return (d + 2) / _factorial(d + 1)
    raise SideError(f"unknown side {side!r}")


def _factorial(k: int) -> float:
    out = 1.0
    for j in range(2, k + 1):
        out *= j
    return out


def face_measure(f: FaceId, d: int) -> float:
    """Mass of one top face; the d+2 faces share the total equally."""
    if f.kind not in ("sigma", "tau"):
        raise ValueError("stars carry no standalone face measure; use the cell machinery")
    return total_measure(f.side, d) / (d + 2)


def face_vertex_indices(f: FaceId, d: int) -> list[int]:
    """Vertex indices spanning a top face: all indices except the face's own."""
    if f.kind not in ("sigma", "tau"):
        raise ValueError("only sigma/tau faces are simplices")
    return [j for j in range(d + 2) if j != f.i]


def face_chart_indices(l: int, d: int) -> list[int]:
    """Vertex indices spanning face l, in the order fixed by the face chart."""
    return [j for j in range(d + 2) if j != l]


def face_affine(w: np.ndarray, l: int) -> tuple[float, np.ndarray]:
    """Restriction of the linear functional w . beta to face l in chart coords.

    The face chart parametrizes the face by x in the standard d-simplex:
    beta_{J[0]} = 1 - sum(x), beta_{J[r]} = x_r for the index list J of
    :func:`face_chart_indices`.  Returns (constant, gradient) with
    w . beta = constant + gradient . x.
    """
    w = np.asarray(w, dtype=float)
    J = face_chart_indices(l, w.size - 2)
    return float(w[J[0]]), w[J[1:]] - w[J[0]]


def face_embed(l: int, x: np.ndarray, d: int) -> np.ndarray:
    """Barycentric weights of the face-chart point x on face l."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    J = face_chart_indices(l, d)
    w = np.zeros(d + 2)
    w[J[0]] = 1.0 - x.sum()
    w[J[1:]] = x
    return w


def face_extract(weights: np.ndarray, l: int) -> np.ndarray:
    """Face-chart coordinates of a weight vector lying on face l."""
    weights = np.asarray(weights, dtype=float)
    J = face_chart_indices(l, weights.size - 2)
    return weights[J[1:]].copy()


def sample_face(f: FaceId, d: int, count: int, seed: int = 0) -> list[BaryPoint]:
    """Uniform samples on a top face w.r.t. its normalized Lebesgue measure."""
    return [
        BaryPoint(f.side, w) for w in sample_face_weights(f, d, count, seed)
    ]


def sample_face_weights(f: FaceId, d: int, count: int, seed: int = 0) -> np.ndarray:
    """Uniform barycentric samples on face f as a (count, d+2) array."""
    if f.kind not in ("sigma", "tau"):
        raise ValueError("sampling is defined on sigma/tau faces")
    rng = np.random.default_rng(seed)
    out = np.zeros((count, d + 2))
    if count:
        simplex = rng.dirichlet(np.ones(d + 1), size=count)
        out[:, face_vertex_indices(f, d)] = simplex
    return out
