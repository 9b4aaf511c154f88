"""Integral-affine coordinate charts on the vertex stars of A and B.

A p-chart (i, j) maps the reference simplex S~ onto the star of the A-side
vertex ``m_i``; a q-chart (i, j) maps T~ onto the star of the B-side vertex
``n_i``.  Both are piecewise affine, affine on each sub-simplex spanned by
the chart origin and all but one of the reference vertices, and unimodular
piece by piece.  The duality identity ties the Euclidean scalar product in
the charts to the global A x B pairing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import (
    BaryPoint,
    DimensionError,
    bary_to_vector,
    in_star,
    pairing,
    vector_to_bary,
    vertex_m,
    vertex_n,
)

# Sub-simplex location tolerance inside the reference simplices.
LOCATE_TOL = 1e-10


class ChartDomainError(ValueError):
    """Point outside the chart's reference simplex or star."""


def p_inv(i: int, j: int, m: np.ndarray, d: int, check: bool = True) -> np.ndarray:
    """Chart coordinates of m in Star(m_i): (<m, n_j - n_k>)_{k != i, j}."""
    if i == j:
        raise ValueError("chart indices must differ")
    m = np.asarray(m, dtype=float)
    if m.size != d + 2:
        raise DimensionError("ambient vector must have d+2 coordinates")
    if check and not in_star(vector_to_bary(m, "A"), i):
        raise ChartDomainError(f"point is not in Star(m_{i})")
    # <m, n_j - n_k> = m_k - m_j in ambient coordinates (n_l = -e_l).
    ks = [k for k in range(d + 2) if k not in (i, j)]
    return m[ks] - m[j]


def q_inv(i: int, j: int, n: np.ndarray, d: int, check: bool = True) -> np.ndarray:
    """Chart coordinates of n in Star(n_i): (<e_k - e_j, n>)_{k != i, j}."""
    if i == j:
        raise ValueError("chart indices must differ")
    n = np.asarray(n, dtype=float)
    if n.size != d + 2:
        raise DimensionError("ambient vector must have d+2 coordinates")
    if check and not in_star(vector_to_bary(n, "B"), i):
        raise ChartDomainError(f"point is not in Star(n_{i})")
    ks = [k for k in range(d + 2) if k not in (i, j)]
    return n[ks] - n[j]


@dataclass(frozen=True)
class Chart:
    """One coordinate chart: side 'p' (A, stars of m_i) or 'q' (B, stars of n_i)."""

    side: str
    i: int
    j: int
    d: int

    def __post_init__(self):
        if self.side not in ("p", "q"):
            raise ValueError("chart side must be 'p' or 'q'")
        if self.i == self.j:
            raise ValueError("chart indices must differ")
        if not (0 <= self.i <= self.d + 1 and 0 <= self.j <= self.d + 1):
            raise ValueError("chart indices out of range")

    @property
    def vertex_labels(self) -> list[int]:
        """Ambient vertex index of each reference-simplex vertex.

        The chart origin is vertex i; label order is (all k != i, j), then j.
        """
        return [k for k in range(self.d + 2) if k not in (self.i, self.j)] + [self.j]

    def reference_vertices(self) -> np.ndarray:
        """Reference-simplex vertices, one row per entry of `vertex_labels`.

        S~ has vertices (d+2)e_k and (-(d+2),...,-(d+2)); T~ has -e_k and
        (1,...,1).
        """
        d = self.d
        out = np.zeros((d + 1, d))
        if self.side == "p":
            out[:d, :] = (d + 2) * np.eye(d)
            out[d, :] = -(d + 2)
        else:
            out[:d, :] = -np.eye(d)
            out[d, :] = 1.0
        return out

    def ambient_vertex(self, label: int) -> np.ndarray:
        return (
            vertex_m(self.d, label) if self.side == "p" else vertex_n(self.d, label)
        )

    def sub_simplex_labels(self) -> list[int]:
        """Labels l such that the sub-simplex omitting vertex l maps onto face l.

        A p-chart sub-simplex (origin plus all reference vertices but the one
        for m_l) maps affinely onto sigma_l, l != i; likewise q onto tau_l.
        """
        return [l for l in range(self.d + 2) if l != self.i]

    def to_reference(self, x: np.ndarray, check: bool = True) -> np.ndarray:
        """Chart coordinates of an ambient point in the star of vertex i."""
        if self.side == "p":
            return p_inv(self.i, self.j, x, self.d, check=check)
        return q_inv(self.i, self.j, x, self.d, check=check)

    def locate(self, s: np.ndarray, tol: float = LOCATE_TOL) -> int:
        """Face label l of the sub-simplex containing s, lowest index on ties."""
        s = np.asarray(s, dtype=float)
        best_label, best_viol = None, None
        for l in self.sub_simplex_labels():
            lam = _sub_simplex_coords(self, l) @ np.append(s, 1.0)
            viol = -lam.min()
            if viol <= tol:
                return l
            if best_viol is None or viol < best_viol:
                best_label, best_viol = l, viol
        if best_viol is not None and best_viol <= 1e-7:
            return best_label
        raise ChartDomainError("point lies outside the reference simplex")

    def from_reference(self, s: np.ndarray) -> np.ndarray:
        """Ambient point of chart coordinates s (piecewise affine inverse)."""
        s = np.asarray(s, dtype=float)
        l = self.locate(s)
        lam = _sub_simplex_coords(self, l) @ np.append(s, 1.0)
        pts = _sub_simplex_ambient(self, l)
        return lam @ pts

    def face_preimage_vertices(self, l: int) -> np.ndarray:
        """Reference-space vertices of the sub-simplex mapping onto face l."""
        if l == self.i:
            raise ValueError("the chart's own face is not in the star")
        verts = [np.zeros(self.d)]
        ref = self.reference_vertices()
        for label, v in zip(self.vertex_labels, ref):
            if label != l:
                verts.append(v)
        return np.array(verts)


@lru_cache(maxsize=None)
def _chart_cached(side: str, i: int, j: int, d: int) -> Chart:
    return Chart(side, i, j, d)


def chart(side: str, i: int, j: int, d: int) -> Chart:
    """Shared chart instance for (side, i, j); charts are tiny and immutable."""
    return _chart_cached(side, i, j, d)


@lru_cache(maxsize=None)
def _sub_simplex_matrix_key(side: str, i: int, j: int, d: int, l: int):
    c = Chart(side, i, j, d)
    verts = c.face_preimage_vertices(l)  # (d+1, d), first row the origin
    A = np.vstack([verts.T, np.ones(d + 1)])  # maps barycentric -> (s, 1)
    return np.linalg.inv(A)


def _sub_simplex_coords(c: Chart, l: int) -> np.ndarray:
    """Matrix turning (s, 1) into barycentric coordinates of sub-simplex l."""
    return _sub_simplex_matrix_key(c.side, c.i, c.j, c.d, l)


@lru_cache(maxsize=None)
def _sub_simplex_ambient_key(side: str, i: int, j: int, d: int, l: int):
    c = Chart(side, i, j, d)
    rows = [c.ambient_vertex(i)]
    for label in c.vertex_labels:
        if label != l:
            rows.append(c.ambient_vertex(label))
    return np.array(rows)


def _sub_simplex_ambient(c: Chart, l: int) -> np.ndarray:
    return _sub_simplex_ambient_key(c.side, c.i, c.j, c.d, l)


def p(i: int, j: int, s: np.ndarray, d: int) -> np.ndarray:
    """Inverse chart: ambient point of s in S~, landing in Star(m_i)."""
    return chart("p", i, j, d).from_reference(s)


def q(i: int, j: int, t: np.ndarray, d: int) -> np.ndarray:
    """Inverse chart: ambient point of t in T~, landing in Star(n_i)."""
    return chart("q", i, j, d).from_reference(t)


def chart_pair_residual(i: int, j: int, s: np.ndarray, t: np.ndarray, d: int) -> float:
    """|<s, t> - <p_{j,i}(s) - m_j, q_{i,j}(t)>| for the duality identity.

    Requires s in the p_{j,i}-preimage of sigma_i and t in T~.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    m = p(j, i, s, d)
    n = q(i, j, t, d)
    lhs = float(s @ t)
    rhs = pairing(m - vertex_m(d, j), n)
    return abs(lhs - rhs)


def chart_pair_residual_dual(i: int, j: int, s: np.ndarray, t: np.ndarray, d: int) -> float:
    """Companion identity: |<s, t> - <p_{i,j}(s), q_{j,i}(t) - n_j>|."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    m = p(i, j, s, d)
    n = q(j, i, t, d)
    lhs = float(s @ t)
    rhs = pairing(m, n - vertex_n(d, j))
    return abs(lhs - rhs)


def sample_reference(c: Chart, count: int, seed: int = 0) -> np.ndarray:
    """Uniform samples of the chart's reference simplex."""
    rng = np.random.default_rng(seed)
    lam = rng.dirichlet(np.ones(c.d + 1), size=count)
    return lam @ c.reference_vertices()


def sample_sub_simplex(c: Chart, l: int, count: int, seed: int = 0) -> np.ndarray:
    """Uniform samples of the sub-simplex mapping onto face l."""
    rng = np.random.default_rng(seed)
    lam = rng.dirichlet(np.ones(c.d + 1), size=count)
    return lam @ c.face_preimage_vertices(l)
