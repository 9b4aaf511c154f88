"""c-convex functions on A and B: envelopes, transforms, chart restrictions.

A function on one boundary is stored as a finite max-affine envelope whose
generators are anchored on the opposite boundary:

    f(x) = max_a (<anchor_a, x> - offset_a).

The c-transform f^c(y) = max_x <x, y> - f(x) of such an envelope is computed
exactly: on each top face the inner problem is a small linear program, and
the transform itself is again an envelope once the maximizer candidates (the
vertices of the subdivision of the faces into linearity domains of f) are
enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry import (
    BaryPoint,
    DimensionError,
    GroupElement,
    SideError,
    face_affine,
    face_chart_indices,
    face_embed,
    face_extract,
    group_elements,
    pairing,
    pairing_matrix,
    sample_face_weights,
    vertex_m,
)
from .charts import Chart, _sub_simplex_ambient, _sub_simplex_coords, chart
from .lp import maximize_min_affine_over_simplex
from .polytope import arrangement_vertices_in_simplex, dedup_points

# Activity threshold for argmax sets (generators, atoms, subgradients).
ACTIVE_TOL = 1e-9
# Symmetry defect threshold for the G-invariance checks.
SYMMETRY_TOL = 1e-9


def opposite(side: str) -> str:
    if side == "A":
        return "B"
    if side == "B":
        return "A"
    raise SideError(f"unknown side {side!r}")


@dataclass(frozen=True)
class MaxAffineFn:
    """Max-affine envelope on `side`, generators anchored on the other side."""

    side: str
    generators: tuple  # of (BaryPoint on the opposite side, float offset)
    _anchor_weights: np.ndarray = field(init=False, repr=False, compare=False)
    _offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise SideError(f"side must be 'A' or 'B', got {self.side!r}")
        gens = tuple((p, float(c)) for p, c in self.generators)
        if not gens:
            raise ValueError("an envelope needs at least one generator")
        other = opposite(self.side)
        d = gens[0][0].d
        for p, _ in gens:
            if p.side != other:
                raise SideError(f"anchors must lie on side {other}")
            if p.d != d:
                raise DimensionError("anchors have inconsistent dimensions")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(
            self, "_anchor_weights", np.array([p.weights for p, _ in gens])
        )
        object.__setattr__(self, "_offsets", np.array([c for _, c in gens]))

    @property
    def d(self) -> int:
        return self.generators[0][0].d

    def values(self, weights: np.ndarray) -> np.ndarray:
        """Envelope values at a stack of barycentric weight rows."""
        weights = np.atleast_2d(np.asarray(weights, dtype=float))
        vals = pairing_matrix(self._anchor_weights, weights) - self._offsets[:, None]
        return vals.max(axis=0)

    def value(self, x: BaryPoint) -> float:
        if x.side != self.side:
            raise SideError(f"query must be on side {self.side}")
        return float(self.values(x.weights[None, :])[0])

    def value_vector(self, x: np.ndarray) -> float:
        """Envelope formula at an arbitrary ambient representative.

        On side B this evaluates the canonical extension of f off the
        boundary; the anchors sum to zero so the value is representative
        independent.
        """
        x = np.asarray(x, dtype=float)
        vals = [pairing(p.vector(), x) - c for p, c in self.generators]
        return float(max(vals))

    def active_indices(self, x: BaryPoint, tol: float = ACTIVE_TOL) -> list[int]:
        vals = (
            pairing_matrix(self._anchor_weights, x.weights[None, :])[:, 0]
            - self._offsets
        )
        return list(np.nonzero(vals >= vals.max() - tol)[0])

    def shifted(self, a: float) -> "MaxAffineFn":
        """The envelope f + a (offsets decrease by a)."""
        return MaxAffineFn(
            self.side, tuple((p, c - a) for p, c in self.generators)
        )

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "generators": [
                {"anchor": p.to_json(), "offset": float(c)}
                for p, c in self.generators
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MaxAffineFn":
        gens = tuple(
            (BaryPoint.from_json(g["anchor"]), float(g["offset"]))
            for g in obj["generators"]
        )
        return cls(obj["side"], gens)


@dataclass(frozen=True)
class DiscreteFn:
    """Function values on a finite set of points of one side."""

    side: str
    support: tuple  # of BaryPoint
    values: tuple  # of float

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise SideError(f"side must be 'A' or 'B', got {self.side!r}")
        support = tuple(self.support)
        values = tuple(float(v) for v in self.values)
        if len(support) != len(values):
            raise ValueError("support and values must have equal length")
        if not support:
            raise ValueError("empty support")
        for p in support:
            if p.side != self.side:
                raise SideError("support points must lie on the function's side")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @property
    def d(self) -> int:
        return self.support[0].d

    @classmethod
    def merged(cls, side: str, points: Sequence[BaryPoint], values: Sequence[float],
               tol: float = ACTIVE_TOL) -> "DiscreteFn":
        """Build with duplicate points merged (first value wins)."""
        keep_p: list[BaryPoint] = []
        keep_v: list[float] = []
        for p, v in zip(points, values):
            if not any(p.same_point(q, tol) for q in keep_p):
                keep_p.append(p)
                keep_v.append(float(v))
        return cls(side, tuple(keep_p), tuple(keep_v))

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "samples": [
                {"point": p.to_json(), "value": float(v)}
                for p, v in zip(self.support, self.values)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteFn":
        pts = tuple(BaryPoint.from_json(s["point"]) for s in obj["samples"])
        vals = tuple(float(s["value"]) for s in obj["samples"])
        return cls(obj["side"], pts, vals)


def act_fn(g: GroupElement, f: MaxAffineFn) -> MaxAffineFn:
    """Action (g.f)(x) = f(g^{-1} x); anchors move by g, offsets stay."""
    return MaxAffineFn(
        f.side,
        tuple((BaryPoint(p.side, g.apply_array(p.weights)), c) for p, c in f.generators),
    )


def symmetry_defect(f, count: int = 120, seed: int = 0) -> float:
    """max_g max_x |f(g.x) - f(x)| over sampled x; 0 for G-invariant f.

    Works for any object with .side, .d and .value(BaryPoint).
    """
    from .geometry import FaceId

    d = f.d
    kind = "sigma" if f.side == "A" else "tau"
    per_face = max(1, count // (d + 2))
    defect = 0.0
    for l in range(d + 2):
        W = sample_face_weights(FaceId(kind, l), d, per_face, seed=seed + l)
        for g in group_elements(d):
            for w in W:
                x = BaryPoint(f.side, w)
                gx = BaryPoint(f.side, g.apply_array(w))
                defect = max(defect, abs(f.value(gx) - f.value(x)))
    return defect


def is_symmetric(f, tol: float = SYMMETRY_TOL, count: int = 120, seed: int = 0) -> bool:
    return symmetry_defect(f, count=count, seed=seed) <= tol


def symmetrize_fn(f: MaxAffineFn) -> MaxAffineFn:
    """The envelope max_g (g.f); equals f iff f is G-invariant."""
    gens = []
    for g in group_elements(f.d):
        gens.extend(act_fn(g, f).generators)
    # Dedup identical generators to keep the envelope small.
    seen = set()
    keep = []
    for p, c in gens:
        key = (tuple(np.round(p.weights, 9)), round(c, 9))
        if key not in seen:
            seen.add(key)
            keep.append((p, c))
    return MaxAffineFn(f.side, tuple(keep))


def ctransform_discrete(u: DiscreteFn) -> MaxAffineFn:
    """Envelope u^c on the opposite side: one generator per support point."""
    return MaxAffineFn(
        opposite(u.side), tuple(zip(u.support, u.values))
    )


def _face_lp(f: MaxAffineFn, query_w: np.ndarray, l: int) -> tuple[float, np.ndarray]:
    """max over y in face l of min_a (<x,y> - <anchor_a,y> + offset_a).

    Returns (value, barycentric weights of the maximizer on face l).
    Both sides reduce to the same data: the objective rows are
    (d+2)(anchor_a - query) restricted to the face chart.
    """
    d = f.d
    J = face_chart_indices(l, d)
    diff = (d + 2) * (f._anchor_weights - query_w[None, :])
    C = np.empty((diff.shape[0], d + 1))
    C[:] = diff[:, J]
    val, beta = maximize_min_affine_over_simplex(C, f._offsets)
    w = np.zeros(d + 2)
    w[J] = beta
    return val, w


def ctransform_envelope(f: MaxAffineFn, query: BaryPoint) -> float:
    """Exact c-transform value f^c(query) by per-face linear programs."""
    return ctransform_argmax(f, query)[0]


def ctransform_argmax(f: MaxAffineFn, query: BaryPoint) -> tuple[float, BaryPoint]:
    """f^c(query) together with one maximizer on f's side."""
    if query.side != opposite(f.side):
        raise SideError("query must lie on the side opposite to f")
    if query.d != f.d:
        raise DimensionError("dimension mismatch")
    best = -np.inf
    best_w = None
    for l in range(f.d + 2):
        val, w = _face_lp(f, query.weights, l)
        if val > best:
            best, best_w = val, w
    return float(best), BaryPoint.repaired(f.side, best_w)


def face_hyperplanes(f, l: int) -> tuple[np.ndarray, np.ndarray]:
    """Hyperplanes bounding f's linearity domains on face l, in chart coords.

    Envelopes contribute the bisectors of generator pairs; interpolants
    contribute their node equations; constants contribute nothing.
    """
    if isinstance(f, MaxAffineFn):
        d = f.d
        A = f._anchor_weights
        c = f._offsets
        K = A.shape[0]
        normals, rhs = [], []
        for a in range(K):
            for b in range(a + 1, K):
                w = (d + 2) * (A[b] - A[a])
                c0, grad = face_affine(w, l)
                if np.abs(grad).max() <= 1e-12:
                    continue
                normals.append(grad)
                rhs.append(c[a] - c[b] - c0)
        if not normals:
            return np.zeros((0, d)), np.zeros(0)
        return np.array(normals), np.array(rhs)
    if hasattr(f, "face_hyperplanes"):
        return f.face_hyperplanes(l)
    return np.zeros((0, f.d)), np.zeros(0)


def envelope_face_forms(f: MaxAffineFn, l: int) -> tuple[np.ndarray, np.ndarray]:
    """Affine forms of f's generators on face l of f's own side, chart coords."""
    d = f.d
    K = len(f.generators)
    grads = np.empty((K, d))
    consts = np.empty(K)
    for a in range(K):
        c0, grad = face_affine(-(d + 2) * f._anchor_weights[a], l)
        grads[a] = grad
        consts[a] = 1.0 + c0 - f._offsets[a]
    return grads, consts


def _active_kink_normals(f, l: int, x: np.ndarray, tol: float = 1e-9) -> list:
    """Normals of f's kink hyperplanes passing through x on face l."""
    if isinstance(f, MaxAffineFn):
        grads, consts = envelope_face_forms(f, l)
        vals = grads @ x + consts
        act = np.nonzero(vals >= vals.max() - tol)[0]
        if len(act) < 2:
            return []
        return list(grads[act[1:]] - grads[act[0]])
    normals, rhs = face_hyperplanes(f, l)
    if not len(normals):
        return []
    hit = np.abs(normals @ x - rhs) <= tol
    return list(normals[hit])


def subdivision_candidates(fns: Iterable, side: str, d: int) -> list[BaryPoint]:
    """Vertices of the face subdivisions refining all of fns' linearity domains.

    For each top face of `side`, the hyperplane arrangement of every
    function's kink loci (plus the face boundary) is enumerated, then
    filtered down to genuine subdivision vertices: points whose active kink
    and facet normals span the face.  The result supports every maximizer
    of <x, .> - (any combination of the functions).
    """
    fns = list(fns)
    out: list[BaryPoint] = []
    for l in range(d + 2):
        blocks_n, blocks_r = [], []
        for f in fns:
            n_, r_ = face_hyperplanes(f, l)
            if len(n_):
                blocks_n.append(n_)
                blocks_r.append(r_)
        normals = np.vstack(blocks_n) if blocks_n else np.zeros((0, d))
        rhs = np.concatenate(blocks_r) if blocks_r else np.zeros(0)
        xs = arrangement_vertices_in_simplex(normals, rhs, d)
        for x in xs:
            dirs = []
            for r in range(d):
                if abs(x[r]) <= 1e-9:
                    dirs.append(np.eye(d)[r])
            if abs(x.sum() - 1.0) <= 1e-9:
                dirs.append(np.ones(d))
            for f in fns:
                dirs.extend(_active_kink_normals(f, l, x))
            if not dirs:
                continue
            if np.linalg.matrix_rank(np.array(dirs), tol=1e-8) < d:
                continue
            out.append(BaryPoint.repaired(side, face_embed(l, x, d)))
    # Cross-face duplicates (shared boundaries) are merged.
    keep: list[BaryPoint] = []
    for p in out:
        if not any(p.same_point(q, 1e-9) for q in keep):
            keep.append(p)
    return keep


def envelope_candidates(f: MaxAffineFn) -> list[BaryPoint]:
    """Kink-vertex candidates of f on its own side (maximizer support set)."""
    return subdivision_candidates([f], f.side, f.d)


def ctransform_exact(f: MaxAffineFn) -> MaxAffineFn:
    """f^c as an envelope: generators are f's subdivision candidates.

    Exact because for every query the inner maximum of <x, y> - f(y) is
    attained at a vertex of f's linearity subdivision.
    """
    cands = envelope_candidates(f)
    vals = [f.value(p) for p in cands]
    return ctransform_discrete(DiscreteFn(f.side, tuple(cands), tuple(vals)))


def double_transform(f: MaxAffineFn, grid: Sequence[BaryPoint]) -> DiscreteFn:
    """Values of f^{cc} on the grid; f^{cc} <= f with equality iff c-convex there."""
    fc = ctransform_exact(f)
    vals = tuple(ctransform_envelope(fc, p) for p in grid)
    return DiscreteFn(f.side, tuple(grid), vals)


def c_subgradient(f: MaxAffineFn, x: BaryPoint, tol: float = ACTIVE_TOL) -> list[BaryPoint]:
    """Anchors active at x: the c-subgradient of the envelope at x."""
    return [f.generators[k][0] for k in f.active_indices(x, tol)]


@dataclass(frozen=True)
class ChartConvexFn:
    """A function on B pushed through a q-chart: (f - m_j) o q_{i,j}.

    `pieces[l]` holds the affine forms (gradient, intercept) of the
    generators on the sub-simplex of the reference simplex mapping onto face
    tau_l; within each sub-simplex the function is their max.  For c-convex
    f the whole function is convex on the reference simplex.
    """

    chart: Chart
    pieces: tuple  # of (label l, gradients (K,d), intercepts (K,))

    def labels(self) -> list[int]:
        return [l for l, _, _ in self.pieces]

    def _block(self, l: int):
        for ll, G, c in self.pieces:
            if ll == l:
                return G, c
        raise KeyError(l)

    def value(self, t: np.ndarray) -> float:
        t = np.asarray(t, dtype=float)
        l = self.chart.locate(t)
        G, c = self._block(l)
        return float((G @ t + c).max())

    def gradients_at(self, t: np.ndarray, tol: float = ACTIVE_TOL) -> np.ndarray:
        """Gradients of the pieces active at t, within its sub-simplex."""
        t = np.asarray(t, dtype=float)
        l = self.chart.locate(t)
        G, c = self._block(l)
        vals = G @ t + c
        return G[vals >= vals.max() - tol]

    def kink_candidates(self) -> np.ndarray:
        """Vertices of the subdivision of the domain into linearity regions.

        Per sub-simplex: the arrangement vertices of the piece bisectors
        clipped to the sub-simplex, plus the sub-simplex corners.  These
        points determine the function (it is affine between them), so they
        suffice as support constraints for subgradient polytopes.
        """
        d = self.chart.d
        pts = []
        for l, G, c in self.pieces:
            M = _sub_simplex_coords(self.chart, l)  # (t,1) -> barycentric
            # Facet hyperplanes lambda_r = 0 of the sub-simplex.
            fac_n = M[:, :d]
            fac_r = -M[:, d]
            K = G.shape[0]
            bis_n, bis_r = [], []
            for a in range(K):
                for b in range(a + 1, K):
                    n_ = G[a] - G[b]
                    if np.abs(n_).max() <= 1e-12:
                        continue
                    bis_n.append(n_)
                    bis_r.append(c[b] - c[a])
            N = np.vstack([fac_n] + ([np.array(bis_n)] if bis_n else []))
            R = np.concatenate([fac_r] + ([np.array(bis_r)] if bis_r else []))
            sols = _hyperplane_meets(N, R, d)
            if not len(sols):
                continue
            lam = sols @ M[:, :d].T + M[:, d][None, :]
            sols = sols[np.all(lam >= -1e-9, axis=1)]
            vals = sols @ G.T + c[None, :]
            lam = sols @ M[:, :d].T + M[:, d][None, :]
            for t, v, la in zip(sols, vals, lam):
                dirs = list(fac_n[np.abs(la) <= 1e-9])
                act = np.nonzero(v >= v.max() - 1e-9)[0]
                if len(act) >= 2:
                    dirs.extend(G[act[1:]] - G[act[0]])
                if not dirs:
                    continue
                if np.linalg.matrix_rank(np.array(dirs), tol=1e-8) < d:
                    continue
                pts.append(t[None, :])
        if not pts:
            return np.zeros((0, d))
        return dedup_points(np.vstack(pts))

    def convexity_defect(self, count: int = 200, seed: int = 0) -> float:
        """Worst midpoint-convexity violation over random segment samples."""
        rng = np.random.default_rng(seed)
        d = self.chart.d
        verts = np.vstack([np.zeros(d), self.chart.reference_vertices()])
        defect = 0.0
        for _ in range(count):
            lam = rng.dirichlet(np.ones(d + 2), size=2)
            a, b = lam @ verts
            mid = 0.5 * (a + b)
            gap = self.value(mid) - 0.5 * (self.value(a) + self.value(b))
            defect = max(defect, gap)
        return defect


def _hyperplane_meets(N: np.ndarray, R: np.ndarray, d: int) -> np.ndarray:
    """All intersection points of d-subsets of the hyperplanes N x = R."""
    from .polytope import _combo_index

    m = N.shape[0]
    if m < d:
        return np.zeros((0, d))
    combos = _combo_index(m, d)
    mats = N[combos, :]
    bs = R[combos]
    dets = np.abs(np.linalg.det(mats))
    scale = np.maximum(np.abs(mats).max(axis=(1, 2)), 1.0)
    good = dets > 1e-12 * scale**d
    if not np.any(good):
        return np.zeros((0, d))
    return np.linalg.solve(mats[good], bs[good][..., None])[..., 0]


def chart_restrict(f: MaxAffineFn, i: int, j: int) -> ChartConvexFn:
    """(f - m_j) composed with the chart q_{i,j}, as per-sub-simplex pieces."""
    if f.side != "B":
        raise SideError("chart restriction is defined for functions on B")
    d = f.d
    ch = chart("q", i, j, d)
    mj = vertex_m(d, j)
    blocks = []
    for l in ch.sub_simplex_labels():
        M = _sub_simplex_coords(ch, l)  # (d+1, d+1): (t,1) -> barycentric
        V = _sub_simplex_ambient(ch, l)  # (d+1, d+2) ambient vertices
        K = len(f.generators)
        G = np.empty((K, d))
        c = np.empty(K)
        for a, (p, off) in enumerate(f.generators):
            w = (p.vector() - mj) @ V.T  # value at each sub-simplex vertex
            coeff = w @ M  # affine form in (t, 1)
            G[a] = coeff[:d]
            c[a] = coeff[d] - off
        blocks.append((l, G, c))
    return ChartConvexFn(ch, tuple(blocks))


class ConstantFn:
    """A constant test function on one side."""

    def __init__(self, side: str, d: int, c: float):
        self.side = side
        self.d = d
        self.c = float(c)

    def value(self, x: BaryPoint) -> float:
        return self.c

    def face_hyperplanes(self, l: int):
        return np.zeros((0, self.d)), np.zeros(0)


class EdgeInterpolant:
    """Piecewise-linear interpolant of node values on the d=1 boundary.

    The boundary B (or A) at d=1 is a triangle of three edges; nodes must
    include all three corners so every edge interpolates its full length.
    """

    def __init__(self, side: str, nodes: Sequence[BaryPoint], values: Sequence[float]):
        if not nodes:
            raise ValueError("empty node list")
        d = nodes[0].d
        if d != 1:
            raise DimensionError("edge interpolants are one-dimensional only")
        self.side = side
        self.d = 1
        self.nodes = list(nodes)
        self.node_values = [float(v) for v in values]
        for p in nodes:
            if p.side != side:
                raise SideError("nodes must lie on the interpolant's side")
        # Per-face node tables: coordinate along the face chart + value.
        self._tables = {}
        for l in range(3):
            xs, vs = [], []
            for p, v in zip(self.nodes, self.node_values):
                if p.weights[l] <= 1e-9:
                    xs.append(float(face_extract(p.weights, l)[0]))
                    vs.append(v)
            order = np.argsort(xs)
            xs = np.array(xs)[order]
            vs = np.array(vs)[order]
            if len(xs) < 2 or xs[0] > 1e-9 or xs[-1] < 1 - 1e-9:
                raise ValueError(f"face {l} lacks corner nodes for interpolation")
            self._tables[l] = (xs, vs)

    def value(self, x: BaryPoint) -> float:
        l = int(np.argmin(x.weights))
        xs, vs = self._tables[l]
        return float(np.interp(float(face_extract(x.weights, l)[0]), xs, vs))

    def face_hyperplanes(self, l: int):
        xs, _ = self._tables[l]
        inner = xs[(xs > 1e-9) & (xs < 1 - 1e-9)]
        return np.ones((len(inner), 1)), inner.copy()


@dataclass(frozen=True)
class EnergyDerivative:
    """One-sided derivatives of t -> integral over A of (psi + t v)^c d mu."""

    left: float
    right: float
    psi_symmetric: bool
    v_symmetric: bool

    @property
    def gap(self) -> float:
        return self.right - self.left


def directional_energy_derivative(
    psi: MaxAffineFn, v, h: float = 1e-3, symmetry_tol: float = SYMMETRY_TOL
) -> EnergyDerivative:
    """One-sided difference quotients of the dual energy at t = 0.

    The perturbed conjugate (psi + t v)^c is evaluated exactly: the inner
    maximizers live on the subdivision vertices common to psi and v, so the
    integral over A reduces to an exact cell decomposition.  For symmetric
    psi and v the two quotients agree (the energy is differentiable); for
    non-symmetric data they may differ, which is reported, not rejected.
    """
    from .ma_operator import integrate_envelope_over_A

    if psi.side != "B":
        raise SideError("the energy derivative is defined for psi on B")
    d = psi.d
    psi_sym = is_symmetric(psi, symmetry_tol)
    v_sym = is_symmetric(v, symmetry_tol)
    cands = subdivision_candidates([psi, v], "B", d)
    W = np.array([p.weights for p in cands])
    base = np.array([psi.value(p) for p in cands])
    bump = np.array([v.value(p) for p in cands])

    def E(t: float) -> float:
        return integrate_envelope_over_A(W, base + t * bump, d)

    e0 = E(0.0)
    right = (E(h) - e0) / h
    left = (e0 - E(-h)) / h
    return EnergyDerivative(left, right, psi_sym, v_sym)
