"""The symmetric tropical Monge-Ampere operator and its cell machinery.

Given atoms n_k on B with weights g_k, the envelope

    phi(m) = max_k (<m, n_k> - g_k)

induces Laguerre-type cells on A (the loci where a fixed atom attains the
max).  Their masses are the Monge-Ampere measure of the matching c-convex
function on B; the general operator reduces to this picture by enumerating
the kink vertices of the input envelope.  A chart-level Alexandrov operator
provides the independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    BaryPoint,
    SideError,
    classify,
    face_affine,
    face_embed,
    total_measure,
    vertex_n,
)
from .charts import chart, q_inv
from .cconvex import (
    ChartConvexFn,
    EdgeInterpolant,
    MaxAffineFn,
    chart_restrict,
    directional_energy_derivative,
    envelope_candidates,
    is_symmetric,
)
from .measures import AtomicMeasure
from .polytope import enumerate_vertices, volume_centroid

# Default Monte Carlo sample budget (total, split over faces).
MC_SAMPLES = 200_000
# Atoms of the output measure are clustered within this barycentric radius.
CLUSTER_TOL = 1e-6
# Output atoms below this mass are dropped (exact backend).
DROP_TOL = 1e-9


class SymmetryError(ValueError):
    """Operation requires G-invariant input (override where supported)."""


def _face_forms(atom_weights: np.ndarray, offsets: np.ndarray, l: int, d: int):
    """Affine forms of <m, n_k> - g_k on face l, in face-chart coordinates."""
    K = len(offsets)
    grads = np.empty((K, d))
    consts = np.empty(K)
    for k in range(K):
        c0, grad = face_affine(-(d + 2) * atom_weights[k], l)
        grads[k] = grad
        consts[k] = 1.0 - offsets[k] + c0
    return grads, consts


def _face_density(d: int) -> float:
    """Normalized mass per unit face-chart volume (unit simplex <-> face mass)."""
    face_mass = total_measure("A", d) / (d + 2)
    return face_mass * math.factorial(d)


def _cell_halfspaces(grads, consts, k, d):
    A = np.delete(grads - grads[k], k, axis=0)
    b = np.delete(consts[k] - consts, k)
    A = np.vstack([A, -np.eye(d), np.ones((1, d))])
    b = np.concatenate([b, np.zeros(d), [1.0]])
    return A, b


@dataclass(frozen=True)
class FaceCell:
    """One atom's closed cell on one face of A."""

    atom: int
    face: int
    vertices: np.ndarray  # face-chart coordinates, (v, d)
    mass: float
    centroid_weights: np.ndarray | None  # barycentric centroid, if mass > 0


@dataclass(frozen=True)
class CellComplex:
    """Per-atom Laguerre cells on A for an atom/weight configuration on B."""

    atoms: tuple  # of BaryPoint on B
    g: np.ndarray
    cells: tuple  # of FaceCell (exact backend; empty for Monte Carlo)
    masses: np.ndarray
    backend: str
    atom_errors: np.ndarray

    @property
    def d(self) -> int:
        return self.atoms[0].d

    def total_mass(self) -> float:
        return float(self.masses.sum())

    def overlap(self) -> float:
        """Excess of the closed-cell total over |A|; 0 when cells partition."""
        return self.total_mass() - total_measure("A", self.d)

    def to_csv(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["atom", "face", "vertex", *[f"x{r}" for r in range(self.d)]])
        for cell in self.cells:
            for v, x in enumerate(cell.vertices):
                writer.writerow(
                    [cell.atom, cell.face, v, *[f"{c:.17g}" for c in x]]
                )
        return buf.getvalue()


def cells_from_weights(
    atoms,
    g,
    backend: str = "exact",
    mc_samples: int = MC_SAMPLES,
    seed: int = 0,
) -> CellComplex:
    """Closed cells {m : atom k attains max_k <m,n_k> - g_k} and their masses.

    Each closed cell is computed independently, so for degenerate (full-
    dimensional) ties the masses over-count |A|; `overlap` reports by how
    much.  Generic configurations partition A up to measure zero.
    """
    atoms = tuple(atoms)
    if not atoms:
        raise ValueError("need at least one atom")
    g = np.asarray(g, dtype=float)
    if g.shape != (len(atoms),):
        raise ValueError("one weight per atom required")
    d = atoms[0].d
    W = np.array([p.weights for p in atoms])
    K = len(atoms)
    density = _face_density(d)
    face_mass = total_measure("A", d) / (d + 2)

    if backend == "exact":
        cells = []
        masses = np.zeros(K)
        for l in range(d + 2):
            grads, consts = _face_forms(W, g, l, d)
            for k in range(K):
                A, b = _cell_halfspaces(grads, consts, k, d)
                verts = enumerate_vertices(A, b)
                if len(verts) <= d:
                    continue
                vol, centroid = volume_centroid(verts)
                if vol <= 0:
                    continue
                mass = vol * density
                masses[k] += mass
                cells.append(
                    FaceCell(k, l, verts, mass, face_embed(l, centroid, d))
                )
        return CellComplex(atoms, g, tuple(cells), masses, "exact", np.zeros(K))

    if backend == "monte-carlo":
        rng = np.random.default_rng(seed)
        per_face = max(1, mc_samples // (d + 2))
        masses = np.zeros(K)
        var = np.zeros(K)
        for l in range(d + 2):
            grads, consts = _face_forms(W, g, l, d)
            lam = rng.dirichlet(np.ones(d + 1), size=per_face)
            vals = lam[:, 1:] @ grads.T + consts[None, :]
            # argmax keeps the lowest index on exact ties.
            winner = np.argmax(vals, axis=1)
            frac = np.bincount(winner, minlength=K) / per_face
            masses += frac * face_mass
            var += frac * (1.0 - frac) / per_face * face_mass**2
        return CellComplex(atoms, g, (), masses, "monte-carlo", np.sqrt(var))

    raise ValueError(f"unknown backend {backend!r}")


def integrate_envelope_over_A(
    atom_weights: np.ndarray, offsets: np.ndarray, d: int
) -> float:
    """Exact integral over A of max_k (<m, n_k> - c_k) d mu.

    Pieces that coincide as affine functions on a face are merged first so
    degenerate ties are not double counted.
    """
    atom_weights = np.atleast_2d(np.asarray(atom_weights, dtype=float))
    offsets = np.asarray(offsets, dtype=float)
    density = _face_density(d)
    total = 0.0
    for l in range(d + 2):
        grads, consts = _face_forms(atom_weights, offsets, l, d)
        seen = set()
        keep = []
        for k in range(len(offsets)):
            key = (tuple(np.round(grads[k], 9)), round(consts[k], 9))
            if key not in seen:
                seen.add(key)
                keep.append(k)
        gr = grads[keep]
        co = consts[keep]
        for k in range(len(keep)):
            A, b = _cell_halfspaces(gr, co, k, d)
            verts = enumerate_vertices(A, b)
            if len(verts) <= d:
                continue
            vol, centroid = volume_centroid(verts)
            if vol <= 0:
                continue
            total += vol * density * (co[k] + gr[k] @ centroid)
    return total


@dataclass(frozen=True)
class MAResult:
    """A Monge-Ampere measure with backend provenance and error estimate."""

    measure: AtomicMeasure
    backend: str
    error_estimate: float
    cells: CellComplex | None = None

    def to_json(self) -> dict:
        out = self.measure.to_json()
        out["backend"] = self.backend
        out["errorEstimate"] = float(self.error_estimate)
        return out


def trop_ma(
    psi: MaxAffineFn,
    backend: str = "exact",
    mc_samples: int = MC_SAMPLES,
    seed: int = 0,
    allow_nonsymmetric: bool = False,
    cluster_tol: float = CLUSTER_TOL,
) -> MAResult:
    """The tropical Monge-Ampere measure of a symmetric envelope on B.

    The kink vertices of psi carry all candidate maximizers of
    <m, .> - psi, so the pushforward of Lebesgue measure on A under the
    c-gradient reduces to cell masses over that candidate set.  Atoms within
    `cluster_tol` are merged; zero-mass candidates are dropped.
    """
    if psi.side != "B":
        raise SideError("the operator acts on functions on B")
    if not allow_nonsymmetric and not is_symmetric(psi):
        raise SymmetryError(
            "psi is not G-invariant; pass allow_nonsymmetric=True to force"
        )
    cands = envelope_candidates(psi)
    g = np.array([psi.value(p) for p in cands])
    complex_ = cells_from_weights(
        cands, g, backend=backend, mc_samples=mc_samples, seed=seed
    )
    # Cluster nearby candidates and drop the massless ones.
    clusters: list[tuple[BaryPoint, float, float]] = []
    for p, mass, err in zip(cands, complex_.masses, complex_.atom_errors):
        for idx, (q_, m_, e_) in enumerate(clusters):
            if p.same_point(q_, cluster_tol):
                clusters[idx] = (q_, m_ + mass, math.hypot(e_, err))
                break
        else:
            clusters.append((p, float(mass), float(err)))
    drop = DROP_TOL if backend == "exact" else 0.0
    atoms = [(p, m) for p, m, e in clusters if m > max(drop, 3.0 * e if e else 0.0)]
    if not atoms:
        raise RuntimeError("empty Monge-Ampere measure (all cells massless)")
    err = (
        1e-9
        if backend == "exact"
        else float(np.sqrt(np.sum(complex_.atom_errors**2)))
    )
    return MAResult(AtomicMeasure("B", tuple(atoms)), backend, err, complex_)


def alexandrov_ma_chart(
    f: ChartConvexFn, t0: np.ndarray, convexity_check: bool = True
) -> float:
    """Alexandrov mass of a chart function at t0: volume of its subgradient.

    The subgradient polytope {h : h.(t - t0) <= f(t) - f(t0) for all t} is
    cut out by the kink vertices of f (the function is affine between them).
    Requires t0 interior to the chart domain and f convex near t0.
    """
    t0 = np.asarray(t0, dtype=float)
    d = f.chart.d
    f0 = f.value(t0)
    if convexity_check:
        rng = np.random.default_rng(0)
        eps = 1e-5
        dirs = np.vstack([np.eye(d), -np.eye(d), rng.normal(size=(4 * d, d))])
        for u in dirs:
            u = u / np.linalg.norm(u)
            try:
                gap = f.value(t0 + eps * u) + f.value(t0 - eps * u) - 2 * f0
            except Exception:
                continue
            if gap < -1e-9:
                raise ValueError(f"function is not convex at t0 (gap {gap:.3e})")
    cands = f.kink_candidates()
    rows, rhs = [], []
    for tv in cands:
        diff = tv - t0
        if np.abs(diff).max() <= 1e-12:
            continue
        rows.append(diff)
        rhs.append(f.value(tv) - f0)
    verts = enumerate_vertices(np.array(rows), np.array(rhs))
    if len(verts) <= d:
        return 0.0
    vol, _ = volume_centroid(verts)
    return float(vol)


@dataclass(frozen=True)
class ChartComparisonEntry:
    atom: BaryPoint
    tropical_mass: float
    chart_mass: float | None
    status: str  # "regular" | "singular" | "outside-chart" | "chart-boundary"

    @property
    def residual(self) -> float | None:
        if self.chart_mass is None:
            return None
        return abs(self.chart_mass - self.tropical_mass)


@dataclass(frozen=True)
class ChartComparison:
    """Per-atom agreement between the tropical and chart-level operators."""

    i: int
    j: int
    entries: tuple

    def max_regular_residual(self) -> float:
        vals = [e.residual for e in self.entries if e.status == "regular"]
        return max(vals) if vals else 0.0

    def singular_entries(self) -> list[ChartComparisonEntry]:
        return [e for e in self.entries if e.status == "singular"]


def compare_in_charts(
    psi: MaxAffineFn,
    i: int,
    j: int,
    backend: str = "exact",
    allow_nonsymmetric: bool = False,
    **kw,
) -> ChartComparison:
    """Check the tropical masses against chart Alexandrov masses in q_{i,j}.

    Atoms in the regular locus interior to the chart must agree; atoms on
    the singular set are reported with their (differing) chart value and
    flagged, since the chart identity does not extend there.
    """
    result = trop_ma(
        psi, backend=backend, allow_nonsymmetric=allow_nonsymmetric, **kw
    )
    d = psi.d
    cf = chart_restrict(psi, i, j)
    ch = chart("q", i, j, d)
    ref = ch.reference_vertices()
    Minv = np.linalg.inv(np.vstack([ref.T, np.ones(d + 1)]))
    entries = []
    for atom, mass in result.measure.atoms:
        beta = atom.weights
        off_i = np.delete(beta, i)
        if off_i.min() > 1e-9:
            entries.append(ChartComparisonEntry(atom, mass, None, "outside-chart"))
            continue
        t0 = q_inv(i, j, atom.vector(), d, check=False)
        lam = Minv @ np.append(t0, 1.0)
        if lam.min() <= 1e-9:
            entries.append(ChartComparisonEntry(atom, mass, None, "chart-boundary"))
            continue
        regular = classify(atom).in_regular_locus
        chart_mass = alexandrov_ma_chart(cf, t0)
        entries.append(
            ChartComparisonEntry(
                atom, mass, chart_mass, "regular" if regular else "singular"
            )
        )
    return ChartComparison(i, j, tuple(entries))


def check_cell_inclusions(complex_: CellComplex, mass_tol: float = 1e-9) -> list[str]:
    """Violations of the cell-location rule for atoms in the regular locus.

    An atom with a strictly maximal coordinate i (open star of vertex n_i)
    must carry all of its cell mass on the face sigma_i; an atom interior
    to the face tau_i must carry none of it on sigma_i.  Returns a list of
    human-readable violations; empty means the rule holds.
    """
    out: list[str] = []
    by_atom: dict[int, list[FaceCell]] = {}
    for cell in complex_.cells:
        if cell.mass > mass_tol:
            by_atom.setdefault(cell.atom, []).append(cell)
    for k, p in enumerate(complex_.atoms):
        cls = classify(p)
        stars = [f.i for f, interior in cls.members if f.kind == "T" and interior]
        faces = [f.i for f, interior in cls.members if f.kind == "tau" and interior]
        for cell in by_atom.get(k, []):
            if stars and cell.face != stars[0]:
                out.append(
                    f"atom {k} (star of vertex {stars[0]}) has mass "
                    f"{cell.mass:g} on face {cell.face}"
                )
            if faces and cell.face == faces[0]:
                out.append(
                    f"atom {k} (interior of face {faces[0]}) has mass "
                    f"{cell.mass:g} on the opposite face {cell.face}"
                )
    return out


def energy(atoms, g, nu: AtomicMeasure) -> float:
    """F(g) = integral over A of max_k(<m,n_k> - g_k) d mu + sum nu_k g_k."""
    atoms = tuple(atoms)
    g = np.asarray(g, dtype=float)
    d = atoms[0].d
    if nu.side != "B":
        raise SideError("target measure must live on B")
    W = np.array([p.weights for p in atoms])
    lin = sum(nu.weight_at(p) * gk for p, gk in zip(atoms, g))
    return integrate_envelope_over_A(W, g, d) + float(lin)


def energy_gradient(
    atoms, g, nu: AtomicMeasure, backend: str = "exact", **kw
) -> np.ndarray:
    """dF/dg_k = nu_k - mass(cell_k); zero exactly when nu_psi = nu."""
    complex_ = cells_from_weights(atoms, g, backend=backend, **kw)
    nus = np.array([nu.weight_at(p) for p in atoms])
    return nus - complex_.masses


def energy_from_fn(psi: MaxAffineFn, nu: AtomicMeasure) -> float:
    """F(psi) for an arbitrary envelope: exact conjugate integral + atom sum."""
    cands = envelope_candidates(psi)
    W = np.array([p.weights for p in cands])
    vals = np.array([psi.value(p) for p in cands])
    return integrate_envelope_over_A(W, vals, psi.d) + nu.integrate(psi)


def nonsymmetric_fixtures(name: str, i: int = 0, j: int = 1) -> dict:
    """The three standard non-symmetric pathologies, as a report dictionary.

    "chart-overcount": the chart Alexandrov mass of the linear function m_i
    totals 128 (d=2), exceeding the symmetric total 32.
    "pushforward-overcount": the c-subgradient pushforward of
    max_{l != i} m_l weighs 8 at n_i plus 32 at the opposite face
    barycenter, total 40.
    "non-differentiable": the d=1 energy derivative fixture with one-sided
    derivatives that genuinely differ.
    """
    if name == "chart-overcount":
        d = 2
        psi = MaxAffineFn("B", ((BaryPoint("A", np.eye(d + 2)[i]), 0.0),))
        cf = chart_restrict(psi, i, j)
        mass = alexandrov_ma_chart(cf, np.zeros(d))
        return {
            "name": name,
            "chart_total": mass,
            "symmetric_total": total_measure("A", d),
        }
    if name == "pushforward-overcount":
        d = 2
        gens = tuple(
            (BaryPoint("A", np.eye(d + 2)[l]), 0.0) for l in range(d + 2) if l != i
        )
        psi = MaxAffineFn("B", gens)
        result = trop_ma(psi, allow_nonsymmetric=True)
        return {
            "name": name,
            "measure": result.measure,
            "total": result.measure.total_mass(),
            "symmetric_total": total_measure("A", d),
        }
    if name == "non-differentiable":
        psi, v = non_diff_fixture()
        report = directional_energy_derivative(psi, v)
        return {
            "name": name,
            "left": report.left,
            "right": report.right,
            "gap": report.gap,
            "psi_symmetric": report.psi_symmetric,
            "v_symmetric": report.v_symmetric,
        }
    raise ValueError(f"unknown fixture {name!r}")


def non_diff_fixture() -> tuple[MaxAffineFn, EdgeInterpolant]:
    """The d=1 non-differentiability data: psi(n) = max_i <m_i, n - n_0'>
    and a nonnegative PL bump v with v(n_0) = 1, v(n_1') = v(n_2') = 0."""
    d = 1
    half = np.full(3, 0.5)
    mids = []
    for l in range(3):
        w = half.copy()
        w[l] = 0.0
        mids.append(BaryPoint("B", w))  # midpoint of tau_l (= n_l')
    n0p = mids[0].vector()
    gens = []
    for l in range(3):
        anchor = BaryPoint("A", np.eye(3)[l])
        gens.append((anchor, float(anchor.vector() @ n0p)))
    psi = MaxAffineFn("B", tuple(gens))
    verts = [BaryPoint("B", np.eye(3)[l]) for l in range(3)]
    nodes = verts + mids
    values = [1.0, 0.0, 0.0] + [0.0, 0.0, 0.0]
    v = EdgeInterpolant("B", nodes, values)
    return psi, v


def vertmass_fn(d: int) -> MaxAffineFn:
    """psi identically 1 on B, as the envelope of the A-side vertices."""
    gens = tuple((BaryPoint("A", np.eye(d + 2)[l]), 0.0) for l in range(d + 2))
    return MaxAffineFn("B", gens)


def dualvertmass_fn() -> MaxAffineFn:
    """The explicit d=2 envelope with mass 8 at each face barycenter n_i'."""
    d = 2
    gens = []
    for l in range(d + 2):
        w = np.full(d + 2, 1.0 / 3.0)
        w[l] = 0.0
        sigma_bary = np.full(d + 2, 1.0 / 3.0)
        sigma_bary[l] = 0.0
        gens.append((BaryPoint("A", sigma_bary), 1.0 / 9.0))
    for a in range(d + 2):
        for b in range(a + 1, d + 2):
            w = np.zeros(d + 2)
            w[a] = w[b] = 0.5
            gens.append((BaryPoint("A", w), 1.0 / 3.0))
    return MaxAffineFn("B", tuple(gens))


def singmass_fn() -> MaxAffineFn:
    """The d=2 envelope max(max_i m_i', 1/3) charging only B minus B_0.

    The constant piece 1/3 is realized on B as max_i <m_i, n> - 2/3, since
    max_i <m_i, .> is identically 1 there.
    """
    d = 2
    gens = []
    for l in range(d + 2):
        sigma_bary = np.full(d + 2, 1.0 / 3.0)
        sigma_bary[l] = 0.0
        gens.append((BaryPoint("A", sigma_bary), 0.0))
    for l in range(d + 2):
        gens.append((BaryPoint("A", np.eye(d + 2)[l]), 2.0 / 3.0))
    return MaxAffineFn("B", tuple(gens))
