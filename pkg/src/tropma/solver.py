"""Variational solver for the symmetric tropical Monge-Ampere equation.

Given a symmetric atomic target nu on B of total mass |A|, minimize

    F(g) = integral over A of max_k (<m, n_k> - g_k) d mu + sum_k nu_k g_k

over weight vectors g constant on atom orbits.  F is convex, invariant
under adding constants, and differentiable with dF/dg_k = nu_k - mass of
the k-th Laguerre cell; at the minimum the cell masses match nu, i.e. the
induced c-convex function psi solves nu_psi = nu (uniquely up to an
additive constant).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import BaryPoint, orbit, total_measure
from .cconvex import MaxAffineFn, ctransform_exact
from .ma_operator import MC_SAMPLES, cells_from_weights, integrate_envelope_over_A
from .measures import AtomicMeasure, LebesgueMeasure, bl_distance, lebesgue_on_B, symmetrize

MASS_TOL = 1e-9
ARMIJO_SHRINK = 0.5
ARMIJO_SLOPE = 1e-4
MAX_STEP = 64.0


class MassNormalizationError(ValueError):
    """Target measure mass differs from the required (d+2)^{d+1}/d!."""


@dataclass(frozen=True)
class SolveConfig:
    tol: float | None = None  # residual tolerance in mu-mass units
    max_iter: int = 2000
    backend: str = "exact"
    mc_samples: int = MC_SAMPLES
    seed: int = 0
    normalization: str = "fix-orbit-sum"

    def __post_init__(self):
        if self.tol is not None and self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.backend not in ("exact", "monte-carlo"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.normalization not in ("fix-orbit-sum", "fix-value-at-orbit-0"):
            raise ValueError(f"unknown normalization {self.normalization!r}")

    def resolved_tol(self, d: int) -> float:
        return self.tol if self.tol is not None else 1e-6 * total_measure("A", d)


@dataclass(frozen=True)
class SolveResult:
    atoms: tuple  # of BaryPoint on B
    g: np.ndarray  # full weight vector
    orbit_ids: np.ndarray  # atom index -> orbit number
    psi: MaxAffineFn  # the solution, as a c-convex envelope on B
    cell_masses: np.ndarray
    residual: float
    iterations: int
    converged: bool
    trace: tuple  # per-iteration (F, residual, step)

    def g_orbit(self) -> np.ndarray:
        out = np.zeros(int(self.orbit_ids.max()) + 1)
        for k, o in enumerate(self.orbit_ids):
            out[o] = self.g[k]
        return out

    def to_json(self) -> dict:
        return {
            "atoms": [p.to_json() for p in self.atoms],
            "g": [float(x) for x in self.g],
            "orbitIds": [int(o) for o in self.orbit_ids],
            "psi": self.psi.to_json(),
            "cellMasses": [float(x) for x in self.cell_masses],
            "residual": float(self.residual),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "trace": [
                {"F": float(f), "residual": float(r), "step": float(s)}
                for f, r, s in self.trace
            ],
        }

    def trace_csv(self) -> str:
        lines = ["iteration,F,residual,step"]
        for it, (f, r, s) in enumerate(self.trace):
            lines.append(f"{it},{f:.17g},{r:.17g},{s:.17g}")
        return "\n".join(lines) + "\n"


def atom_orbits(atoms, tol: float = 1e-9) -> np.ndarray:
    """Orbit labels for a G-closed atom list (error if orbits are incomplete)."""
    atoms = list(atoms)
    ids = np.full(len(atoms), -1, dtype=int)
    next_id = 0
    for k, p in enumerate(atoms):
        if ids[k] >= 0:
            continue
        for q_ in orbit(p):
            hits = [r for r, a in enumerate(atoms) if a.same_point(q_, tol)]
            if not hits:
                raise ValueError(
                    "atom set is not closed under the symmetry action"
                )
            for r in hits:
                ids[r] = next_id
        next_id += 1
    return ids


def _normalize(g: np.ndarray, orbit_ids: np.ndarray, mode: str) -> np.ndarray:
    sel = orbit_ids == 0
    if mode == "fix-orbit-sum":
        return g - g[sel].mean()
    return g - g[np.nonzero(sel)[0][0]]


def solve(nu: AtomicMeasure, cfg: SolveConfig = SolveConfig(), g0=None) -> SolveResult:
    """Minimize F over orbit-constant weights; projected gradient + Armijo."""
    nu = symmetrize(nu)
    d = nu.d
    target_mass = total_measure("A", d)
    if abs(nu.total_mass() - target_mass) > MASS_TOL * max(1.0, target_mass):
        raise MassNormalizationError(
            f"target mass {nu.total_mass()!r} differs from the required "
            f"(d+2)^(d+1)/d! = {target_mass!r}"
        )
    atoms = tuple(nu.points())
    nu_w = nu.weights()
    orbit_ids = atom_orbits(atoms)
    n_orbits = int(orbit_ids.max()) + 1
    W = np.array([p.weights for p in atoms])
    tol = cfg.resolved_tol(d)

    def masses_of(g):
        cx = cells_from_weights(
            atoms, g, backend=cfg.backend, mc_samples=cfg.mc_samples, seed=cfg.seed
        )
        return cx.masses, cx.atom_errors

    def F_of(g):
        return integrate_envelope_over_A(W, g, d) + float(nu_w @ g)

    go = np.zeros(n_orbits) if g0 is None else np.asarray(g0, dtype=float).copy()
    if go.shape != (n_orbits,):
        raise ValueError(f"g0 must have one entry per orbit ({n_orbits})")
    g = _normalize(go[orbit_ids], orbit_ids, cfg.normalization)

    if cfg.backend == "monte-carlo":
        # A-priori multinomial bound: sum_k p_k (1 - p_k) <= 1 per face.
        face_mass = target_mass / (d + 2)
        per_face = max(1, cfg.mc_samples // (d + 2))
        agg_err = face_mass * float(np.sqrt((d + 2) / per_face))
        if tol < 3.0 * agg_err:
            raise ValueError(
                f"monte-carlo noise too high: tol {tol:g} < 3 x aggregate "
                f"standard error bound {agg_err:g}; raise mc_samples or tol"
            )
    masses, errors = masses_of(g)
    F = F_of(g)
    residual = float(np.abs(masses - nu_w).max())
    trace = [(F, residual, 0.0)]
    step = 1.0
    converged = residual <= tol
    iterations = 0

    for iterations in range(1, cfg.max_iter + 1):
        if converged:
            break
        grad_full = nu_w - masses
        grad_orbit = np.bincount(orbit_ids, weights=grad_full, minlength=n_orbits)
        sq = float(grad_orbit @ grad_orbit)
        if sq == 0.0:
            break
        step = min(step * 2.0, MAX_STEP)
        accepted = False
        while step > 1e-14:
            go_try = np.bincount(orbit_ids, weights=g, minlength=n_orbits)
            counts = np.bincount(orbit_ids, minlength=n_orbits)
            go_try = go_try / counts - step * grad_orbit
            g_try = _normalize(go_try[orbit_ids], orbit_ids, cfg.normalization)
            F_try = F_of(g_try)
            if F_try <= F - ARMIJO_SLOPE * step * sq:
                accepted = True
                break
            step *= ARMIJO_SHRINK
        if not accepted:
            break
        g = g_try
        F = F_try
        masses, errors = masses_of(g)
        residual = float(np.abs(masses - nu_w).max())
        trace.append((F, residual, step))
        converged = residual <= tol

    phi = MaxAffineFn("A", tuple(zip(atoms, g)))
    psi = ctransform_exact(phi)
    return SolveResult(
        atoms=atoms,
        g=g,
        orbit_ids=orbit_ids,
        psi=psi,
        cell_masses=masses,
        residual=residual,
        iterations=iterations,
        converged=converged,
        trace=tuple(trace),
    )


@dataclass(frozen=True)
class UniquenessReport:
    results: tuple
    max_pairwise_deviation: float
    passed: bool


def verify_uniqueness(
    nu: AtomicMeasure, cfg: SolveConfig = SolveConfig(), trials: int = 5
) -> UniquenessReport:
    """Solve from random initializations; solutions must coincide after
    normalization (uniqueness holds up to an additive constant only)."""
    rng = np.random.default_rng(cfg.seed)
    results = []
    d = nu.d
    tol = cfg.resolved_tol(d)
    n_orbits = None
    for t in range(trials):
        if t == 0:
            g0 = None
        else:
            g0 = rng.normal(scale=1.0, size=n_orbits)
        res = solve(nu, cfg, g0=g0)
        if not res.converged:
            raise RuntimeError(f"trial {t} failed to converge")
        n_orbits = int(res.orbit_ids.max()) + 1
        results.append(res)
    dev = 0.0
    for a in range(len(results)):
        for b in range(a + 1, len(results)):
            dev = max(dev, float(np.abs(results[a].g - results[b].g).max()))
    return UniquenessReport(tuple(results), dev, dev < 10.0 * tol)


@dataclass(frozen=True)
class ContinuationStep:
    budget: int
    result: SolveResult
    ma_distance: float | None  # bl distance of MA measures to previous step
    psi_gap: float | None  # sup gap of normalized psi to previous step


def solve_continuous(
    nu_spec,
    budgets,
    cfg: SolveConfig = SolveConfig(),
    d: int | None = None,
    probe_count: int = 128,
) -> list[ContinuationStep]:
    """Solve along an increasing ladder of atomic approximations.

    `nu_spec` is either the string "lebesgue-on-B" (with the dimension `d`
    given) or a LebesgueMeasure on B whose total mass already matches |A|.
    Consecutive solutions are compared through their MA measures
    (bounded-Lipschitz) and through the normalized potentials at the
    current atom set.
    """
    steps: list[ContinuationStep] = []
    prev: SolveResult | None = None
    for budget in budgets:
        if isinstance(nu_spec, str):
            if nu_spec != "lebesgue-on-B":
                raise ValueError(f"unknown target spec {nu_spec!r}")
            if d is None:
                raise ValueError("the lebesgue-on-B target needs the dimension d")
            nu = lebesgue_on_B(d, budget, seed=cfg.seed)
        else:
            lm: LebesgueMeasure = nu_spec
            nu = symmetrize(lm.to_atoms(budget, seed=cfg.seed))
            target = total_measure("A", lm.d)
            if abs(nu.total_mass() - target) > MASS_TOL * max(1.0, target):
                raise MassNormalizationError(
                    f"face-density target has mass {nu.total_mass()!r}, "
                    f"required {target!r}"
                )
        res = solve(nu, cfg)
        if prev is None:
            steps.append(ContinuationStep(budget, res, None, None))
        else:
            m_prev = AtomicMeasure("B", tuple(zip(prev.atoms, prev.cell_masses)))
            m_cur = AtomicMeasure("B", tuple(zip(res.atoms, res.cell_masses)))
            dist = bl_distance(m_prev, m_cur, probe_count, seed=cfg.seed).value
            gap = _psi_gap(prev.psi, res.psi, res.atoms)
            steps.append(ContinuationStep(budget, res, dist, gap))
        prev = res
    return steps


def _psi_gap(psi_a: MaxAffineFn, psi_b: MaxAffineFn, probes) -> float:
    """sup over probe points of |(psi_a - psi_b) - its mean| (mod constants)."""
    diffs = np.array([psi_a.value(p) - psi_b.value(p) for p in probes])
    diffs -= diffs.mean()
    return float(np.abs(diffs).max())


def random_symmetric_target(d: int, n_orbit_reps: int = 2, seed: int = 0) -> AtomicMeasure:
    """A random G-invariant atomic measure of total mass |A| (test helper)."""
    from .geometry import FaceId, sample_face_weights

    rng = np.random.default_rng(seed)
    atoms = []
    # Always include the vertex orbit so the support is solvable-rich.
    for l in range(d + 2):
        atoms.append((BaryPoint("B", np.eye(d + 2)[l]), float(rng.uniform(0.5, 1.5))))
    for r in range(n_orbit_reps):
        w = sample_face_weights(FaceId("tau", 0), d, 1, seed=seed + 100 + r)[0]
        atoms.append((BaryPoint.repaired("B", w), float(rng.uniform(0.5, 1.5))))
    raw = symmetrize(AtomicMeasure("B", tuple(atoms)))
    return raw.scaled(total_measure("A", d) / raw.total_mass())
