"""Half-space intersection, vertex enumeration, and volumes at desk scale.

All polytopes here are intersections of a simplex with a handful of
half-planes in dimension d <= 3, so brute-force enumeration over d-subsets
of constraints is both exact and fast enough.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

FEAS_TOL = 1e-10
DEDUP_DECIMALS = 9


@lru_cache(maxsize=4096)
def _combo_index(m: int, d: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(m), d)), dtype=int)


def enumerate_vertices(A: np.ndarray, b: np.ndarray, tol: float = FEAS_TOL) -> np.ndarray:
    """Vertices of {x in R^d : A x <= b} by intersecting d-subsets of facets.

    Returns a (k, d) array (possibly empty).  The polytope must be bounded;
    unbounded regions simply yield the vertices of their bounded skeleton.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    m, d = A.shape
    if m < d:
        return np.zeros((0, d))
    combos = _combo_index(m, d)
    mats = A[combos, :]  # (ncomb, d, d)
    rhs = b[combos]  # (ncomb, d)
    dets = np.abs(np.linalg.det(mats))
    scale = np.maximum(np.abs(mats).max(axis=(1, 2)), 1.0)
    good = dets > 1e-12 * scale**d
    if not np.any(good):
        return np.zeros((0, d))
    sols = np.linalg.solve(mats[good], rhs[good][..., None])[..., 0]
    slack = sols @ A.T - b[None, :]
    feas = np.all(slack <= tol * np.maximum(1.0, np.abs(b))[None, :], axis=1)
    pts = sols[feas]
    return dedup_points(pts)


def arrangement_vertices_in_simplex(
    normals: np.ndarray, rhs: np.ndarray, d: int, tol: float = FEAS_TOL
) -> np.ndarray:
    """Vertices of a hyperplane arrangement clipped to the standard simplex.

    `normals @ x = rhs` lists arbitrary hyperplanes; the simplex facets
    (x_r = 0 and sum x = 1) are always adjoined.  Every point where d of the
    hyperplanes meet inside {x >= 0, sum x <= 1} is returned, vertices of the
    simplex included.
    """
    normals = (
        np.atleast_2d(np.asarray(normals, dtype=float))
        if len(normals)
        else np.zeros((0, d))
    )
    rhs = np.atleast_1d(np.asarray(rhs, dtype=float)) if len(rhs) else np.zeros(0)
    facets_n = np.vstack([np.eye(d), np.ones((1, d))])
    facets_r = np.append(np.zeros(d), 1.0)
    N = np.vstack([normals, facets_n])
    R = np.concatenate([rhs, facets_r])
    m = N.shape[0]
    combos = _combo_index(m, d)
    mats = N[combos, :]
    bs = R[combos]
    dets = np.abs(np.linalg.det(mats))
    scale = np.maximum(np.abs(mats).max(axis=(1, 2)), 1.0)
    good = dets > 1e-12 * scale**d
    if not np.any(good):
        return np.zeros((0, d))
    sols = np.linalg.solve(mats[good], bs[good][..., None])[..., 0]
    inside = np.all(sols >= -tol, axis=1) & (sols.sum(axis=1) <= 1.0 + tol)
    return dedup_points(sols[inside])


def dedup_points(pts: np.ndarray, decimals: int = DEDUP_DECIMALS) -> np.ndarray:
    if len(pts) == 0:
        return pts
    seen = {}
    for p in pts:
        key = tuple(np.round(p, decimals))
        if key not in seen:
            seen[key] = p
    return np.array(list(seen.values()))


def volume_centroid(pts: np.ndarray) -> tuple[float, np.ndarray]:
    """Euclidean volume and centroid of the convex hull of pts in R^d.

    Degenerate point sets (lower-dimensional hulls) have volume 0 and the
    point mean as centroid placeholder.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if len(pts) == 0:
        return 0.0, np.zeros(pts.shape[1] if pts.ndim == 2 else 0)
    d = pts.shape[1]
    if len(pts) <= d:
        return 0.0, pts.mean(axis=0)
    if d == 1:
        lo, hi = pts.min(), pts.max()
        return float(hi - lo), np.array([(lo + hi) / 2.0])
    from scipy.spatial import ConvexHull, QhullError

    try:
        hull = ConvexHull(pts)
    except QhullError:
        return 0.0, pts.mean(axis=0)
    # Fan triangulation from an interior point, using the hull facets.
    inner = pts[hull.vertices].mean(axis=0)
    vol = 0.0
    moment = np.zeros(d)
    fact = 1.0
    for k in range(2, d + 1):
        fact *= k
    for simplex in hull.simplices:
        verts = pts[simplex]
        edges = verts - inner
        v = abs(np.linalg.det(edges)) / fact
        c = (verts.sum(axis=0) + inner) / (d + 1)
        vol += v
        moment += v * c
    if vol <= 0:
        return 0.0, pts.mean(axis=0)
    return float(vol), moment / vol


def simplex_volume(verts: np.ndarray) -> float:
    """Euclidean volume of a d-simplex given by d+1 vertices in R^d."""
    verts = np.asarray(verts, dtype=float)
    d = verts.shape[1]
    fact = 1.0
    for k in range(2, d + 1):
        fact *= k
    return float(abs(np.linalg.det(verts[1:] - verts[0])) / fact)
