"""Tiny dense linear programming via the two-phase simplex method.

Problems here never exceed a handful of variables (d+2 barycentric weights
plus one epigraph variable) and a few dozen constraints, so a dense tableau
with Bland's anti-cycling rule is plenty.
"""

from __future__ import annotations

import numpy as np

PIVOT_TOL = 1e-10


class LPError(RuntimeError):
    """Infeasible or unbounded program (internal error for our usages)."""


def _simplex(T: np.ndarray, basis: np.ndarray, ncols: int) -> None:
    """Run the simplex method in place on tableau T with Bland's rule.

    T has shape (m+1, ncols+1); the last row is the objective (to maximize,
    stored as reduced costs), the last column the right-hand side.
    """
    m = T.shape[0] - 1
    while True:
        enter = -1
        for j in range(ncols):
            if T[-1, j] > PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            return
        leave, best = -1, np.inf
        for r in range(m):
            a = T[r, enter]
            if a > PIVOT_TOL:
                ratio = T[r, -1] / a
                if ratio < best - PIVOT_TOL or (
                    abs(ratio - best) <= PIVOT_TOL
                    and (leave < 0 or basis[r] < basis[leave])
                ):
                    leave, best = r, ratio
        if leave < 0:
            raise LPError("unbounded linear program")
        piv = T[leave, enter]
        T[leave] /= piv
        for r in range(m + 1):
            if r != leave and T[r, enter] != 0.0:
                T[r] -= T[r, enter] * T[leave]
        basis[leave] = enter


def linprog_max(
    c: np.ndarray,
    A_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    A_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Maximize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.

    Returns (optimal value, optimal x).  Raises LPError if infeasible or
    unbounded.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    rows = []
    rhs = []
    n_ub = 0
    if A_ub is not None:
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        n_ub = A_ub.shape[0]
        rows.append(A_ub)
        rhs.append(b_ub)
    if A_eq is not None:
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        rows.append(A_eq)
        rhs.append(b_eq)
    A = np.vstack(rows) if rows else np.zeros((0, n))
    b = np.concatenate(rhs) if rhs else np.zeros(0)
    m = A.shape[0]

    # Slacks for the inequality rows, then artificials for every row.
    slack = np.zeros((m, n_ub))
    for r in range(n_ub):
        slack[r, r] = 1.0
    # Flip rows with negative rhs so artificials start feasible.
    M = np.hstack([A, slack])
    for r in range(m):
        if b[r] < 0:
            M[r] *= -1.0
            b = b.copy()
            b[r] = -b[r]
    ncore = n + n_ub
    T = np.zeros((m + 1, ncore + m + 1))
    T[:m, :ncore] = M
    T[:m, ncore : ncore + m] = np.eye(m)
    T[:m, -1] = b
    # Phase 1: minimize the artificial total.
    T[-1, ncore : ncore + m] = -1.0
    basis = np.arange(ncore, ncore + m)
    for r in range(m):
        T[-1] += T[r]
    _simplex(T, basis, ncore)
    if T[-1, -1] > 1e-7:
        raise LPError(f"infeasible linear program (phase-1 gap {T[-1, -1]:.3e})")
    # Drive lingering artificials out of the basis where possible.
    for r in range(m):
        if basis[r] >= ncore:
            for j in range(ncore):
                if abs(T[r, j]) > PIVOT_TOL:
                    piv = T[r, j]
                    T[r] /= piv
                    for rr in range(m + 1):
                        if rr != r and T[rr, j] != 0.0:
                            T[rr] -= T[rr, j] * T[r]
                    basis[r] = j
                    break
    # Phase 2.
    T[:, ncore : ncore + m] = 0.0
    T[-1, :] = 0.0
    T[-1, :n] = c
    for r in range(m):
        if basis[r] < ncore:
            T[-1] -= T[-1, basis[r]] * T[r]
    _simplex(T, basis, ncore)
    x = np.zeros(ncore)
    for r in range(m):
        if basis[r] < ncore:
            x[basis[r]] = T[r, -1]
    return float(-T[-1, -1]), x[:n]


def maximize_min_affine_over_simplex(
    C: np.ndarray, e: np.ndarray
) -> tuple[float, np.ndarray]:
    """Maximize min_a (C[a].beta + e[a]) over the standard simplex.

    The simplex is {beta >= 0, sum beta = 1} in C.shape[1] variables.
    Returns (value, argmax beta).
    """
    C = np.atleast_2d(np.asarray(C, dtype=float))
    e = np.atleast_1d(np.asarray(e, dtype=float))
    na, nv = C.shape
    # Epigraph variable t, shifted to stay nonnegative: t = t' + L.
    L = float(np.min(C.min(axis=1) + e)) - 1.0
    # Variables x = (t', beta).
    c = np.zeros(nv + 1)
    c[0] = 1.0
    A_ub = np.hstack([np.ones((na, 1)), -C])
    b_ub = e - L
    A_eq = np.zeros((1, nv + 1))
    A_eq[0, 1:] = 1.0
    val, x = linprog_max(c, A_ub, b_ub, A_eq, np.array([1.0]))
    return val + L, x[1:]
