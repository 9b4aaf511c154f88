"""Built-in closed-form regression examples with frozen expected values.

Each example computes a handful of scalar quantities whose exact values are
known in closed form and reports them as (expected, computed, tolerance)
rows.  The command-line runner prints these as a table and fails on any
mismatch; the test suite asserts them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BaryPoint, pairing, total_measure, vertex_m, vertex_n
from .ma_operator import (
    compare_in_charts,
    nonsymmetric_fixtures,
    singmass_fn,
    trop_ma,
    vertmass_fn,
    dualvertmass_fn,
)
from .na_bridge import compare_ma_normalization

NON_DIFF_GAP = 3.0  # frozen from an independent dense-grid derivative oracle


@dataclass(frozen=True)
class ExampleRow:
    example: str
    quantity: str
    expected: float
    computed: float
    tolerance: float
    informational: bool = False

    @property
    def ok(self) -> bool:
        return abs(self.computed - self.expected) <= self.tolerance


EXAMPLE_NAMES = (
    "pairing",
    "vertmass",
    "dualvertmass",
    "singmass",
    "chart-overcount",
    "pushforward-overcount",
    "non-differentiable",
    "normalization",
)


def _worst(values, expected: float) -> float:
    """The computed value farthest from the expectation (worst case)."""
    values = list(values)
    if not values:
        return math.nan
    return max(values, key=lambda v: abs(v - expected))


def _pairing_rows(dims) -> list[ExampleRow]:
    rows = []
    for d in dims:
        dev = 0.0
        for i in range(d + 2):
            for j in range(d + 2):
                want = -(d + 1) if i == j else 1.0
                got = pairing(vertex_m(d, i), vertex_n(d, j))
                dev = max(dev, abs(got - want))
        rows.append(
            ExampleRow("pairing", f"d={d} max |<m_i,n_j> - table|", 0.0, dev, 1e-12)
        )
    return rows


def _vertmass_rows(dims) -> list[ExampleRow]:
    rows = []
    for d in dims:
        per_vertex = (d + 2) ** d / math.factorial(d)
        res = trop_ma(vertmass_fn(d))
        masses = res.measure.weights()
        rows.append(
            ExampleRow(
                "vertmass",
                f"d={d} mass at each vertex",
                per_vertex,
                _worst(masses, per_vertex),
                1e-9,
            )
        )
        rows.append(
            ExampleRow(
                "vertmass",
                f"d={d} total mass",
                total_measure("A", d),
                res.measure.total_mass(),
                1e-9,
            )
        )
    return rows


def _dualvertmass_rows() -> list[ExampleRow]:
    res = trop_ma(dualvertmass_fn())
    masses = res.measure.weights()
    return [
        ExampleRow(
            "dualvertmass",
            "d=2 mass at each face barycenter",
            8.0,
            _worst(masses, 8.0),
            1e-6,
        ),
        ExampleRow(
            "dualvertmass", "d=2 atom count", 4.0, float(len(masses)), 0.0
        ),
        ExampleRow(
            "dualvertmass", "d=2 total mass", 32.0, res.measure.total_mass(), 1e-6
        ),
    ]


def _singmass_rows() -> list[ExampleRow]:
    res = trop_ma(singmass_fn())
    masses = res.measure.weights()
    rows = [
        ExampleRow(
            "singmass",
            "d=2 tropical mass at each edge midpoint",
            16.0 / 3.0,
            _worst(masses, 16.0 / 3.0),
            1e-6,
        ),
        ExampleRow(
            "singmass", "d=2 atom count", 6.0, float(len(masses)), 0.0
        ),
    ]
    cc = compare_in_charts(singmass_fn(), 0, 1)
    chart_vals = [e.chart_mass for e in cc.singular_entries() if e.chart_mass is not None]
    rows.append(
        ExampleRow(
            "singmass",
            "d=2 chart Alexandrov mass at the same points (differs: informational)",
            80.0 / 9.0,
            _worst(chart_vals, 80.0 / 9.0),
            1e-6,
            informational=True,
        )
    )
    return rows


def _chart_overcount_rows() -> list[ExampleRow]:
    rep = nonsymmetric_fixtures("chart-overcount")
    return [
        ExampleRow(
            "chart-overcount",
            "d=2 chart mass of a single linear generator",
            128.0,
            rep["chart_total"],
            1e-6,
        )
    ]


def _pushforward_overcount_rows() -> list[ExampleRow]:
    rep = nonsymmetric_fixtures("pushforward-overcount")
    measure = rep["measure"]
    d = 2
    at_vertex = measure.weight_at(BaryPoint.repaired("B", np.eye(d + 2)[0]))
    bary = np.full(d + 2, 1.0 / 3.0)
    bary[0] = 0.0
    at_bary = measure.weight_at(BaryPoint.repaired("B", bary))
    return [
        ExampleRow(
            "pushforward-overcount", "d=2 mass at the vertex", 8.0, at_vertex, 1e-6
        ),
        ExampleRow(
            "pushforward-overcount",
            "d=2 mass at the opposite face barycenter",
            32.0,
            at_bary,
            1e-6,
        ),
        ExampleRow(
            "pushforward-overcount",
            "d=2 total (exceeds the symmetric total 32)",
            40.0,
            rep["total"],
            1e-6,
        ),
    ]


def _non_diff_rows() -> list[ExampleRow]:
    rep = nonsymmetric_fixtures("non-differentiable")
    # One-sided difference quotients at step h carry an O(h) discretization
    # error; the frozen gap is exact.
    h = 1e-3
    return [
        ExampleRow(
            "non-differentiable", "d=1 right derivative", 0.0, rep["right"], 1e-2
        ),
        ExampleRow(
            "non-differentiable", "d=1 left derivative", -3.0, rep["left"], 1e-2
        ),
        ExampleRow(
            "non-differentiable",
            "d=1 one-sided derivative gap",
            NON_DIFF_GAP,
            rep["gap"],
            10.0 * h,
        ),
    ]


def _normalization_rows(dims) -> list[ExampleRow]:
    rows = []
    for d in dims:
        if d == 1:
            psi = vertmass_fn(1)
        else:
            psi = vertmass_fn(d)
        rep = compare_ma_normalization(psi)
        rows.append(
            ExampleRow(
                "normalization",
                f"d={d} chart-side total d! x |A|",
                float((d + 2) ** (d + 1)),
                rep.na_total,
                1e-6,
            )
        )
    return rows


def run_examples(name: str | None = None, dim: int | None = None) -> list[ExampleRow]:
    """Rows for one named example (or all), optionally restricted to one d."""
    if name is not None and name not in EXAMPLE_NAMES:
        raise ValueError(
            f"unknown example {name!r}; choose from {', '.join(EXAMPLE_NAMES)}"
        )
    all_dims = [1, 2, 3]
    dims = all_dims if dim is None else [dim]
    rows: list[ExampleRow] = []

    def want(n: str, fixed_dim: int | None = None) -> bool:
        if name is not None and name != n:
            return False
        return fixed_dim is None or dim is None or dim == fixed_dim

    if want("pairing"):
        rows += _pairing_rows(dims)
    if want("vertmass"):
        rows += _vertmass_rows(dims)
    if want("dualvertmass", fixed_dim=2):
        rows += _dualvertmass_rows()
    if want("singmass", fixed_dim=2):
        rows += _singmass_rows()
    if want("chart-overcount", fixed_dim=2):
        rows += _chart_overcount_rows()
    if want("pushforward-overcount", fixed_dim=2):
        rows += _pushforward_overcount_rows()
    if want("non-differentiable", fixed_dim=1):
        rows += _non_diff_rows()
    if want("normalization"):
        rows += _normalization_rows([d for d in dims if d <= 2])
    if not rows:
        raise ValueError(
            f"no example rows for name={name!r}, dim={dim!r}"
        )
    return rows


def format_table(rows: list[ExampleRow]) -> str:
    header = ("example", "quantity", "expected", "computed", "tolerance", "status")
    table = [header]
    for r in rows:
        table.append(
            (
                r.example,
                r.quantity,
                f"{r.expected:.12g}",
                f"{r.computed:.12g}",
                f"{r.tolerance:.3g}",
                "pass" if r.ok else "FAIL",
            )
        )
    widths = [max(len(row[c]) for row in table) for c in range(len(header))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
