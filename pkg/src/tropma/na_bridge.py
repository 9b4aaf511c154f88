"""Chart-level potential data and factor-d! bookkeeping for the toric bridge.

A c-convex envelope psi on B, together with a reference vertex index j,
determines the potential data (psi - m_j) evaluated through the envelope
formula at arbitrary points of N_R.  The companion report checks that chart
Monge-Ampere masses, multiplied by d!, reproduce the d!-rescaled tropical
measure of total mass (d+2)^{d+1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import total_measure, vertex_m
from .cconvex import MaxAffineFn
from .ma_operator import ChartComparison, compare_in_charts, trop_ma


@dataclass(frozen=True)
class TropicalPotential:
    """Envelope-minus-linear potential values at a list of query vectors."""

    psi: MaxAffineFn
    reference_index: int
    queries: tuple  # of ambient representatives (tuples of floats)
    values: tuple  # of floats

    def to_json(self) -> dict:
        return {
            "referenceIndex": self.reference_index,
            "psi": self.psi.to_json(),
            "queries": [[float(x) for x in q_] for q_ in self.queries],
            "values": [float(v) for v in self.values],
        }

    def to_csv(self) -> str:
        k = len(self.queries[0])
        lines = [",".join([f"n{r}" for r in range(k)] + ["value"])]
        for q_, v in zip(self.queries, self.values):
            lines.append(",".join(f"{x:.17g}" for x in (*q_, v)))
        return "\n".join(lines) + "\n"


def potential_eval(psi: MaxAffineFn, j: int, queries) -> TropicalPotential:
    """Values of the envelope minus <m_j, .> at arbitrary N_R representatives.

    Restricted to B this is psi(n) - <m_j, n> exactly; off B it is the
    canonical envelope extension.
    """
    d = psi.d
    mj = vertex_m(d, j)
    qs = []
    vals = []
    for q_ in queries:
        x = np.asarray(q_, dtype=float)
        qs.append(tuple(float(c) for c in x))
        vals.append(psi.value_vector(x) - float(mj @ x))
    return TropicalPotential(psi, j, tuple(qs), tuple(vals))


@dataclass(frozen=True)
class NormalizationReport:
    d: int
    tropical_total: float
    na_total: float
    expected_na_total: float
    per_atom: tuple  # of (tropical mass, d! x chart mass or None)
    chart_comparison: ChartComparison

    @property
    def total_residual(self) -> float:
        return abs(self.na_total - self.expected_na_total)


def compare_ma_normalization(
    psi: MaxAffineFn, i: int = 0, j: int = 1, **kw
) -> NormalizationReport:
    """Check the d!-rescaling between tropical and chart-level totals.

    The d!-rescaled tropical measure has total d! |A| = (d+2)^{d+1}; for
    atoms in the regular locus the chart Alexandrov mass times d! must
    match the rescaled atom mass.
    """
    d = psi.d
    result = trop_ma(psi, **kw)
    tropical_total = result.measure.total_mass()
    na_total = math.factorial(d) * tropical_total
    expected = float((d + 2) ** (d + 1))
    cc = compare_in_charts(psi, i, j, **kw)
    per_atom = tuple(
        (
            e.tropical_mass,
            None if e.chart_mass is None else math.factorial(d) * e.chart_mass,
        )
        for e in cc.entries
    )
    assert abs(math.factorial(d) * total_measure("A", d) - expected) < 1e-9
    return NormalizationReport(d, tropical_total, na_total, expected, per_atom, cc)
