"""Tropical Monge-Ampere calculus on the boundary of the polar simplex.

The library works with the dual pair of simplex boundaries A and B carrying
the integral-affine pairing <m_i, n_j> = -(d+1) (i = j) and 1 (i != j):
c-transforms and envelopes, symmetric Monge-Ampere measures with exact and
Monte Carlo cell backends, chart-level Alexandrov masses, a variational
solver for prescribed measures, and chart/potential export utilities.
"""

from .geometry import (
    BaryPoint,
    Classification,
    DimensionError,
    FaceId,
    GroupElement,
    SideError,
    classify,
    face_measure,
    group_elements,
    in_star,
    orbit,
    pairing,
    total_measure,
    vertex_m,
    vertex_n,
)
from .charts import Chart, chart, p, p_inv, q, q_inv
from .cconvex import (
    ChartConvexFn,
    DiscreteFn,
    EnergyDerivative,
    MaxAffineFn,
    c_subgradient,
    chart_restrict,
    ctransform_discrete,
    ctransform_envelope,
    ctransform_exact,
    directional_energy_derivative,
    double_transform,
    is_symmetric,
    symmetrize_fn,
    symmetry_defect,
)
from .measures import (
    AtomicMeasure,
    LebesgueMeasure,
    MeasureDistance,
    bl_distance,
    is_symmetric_measure,
    lebesgue_on_B,
    measure_from_json,
    symmetrize,
)
from .ma_operator import (
    CellComplex,
    ChartComparison,
    MAResult,
    SymmetryError,
    alexandrov_ma_chart,
    cells_from_weights,
    check_cell_inclusions,
    compare_in_charts,
    energy,
    energy_gradient,
    nonsymmetric_fixtures,
    trop_ma,
)
from .solver import (
    MassNormalizationError,
    SolveConfig,
    SolveResult,
    random_symmetric_target,
    solve,
    solve_continuous,
    verify_uniqueness,
)
from .na_bridge import (
    NormalizationReport,
    TropicalPotential,
    compare_ma_normalization,
    potential_eval,
)
from .regression import ExampleRow, format_table, run_examples

__version__ = "1.0.0"

__all__ = [
    "AtomicMeasure",
    "BaryPoint",
    "CellComplex",
    "Chart",
    "ChartComparison",
    "ChartConvexFn",
    "Classification",
    "DimensionError",
    "DiscreteFn",
    "EnergyDerivative",
    "ExampleRow",
    "FaceId",
    "GroupElement",
    "LebesgueMeasure",
    "MAResult",
    "MassNormalizationError",
    "MaxAffineFn",
    "MeasureDistance",
    "NormalizationReport",
    "SideError",
    "SolveConfig",
    "SolveResult",
    "SymmetryError",
    "TropicalPotential",
    "alexandrov_ma_chart",
    "bl_distance",
    "c_subgradient",
    "cells_from_weights",
    "chart",
    "chart_restrict",
    "check_cell_inclusions",
    "classify",
    "compare_in_charts",
    "compare_ma_normalization",
    "ctransform_discrete",
    "ctransform_envelope",
    "ctransform_exact",
    "directional_energy_derivative",
    "double_transform",
    "energy",
    "energy_gradient",
    "face_measure",
    "format_table",
    "group_elements",
    "in_star",
    "is_symmetric",
    "is_symmetric_measure",
    "lebesgue_on_B",
    "measure_from_json",
    "nonsymmetric_fixtures",
    "orbit",
    "p",
    "p_inv",
    "pairing",
    "potential_eval",
    "q",
    "q_inv",
    "random_symmetric_target",
    "run_examples",
    "solve",
    "solve_continuous",
    "symmetrize",
    "symmetrize_fn",
    "symmetry_defect",
    "total_measure",
    "trop_ma",
    "verify_uniqueness",
    "vertex_m",
    "vertex_n",
]
