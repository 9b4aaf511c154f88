"""Tour of the ambient geometry and the integral-affine charts.

Run with:  python3 demos/01_geometry_and_charts.py
"""

import numpy as np

from tropma.charts import (
    chart,
    chart_pair_residual,
    sample_reference,
    sample_sub_simplex,
)
from tropma.geometry import (
    BaryPoint,
    classify,
    group_elements,
    pairing,
    total_measure,
    vertex_m,
    vertex_n,
)


def main():
    d = 2
    print(f"=== Geometry in dimension d = {d} ===\n")

    print("Pairing table <m_i, n_j> (diagonal -(d+1), off-diagonal +1):")
    table = np.array(
        [
            [pairing(vertex_m(d, i), vertex_n(d, j)) for j in range(d + 2)]
            for i in range(d + 2)
        ]
    )
    print(table, "\n")

    print(f"Total measure of A: {total_measure('A', d)}  (= (d+2)^(d+1)/d!)")
    print(f"Total measure of B: {total_measure('B', d)}  (= (d+2)/(d+1)!)\n")

    G = group_elements(d)
    print(f"Symmetry group order: {len(G)}  (= 2 * (d+2)!)\n")

    p = BaryPoint.repaired("B", [0.0, 0.2, 0.3, 0.5])
    cls = classify(p)
    print(f"Classification of {p.weights}:")
    for face, interior in cls.members:
        tag = "interior" if interior else "boundary"
        print(f"  {face.kind}_{face.i}: {tag}")
    print()

    print("Chart duality identity <s,t> = <p(s) - m_j, q(t)> (spot check):")
    i, j = 0, 1
    cp = chart("p", j, i, d)
    cq = chart("q", i, j, d)
    S = sample_sub_simplex(cp, i, 5, seed=0)
    T = sample_reference(cq, 5, seed=1)
    for s, t in zip(S, T):
        print(f"  residual = {chart_pair_residual(i, j, s, t, d):.3e}")


if __name__ == "__main__":
    main()
