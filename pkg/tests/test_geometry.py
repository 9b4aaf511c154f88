import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropma.geometry import (
    BaryPoint,
    FaceId,
    GroupElement,
    act,
    bary_to_vector,
    classify,
    face_measure,
    group_elements,
    in_star,
    orbit,
    pairing,
    pairing_weights,
    sample_face_weights,
    total_measure,
    vector_to_bary,
    vertex_m,
    vertex_n,
)

DIMS = (1, 2, 3)


class TestPairingTable:
    @pytest.mark.parametrize("d", DIMS)
    def test_vertex_pairing_values(self, d):
        for i in range(d + 2):
            for j in range(d + 2):
                want = -(d + 1) if i == j else 1.0
                got = pairing(vertex_m(d, i), vertex_n(d, j))
                assert got == pytest.approx(want, abs=1e-12)

    @pytest.mark.parametrize("d", DIMS)
    def test_weights_formula_matches_ambient(self, d):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = rng.dirichlet(np.ones(d + 2))
            a[rng.integers(d + 2)] = 0.0
            a /= a.sum()
            b = rng.dirichlet(np.ones(d + 2))
            b[rng.integers(d + 2)] = 0.0
            b /= b.sum()
            pa = BaryPoint.repaired("A", a)
            pb = BaryPoint.repaired("B", b)
            amb = pairing(pa.vector(), pb.vector())
            wt = pairing_weights(pa.weights, pb.weights)
            assert amb == pytest.approx(float(wt), abs=1e-10)


class TestTotalMeasure:
    @pytest.mark.parametrize("d", DIMS)
    def test_totals(self, d):
        assert total_measure("A", d) == pytest.approx(
            (d + 2) ** (d + 1) / math.factorial(d)
        )
        assert total_measure("B", d) == pytest.approx(
            (d + 2) / math.factorial(d + 1)
        )

    @pytest.mark.parametrize("d", DIMS)
    @pytest.mark.parametrize("side,kind", [("A", "sigma"), ("B", "tau")])
    def test_faces_split_total_equally(self, d, side, kind):
        masses = [face_measure(FaceId(kind, i), d) for i in range(d + 2)]
        assert sum(masses) == pytest.approx(total_measure(side, d))
        assert max(masses) == pytest.approx(min(masses))


class TestBaryVector:
    @pytest.mark.parametrize("d", DIMS)
    @pytest.mark.parametrize("side", ["A", "B"])
    def test_round_trip(self, d, side):
        rng = np.random.default_rng(1)
        for _ in range(20):
            w = rng.dirichlet(np.ones(d + 2))
            w[rng.integers(d + 2)] = 0.0
            p = BaryPoint.repaired(side, w)
            back = vector_to_bary(bary_to_vector(p), side)
            assert p.same_point(back, tol=1e-12)

    def test_rejects_interior_points(self):
        with pytest.raises(ValueError):
            BaryPoint("A", np.full(4, 0.25))

    def test_repaired_rejects_degenerate(self):
        with pytest.raises(ValueError):
            BaryPoint.repaired("B", [0.25, 0.25, 0.25, 0.25])


class TestGroupAction:
    @pytest.mark.parametrize("d", (1, 2))
    def test_group_order(self, d):
        assert len(group_elements(d)) == math.factorial(d + 2)

    @pytest.mark.parametrize("d", (1, 2))
    def test_pairing_invariance(self, d):
        rng = np.random.default_rng(2)
        for _ in range(10):
            a = sample_face_weights(FaceId("sigma", 0), d, 1, seed=rng.integers(1e6))[0]
            b = sample_face_weights(FaceId("tau", 1), d, 1, seed=rng.integers(1e6))[0]
            pa, pb = BaryPoint.repaired("A", a), BaryPoint.repaired("B", b)
            base = pairing_weights(pa.weights, pb.weights)
            for g in group_elements(d):
                ga, gb = act(g, pa), act(g, pb)
                assert pairing_weights(ga.weights, gb.weights) == pytest.approx(
                    float(base), abs=1e-12
                )

    def test_orbit_sizes(self):
        d = 2
        vert = BaryPoint.repaired("B", np.eye(4)[0])
        assert len(orbit(vert)) == 4
        mid = BaryPoint.repaired("B", [0.0, 0.0, 0.5, 0.5])
        assert len(orbit(mid)) == 6
        bary = BaryPoint.repaired("B", [0.0, 1 / 3, 1 / 3, 1 / 3])
        assert len(orbit(bary)) == 4

    def test_compose_inverse(self):
        for g in group_elements(1):
            gi = g.inverse()
            assert g.compose(gi).perm == GroupElement.identity(3).perm


class TestClassify:
    def test_vertex_is_in_open_star_only(self):
        p = BaryPoint.repaired("B", np.eye(4)[2])
        cls = classify(p)
        assert cls.contains("T", 2, interior=True)
        assert cls.in_regular_locus
        assert not cls.contains("tau", 2)

    def test_face_barycenter(self):
        p = BaryPoint.repaired("B", [0.0, 1 / 3, 1 / 3, 1 / 3])
        cls = classify(p)
        assert cls.contains("tau", 0, interior=True)
        assert cls.in_regular_locus

    def test_edge_midpoint_is_singular(self):
        p = BaryPoint.repaired("B", [0.0, 0.0, 0.5, 0.5])
        cls = classify(p)
        assert not cls.in_regular_locus
        assert cls.contains("tau", 0, interior=False)
        assert cls.contains("tau", 1, interior=False)

    def test_in_star(self):
        p = BaryPoint.repaired("B", [0.6, 0.4, 0.0, 0.0])
        assert in_star(p, 0) and in_star(p, 1)


@settings(max_examples=60, deadline=None)
@given(
    d=st.sampled_from(DIMS),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_face_samples_lie_on_face(d, seed):
    w = sample_face_weights(FaceId("tau", 0), d, 4, seed=seed)
    assert w.shape == (4, d + 2)
    assert np.all(np.abs(w[:, 0]) < 1e-12)
    assert np.allclose(w.sum(axis=1), 1.0)
    assert np.all(w >= 0)
