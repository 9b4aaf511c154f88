import numpy as np
import pytest

from tropma.cconvex import (
    DiscreteFn,
    EdgeInterpolant,
    MaxAffineFn,
    act_fn,
    c_subgradient,
    chart_restrict,
    ctransform_discrete,
    ctransform_envelope,
    ctransform_exact,
    double_transform,
    is_symmetric,
    subdivision_candidates,
    symmetrize_fn,
    symmetry_defect,
)
from tropma.geometry import (
    BaryPoint,
    act,
    group_elements,
    pairing_weights,
)
from tropma.ma_operator import dualvertmass_fn, singmass_fn, vertmass_fn


def random_boundary_weights(d, rng):
    w = rng.dirichlet(np.ones(d + 2))
    w[rng.integers(d + 2)] = 0.0
    return w / w.sum()


def random_points(side, d, count, rng):
    return [
        BaryPoint.repaired(side, random_boundary_weights(d, rng))
        for _ in range(count)
    ]


def random_fn(side, d, K, rng):
    anchor_side = "A" if side == "B" else "B"
    gens = tuple(
        (
            BaryPoint.repaired(anchor_side, random_boundary_weights(d, rng)),
            float(rng.uniform(-0.5, 0.5)),
        )
        for _ in range(K)
    )
    return MaxAffineFn(side, gens)


def random_discrete(side, d, K, rng):
    pts = random_points(side, d, K, rng)
    vals = rng.uniform(-0.5, 0.5, size=K)
    return DiscreteFn.merged(side, pts, vals)


# (function count, queries per function) per dimension; every algebra
# property below is exercised on at least 10^3 (instance, point) checks.
BUDGET = {1: (120, 10), 2: (25, 45)}


class TestTransformAlgebra:
    @pytest.mark.parametrize("d", (1, 2))
    def test_idempotence_triple_equals_single(self, d):
        nf, nq = BUDGET[d]
        nf = max(6, nf // 5)  # exact transforms are the expensive part
        rng = np.random.default_rng(10 + d)
        for _ in range(nf):
            f = random_fn("B", d, int(rng.integers(2, 6)), rng)
            T1 = ctransform_exact(f)  # on A
            T2 = ctransform_exact(T1)  # on B
            for q in random_points("A", d, nq, rng):
                single = T1.value(q)
                triple = ctransform_envelope(T2, q)
                assert triple == pytest.approx(single, abs=1e-9)

    @pytest.mark.parametrize("d", (1, 2))
    def test_contractivity(self, d):
        nf, nq = BUDGET[d]
        rng = np.random.default_rng(20 + d)
        for _ in range(nf):
            K = int(rng.integers(2, 6))
            pts = random_points("A", d, K, rng)
            u = DiscreteFn.merged("A", pts, rng.uniform(-0.5, 0.5, size=K))
            w = DiscreteFn.merged("A", pts, rng.uniform(-0.5, 0.5, size=K))
            bound = float(np.max(np.abs(np.array(u.values) - np.array(w.values))))
            fu, fw = ctransform_discrete(u), ctransform_discrete(w)
            for q in random_points("B", d, nq, rng):
                assert abs(fu.value(q) - fw.value(q)) <= bound + 1e-9

    @pytest.mark.parametrize("d", (1, 2))
    def test_shift_rule(self, d):
        nf, nq = BUDGET[d]
        rng = np.random.default_rng(30 + d)
        for _ in range(nf):
            u = random_discrete("A", d, int(rng.integers(2, 6)), rng)
            a = float(rng.uniform(-1, 1))
            shifted = DiscreteFn(
                u.side, u.support, tuple(v + a for v in u.values)
            )
            fu = ctransform_discrete(u)
            fs = ctransform_discrete(shifted)
            for q in random_points("B", d, nq, rng):
                assert fs.value(q) == pytest.approx(fu.value(q) - a, abs=1e-12)

    @pytest.mark.parametrize("d", (1, 2))
    def test_order_reversal(self, d):
        nf, nq = BUDGET[d]
        rng = np.random.default_rng(40 + d)
        for _ in range(nf):
            u = random_discrete("A", d, int(rng.integers(2, 6)), rng)
            bumps = rng.uniform(0, 1, size=len(u.values))
            w = DiscreteFn(
                u.side, u.support, tuple(v + b for v, b in zip(u.values, bumps))
            )
            fu, fw = ctransform_discrete(u), ctransform_discrete(w)
            for q in random_points("B", d, nq, rng):
                assert fw.value(q) <= fu.value(q) + 1e-12

    @pytest.mark.parametrize("d", (1, 2))
    def test_group_equivariance(self, d):
        nf, nq = BUDGET[d]
        rng = np.random.default_rng(50 + d)
        G = group_elements(d)
        for _ in range(max(4, nf // 6)):
            f = random_fn("B", d, int(rng.integers(2, 6)), rng)
            g = G[rng.integers(len(G))]
            gf = act_fn(g, f)
            for q in random_points("B", d, nq, rng):
                assert gf.value(act(g, q)) == pytest.approx(f.value(q), abs=1e-12)
            # transform of the moved function is the moved transform
            Tf = ctransform_exact(f)
            Tgf = ctransform_exact(gf)
            for q in random_points("A", d, nq, rng):
                assert Tgf.value(act(g, q)) == pytest.approx(
                    Tf.value(q), abs=1e-9
                )

    @pytest.mark.parametrize("d", (1, 2))
    def test_pairing_lipschitz_bound(self, d):
        # An envelope with anchors (m_a) satisfies
        # |f(n1) - f(n2)| <= max_a |<m_a, n1> - <m_a, n2>| exactly.
        nf, nq = BUDGET[d]
        rng = np.random.default_rng(60 + d)
        for _ in range(nf):
            f = random_fn("B", d, int(rng.integers(2, 6)), rng)
            anchors = [a for a, _ in f.generators]
            for _ in range(nq):
                n1, n2 = random_points("B", d, 2, rng)
                bound = max(
                    abs(
                        pairing_weights(a.weights, n1.weights)
                        - pairing_weights(a.weights, n2.weights)
                    )
                    for a in anchors
                )
                assert abs(f.value(n1) - f.value(n2)) <= bound + 1e-12

    @pytest.mark.parametrize("d", (1, 2))
    def test_double_transform_fixes_transforms(self, d):
        # psi^{cc} = psi on B whenever psi is itself a c-transform.
        nf, nq = BUDGET[d]
        nf = max(6, nf // 5)
        rng = np.random.default_rng(70 + d)
        for _ in range(nf):
            u = random_discrete("A", d, int(rng.integers(2, 6)), rng)
            psi = ctransform_discrete(u)  # c-convex by construction
            phi = ctransform_exact(psi)
            for q in random_points("B", d, nq, rng):
                assert ctransform_envelope(phi, q) == pytest.approx(
                    psi.value(q), abs=1e-9
                )

    def test_double_transform_grid_helper(self):
        d = 1
        rng = np.random.default_rng(3)
        u = random_discrete("A", d, 4, rng)
        psi = ctransform_discrete(u)
        grid = random_points("B", d, 25, rng)
        dd = double_transform(psi, grid)
        for p_, v in zip(dd.support, dd.values):
            assert v == pytest.approx(psi.value(p_), abs=1e-9)


class TestTransformBelowInput:
    @pytest.mark.parametrize("d", (1, 2))
    def test_double_transform_below_discrete_input(self, d):
        # u^{cc} <= u at the support points, with equality iff c-convex there.
        rng = np.random.default_rng(80 + d)
        for _ in range(30):
            u = random_discrete("A", d, int(rng.integers(2, 6)), rng)
            psi = ctransform_discrete(u)
            for p_, v in zip(u.support, u.values):
                assert ctransform_envelope(psi, p_) <= v + 1e-9


class TestSubdivisionCandidates:
    @pytest.mark.parametrize("d", (1, 2))
    def test_candidates_cover_all_vertices(self, d):
        f = vertmass_fn(d)
        cands = subdivision_candidates([f], "B", d)
        for i in range(d + 2):
            v = BaryPoint.repaired("B", np.eye(d + 2)[i])
            assert any(c.same_point(v) for c in cands)

    def test_candidates_include_interior_kinks(self):
        # the d=2 fixture whose measure charges the edge midpoints of B
        # must produce those midpoints as subdivision vertices
        f = singmass_fn()
        cands = subdivision_candidates([f], "B", 2)
        mid = BaryPoint.repaired("B", [0, 0, 0.5, 0.5])
        assert any(c.same_point(mid) for c in cands)

    @pytest.mark.parametrize("d", (1, 2))
    def test_envelope_value_matches_generators_at_candidates(self, d):
        rng = np.random.default_rng(5)
        f = random_fn("B", d, 4, rng)
        T = ctransform_exact(f)  # envelope on A
        for c in subdivision_candidates([T], "A", d)[:20]:
            assert T.value(c) == pytest.approx(
                max(
                    pairing_weights(a.weights, c.weights) - off
                    for a, off in T.generators
                ),
                abs=1e-9,
            )


class TestSubgradient:
    def test_vertex_active_for_constant_function(self):
        # psi == 1: at m with weights (0.5, 0.3, 0.2, 0) the transform's
        # active atom is the vertex with the smallest weight of m.
        d = 2
        psi = vertmass_fn(d)
        phi = ctransform_exact(psi)
        m = BaryPoint.repaired("A", [0.5, 0.3, 0.2, 0.0])
        active = c_subgradient(phi, m)
        assert len(active) == 1
        assert active[0].same_point(BaryPoint.repaired("B", np.eye(4)[3]))

    def test_face_interior_maps_into_star(self):
        # psi == 1 and n interior to tau_i: the active anchors lie in the
        # star of the A-side vertex m_i (every face but sigma_i).
        d = 2
        psi = vertmass_fn(d)
        rng = np.random.default_rng(9)
        for i in range(d + 2):
            w = rng.dirichlet(np.ones(d + 1))
            full = np.insert(w, i, 0.0)
            n = BaryPoint.repaired("B", full)
            for m in c_subgradient(psi, n):
                assert m.weights[i] == pytest.approx(1.0)  # the vertex m_i


class TestSymmetry:
    @pytest.mark.parametrize("d", (1, 2))
    def test_fixtures_are_symmetric(self, d):
        assert is_symmetric(vertmass_fn(d))
        if d == 2:
            assert is_symmetric(dualvertmass_fn())
            assert is_symmetric(singmass_fn())

    def test_single_generator_is_not_symmetric(self):
        f = MaxAffineFn("B", ((BaryPoint.repaired("A", np.eye(4)[0]), 0.0),))
        assert not is_symmetric(f)
        assert symmetry_defect(f) > 0.1

    def test_symmetrize_fixes_defect(self):
        f = MaxAffineFn("B", ((BaryPoint.repaired("A", np.eye(4)[0]), 0.0),))
        g = symmetrize_fn(f)
        assert is_symmetric(g)


class TestChartRestrict:
    @pytest.mark.parametrize("d", (1, 2))
    def test_convex_for_c_transforms(self, d):
        rng = np.random.default_rng(11 + d)
        for _ in range(10):
            u = random_discrete("A", d, int(rng.integers(2, 6)), rng)
            psi = ctransform_discrete(u)
            cf = chart_restrict(psi, 0, 1)
            assert cf.convexity_defect(count=200, seed=int(rng.integers(1e6))) < 1e-9

    def test_represents_fn_minus_linear(self):
        d = 2
        psi = dualvertmass_fn()
        cf = chart_restrict(psi, 0, 1)
        ch = cf.chart
        from tropma.geometry import vertex_m, vector_to_bary
        from tropma.charts import sample_reference

        mj = vertex_m(d, 1)
        for t in sample_reference(ch, 50, seed=4):
            n = ch.from_reference(t)
            nb = vector_to_bary(n, "B")
            want = psi.value(nb) - float(mj @ nb.vector())
            assert cf.value(t) == pytest.approx(want, abs=1e-9)


class TestEdgeInterpolant:
    def test_values_and_kinks(self):
        nodes = [BaryPoint.repaired("B", np.eye(3)[l]) for l in range(3)]
        mids = [
            BaryPoint.repaired("B", [0.0 if k == l else 0.5 for k in range(3)])
            for l in range(3)
        ]
        v = EdgeInterpolant("B", nodes + mids, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        assert v.value(nodes[0]) == pytest.approx(1.0)
        assert v.value(mids[0]) == pytest.approx(0.0)
        # halfway between vertex 0 and the midpoint of its adjacent edge
        q = BaryPoint.repaired("B", [0.75, 0.25, 0.0])
        assert v.value(q) == pytest.approx(0.5)

    def test_requires_corner_nodes(self):
        with pytest.raises(ValueError):
            EdgeInterpolant(
                "B",
                [BaryPoint.repaired("B", [0.0, 0.5, 0.5])],
                [1.0],
            )


class TestJsonRoundTrip:
    @pytest.mark.parametrize("d", (1, 2))
    def test_max_affine_fn(self, d):
        rng = np.random.default_rng(13)
        f = random_fn("B", d, 4, rng)
        g = MaxAffineFn.from_json(f.to_json())
        assert g.side == f.side
        for q in random_points("B", d, 10, rng):
            assert g.value(q) == pytest.approx(f.value(q), abs=0)

    def test_discrete_fn(self):
        rng = np.random.default_rng(14)
        u = random_discrete("A", 2, 4, rng)
        w = DiscreteFn.from_json(u.to_json())
        assert w.side == u.side
        assert np.allclose(w.values, u.values)
