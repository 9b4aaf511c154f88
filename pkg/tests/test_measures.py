import numpy as np
import pytest

from tropma.geometry import BaryPoint, total_measure
from tropma.measures import (
    AtomicMeasure,
    LebesgueMeasure,
    bl_distance,
    is_symmetric_measure,
    lebesgue_on_B,
    measure_from_json,
    symmetrize,
)


def vertex_measure(d, weight=None):
    w = total_measure("A", d) / (d + 2) if weight is None else weight
    atoms = tuple(
        (BaryPoint.repaired("B", np.eye(d + 2)[i]), w) for i in range(d + 2)
    )
    return AtomicMeasure("B", atoms)


class TestAtomicMeasure:
    def test_merge_of_duplicate_atoms(self):
        p = BaryPoint.repaired("B", np.eye(4)[0])
        q = BaryPoint.repaired("B", np.eye(4)[0] + 1e-12)
        m = AtomicMeasure("B", ((p, 1.0), (q, 2.0)))
        assert len(m.atoms) == 1
        assert m.total_mass() == pytest.approx(3.0)

    def test_rejects_negative_weight(self):
        p = BaryPoint.repaired("B", np.eye(4)[0])
        with pytest.raises(ValueError):
            AtomicMeasure("B", ((p, -1.0),))

    def test_weight_at_and_scaled(self):
        m = vertex_measure(2)
        p = BaryPoint.repaired("B", np.eye(4)[1])
        assert m.weight_at(p) == pytest.approx(8.0)
        assert m.scaled(0.5).total_mass() == pytest.approx(16.0)

    def test_json_round_trip(self):
        m = vertex_measure(2)
        m2 = measure_from_json(m.to_json())
        assert isinstance(m2, AtomicMeasure)
        assert m.same_measure(m2)

    def test_csv_has_row_per_atom(self):
        m = vertex_measure(1)
        lines = m.to_csv().strip().splitlines()
        assert len(lines) == 1 + 3


class TestSymmetrize:
    def test_symmetrized_measure_is_symmetric(self):
        p = BaryPoint.repaired("B", [0.0, 0.2, 0.3, 0.5])
        m = AtomicMeasure("B", ((p, 24.0),))
        s = symmetrize(m)
        assert is_symmetric_measure(s)
        assert s.total_mass() == pytest.approx(24.0)
        assert len(s.atoms) == 24  # full orbit of a generic boundary point

    def test_vertex_measure_already_symmetric(self):
        assert is_symmetric_measure(vertex_measure(2))

    def test_asymmetric_detected(self):
        p = BaryPoint.repaired("B", [0.0, 0.2, 0.3, 0.5])
        assert not is_symmetric_measure(AtomicMeasure("B", ((p, 1.0),)))


class TestLebesgue:
    @pytest.mark.parametrize("d", (1, 2))
    def test_total_mass_matches_side_total(self, d):
        density = np.ones(d + 2)
        lm = LebesgueMeasure("B", density)
        assert lm.total_mass() == pytest.approx(total_measure("B", d))

    def test_to_atoms_preserves_mass(self):
        lm = LebesgueMeasure("B", np.ones(4))
        atoms = lm.to_atoms(64, seed=1)
        assert atoms.total_mass() == pytest.approx(lm.total_mass(), abs=1e-9)

    def test_json_round_trip(self):
        lm = LebesgueMeasure("B", [1.0, 2.0, 3.0, 4.0])
        lm2 = measure_from_json(lm.to_json())
        assert isinstance(lm2, LebesgueMeasure)
        assert np.allclose(lm2.density, lm.density)

    @pytest.mark.parametrize("d", (1, 2))
    def test_lebesgue_on_B_normalized_to_A_total(self, d):
        m = lebesgue_on_B(d, 16, seed=0)
        assert m.total_mass() == pytest.approx(total_measure("A", d), abs=1e-9)
        assert is_symmetric_measure(m)


class TestBlDistance:
    def test_zero_on_identical(self):
        m = vertex_measure(2)
        assert bl_distance(m, m).value == pytest.approx(0.0, abs=1e-12)

    def test_symmetry_and_positivity(self):
        m1 = vertex_measure(2)
        m2 = vertex_measure(2, weight=7.5)
        d12 = bl_distance(m1, m2).value
        d21 = bl_distance(m2, m1).value
        assert d12 == pytest.approx(d21, abs=1e-12)
        assert d12 > 0

    def test_scales_with_mass_gap(self):
        m1 = vertex_measure(2)
        near = vertex_measure(2, weight=8.0 + 1e-3)
        far = vertex_measure(2, weight=9.0)
        assert bl_distance(m1, near).value < bl_distance(m1, far).value

    def test_small_for_nearby_atoms(self):
        p = BaryPoint.repaired("B", [0.0, 0.3, 0.3, 0.4])
        q = BaryPoint.repaired("B", [0.0, 0.3 + 1e-4, 0.3 - 1e-4, 0.4])
        m1 = AtomicMeasure("B", ((p, 1.0),))
        m2 = AtomicMeasure("B", ((q, 1.0),))
        assert bl_distance(m1, m2).value < 1e-3
