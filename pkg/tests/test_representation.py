"""
Unit tests for representations, Hom/Ext and the canonical resolutions.
"""

import unittest

import numpy as np

from qml.field_matrix import DimensionMismatch, FieldSpec, Matrix, identity, zeros
from qml.quiver_core import Arrow, DimVector, GroupElement, Quiver, StabilityParam
from qml.representation import (
    Homomorphism,
    Representation,
    RepresentationError,
    canonical_injective_resolution,
    canonical_phi,
    canonical_projective_resolution,
    canonical_psi,
    direct_sum,
    ext_dim,
    ext_dim_via_resolution,
    framed_phi,
    framed_psi,
    hom_basis,
    hom_dim,
    injective,
    injective_sum,
    is_rigid,
    projective,
    projective_sum,
    random_representation,
    simple,
    tensor_by_space,
    verify_hom_ext,
    verify_resolution_exact,
)

F2 = FieldSpec(2)
F3 = FieldSpec(3)
Q = FieldSpec(None)


def subspace_rep(field, columns):
    """Three lines in k^2 given by their spanning vectors."""
    quiver = Quiver.subspace(len(columns))
    dim = DimVector(quiver.vertices, [1] * len(columns) + [2])
    maps = {f"a{k + 1}": Matrix(field, [[c[0]], [c[1]]]) for k, c in enumerate(columns)}
    return Representation(quiver, field, dim, maps)


class TestRepresentation(unittest.TestCase):
    """Test cases for the Representation class."""

    def setUp(self):
        self.quiver = Quiver.linear(2)
        self.dim = DimVector(self.quiver.vertices, [1, 2])

    def test_missing_and_unknown_arrows(self):
        with self.assertRaises(RepresentationError):
            Representation(self.quiver, F2, self.dim, {})
        with self.assertRaises(RepresentationError):
            Representation(self.quiver, F2, self.dim, {"a1": zeros(F2, 2, 1), "b": zeros(F2, 1, 1)})

    def test_wrong_shape(self):
        with self.assertRaises(DimensionMismatch):
            Representation(self.quiver, F2, self.dim, {"a1": zeros(F2, 1, 2)})

    def test_wrong_field(self):
        with self.assertRaises(RepresentationError):
            Representation(self.quiver, F2, self.dim, {"a1": zeros(F3, 2, 1)})

    def test_dict_round_trip(self):
        rep = Representation(self.quiver, F3, self.dim, {"a1": Matrix(F3, [[1], [2]])})
        again = Representation.from_dict(self.quiver, rep.to_dict())
        self.assertEqual(again, rep)
        self.assertEqual(rep.to_dict()["field"], "F3")

    def test_path_matrix(self):
        quiver = Quiver.linear(3)
        dim = DimVector(quiver.vertices, [1, 1, 1])
        rep = Representation(quiver, F3, dim, {"a1": Matrix(F3, [[2]]), "a2": Matrix(F3, [[2]])})
        path = quiver.paths("1", "3")[0]
        self.assertEqual(rep.path_matrix(path).entries(), [[1]])
        self.assertEqual(rep.path_matrix(quiver.paths("2", "2")[0]), identity(F3, 1))

    def test_group_action(self):
        rep = Representation(self.quiver, F3, self.dim, {"a1": Matrix(F3, [[1], [0]])})
        g = GroupElement(F3, {"1": Matrix(F3, [[2]]), "2": Matrix(F3, [[0, 1], [1, 0]])})
        moved = rep.act(g)
        # g_2 M g_1^{-1} = swap(e1) * 2
        self.assertEqual(moved.map("a1").entries(), [[0], [2]])
        self.assertEqual(moved.act(g.inverse()), rep)


class TestStandardModules(unittest.TestCase):
    """Test cases for S(i), P(i), I(i) and their sums."""

    def setUp(self):
        self.quiver = Quiver.linear(3)

    def test_projective_dims(self):
        self.assertEqual(projective(self.quiver, F2, "1").dim.values_tuple, (1, 1, 1))
        self.assertEqual(projective(self.quiver, F2, "2").dim.values_tuple, (0, 1, 1))
        self.assertEqual(projective(self.quiver, F2, "3").dim.values_tuple, (0, 0, 1))

    def test_injective_dims(self):
        self.assertEqual(injective(self.quiver, F2, "3").dim.values_tuple, (1, 1, 1))
        self.assertEqual(injective(self.quiver, F2, "1").dim.values_tuple, (1, 0, 0))

    def test_projective_maps_are_identity_on_paths(self):
        p1 = projective(Quiver.linear(2), F2, "1")
        self.assertEqual(p1.map("a1").entries(), [[1]])
        i2 = injective(Quiver.linear(2), F2, "2")
        self.assertEqual(i2.map("a1").entries(), [[1]])

    def test_sum_labels(self):
        beta = DimVector(self.quiver.vertices, [2, 0, 1])
        p_beta = projective_sum(self.quiver, F2, beta)
        self.assertEqual(p_beta.dim.values_tuple, (2, 2, 3))
        self.assertEqual([str(lb) for lb in p_beta.labels["1"]], ["e_1#0", "e_1#1"])
        i_beta = injective_sum(self.quiver, F2, beta)
        self.assertEqual(i_beta.dim.values_tuple, (3, 1, 1))
        self.assertTrue(all(lb.dual for lb in i_beta.labels["1"]))

    def test_simple(self):
        s2 = simple(self.quiver, F2, "2")
        self.assertEqual(s2.dim.values_tuple, (0, 1, 0))
        self.assertTrue(all(m.is_zero() for m in s2.maps.values()))

    def test_direct_sum_and_tensor(self):
        p = projective(self.quiver, F2, "2")
        total = direct_sum([p, simple(self.quiver, F2, "1")])
        self.assertEqual(total.dim.values_tuple, (1, 1, 1))
        self.assertEqual(tensor_by_space(p, 3).dim.values_tuple, (0, 3, 3))
        self.assertEqual(tensor_by_space(p, 0).total_dim(), 0)
        with self.assertRaises(RepresentationError):
            direct_sum([])


class TestHomExt(unittest.TestCase):
    """Test cases for Hom and Ext^1."""

    def setUp(self):
        self.quiver = Quiver.linear(2)
        self.s1 = simple(self.quiver, F2, "1")
        self.s2 = simple(self.quiver, F2, "2")

    def test_simples(self):
        self.assertEqual(hom_dim(self.s1, self.s2), 0)
        self.assertEqual(ext_dim(self.s1, self.s2), 1)
        self.assertEqual(ext_dim(self.s2, self.s1), 0)
        self.assertEqual(ext_dim_via_resolution(self.s1, self.s2), 1)

    def test_hom_from_projective(self):
        rng = np.random.default_rng(7)
        m = random_representation(Quiver.linear(3), F3, DimVector(("1", "2", "3"), [2, 1, 2]), rng)
        p1 = projective(Quiver.linear(3), F3, "1")
        self.assertEqual(hom_dim(p1, m), 2)

    def test_hom_basis_elements_are_homomorphisms(self):
        p1 = projective(self.quiver, F3, "1")
        basis = hom_basis(p1, p1)
        self.assertEqual(len(basis), 1)
        self.assertTrue(all(f.is_valid() for f in basis))

    def test_rigidity(self):
        self.assertTrue(is_rigid(projective(self.quiver, F2, "1")))
        kronecker = Quiver(["1", "2"], [Arrow("a", "1", "2"), Arrow("b", "1", "2")])
        dim = DimVector(kronecker.vertices, [1, 1])
        line = Representation(kronecker, F2, dim, {"a": Matrix(F2, [[1]]), "b": Matrix(F2, [[0]])})
        self.assertFalse(is_rigid(line))

    def test_verify_hom_ext(self):
        report = verify_hom_ext(Quiver.subspace(2), [F2, F3, Q], samples=6, rng=np.random.default_rng(1))
        self.assertTrue(report.passed, report.failures)
        self.assertEqual(report.checked, 6)

    def test_verify_hom_ext_two_hundred_pairs(self):
        for quiver in (Quiver.subspace(3), Quiver.linear(3)):
            report = verify_hom_ext(quiver, [F2, F3], samples=200, rng=np.random.default_rng(7))
            self.assertTrue(report.passed, report.failures)
            self.assertEqual(report.checked, 200)


class TestResolutions(unittest.TestCase):
    """Test cases for canonical resolutions and the framed maps."""

    def test_resolutions_exact(self):
        rng = np.random.default_rng(11)
        quiver = Quiver.subspace(3)
        for field in (F2, F3, Q):
            m = random_representation(quiver, field, DimVector(quiver.vertices, [1, 2, 1, 2]), rng)
            self.assertEqual(verify_resolution_exact(canonical_projective_resolution(m)), [])
            self.assertEqual(verify_resolution_exact(canonical_injective_resolution(m)), [])

    def test_resolution_of_zero_arrow_quiver(self):
        quiver = Quiver(["x"], [])
        m = Representation(quiver, F2, DimVector(["x"], [2]), {})
        resolution = canonical_projective_resolution(m)
        self.assertEqual(resolution.first.total_dim(), 0)
        self.assertEqual(verify_resolution_exact(resolution), [])

    def test_canonical_maps(self):
        m = subspace_rep(F2, [(1, 0), (1, 0), (0, 1)])
        _, phi = canonical_phi(m)
        _, psi = canonical_psi(m)
        self.assertTrue(phi.is_valid() and phi.is_surjective())
        self.assertTrue(psi.is_valid() and psi.is_injective())

    def test_canonical_maps_restricted_to_theta_sides(self):
        m = subspace_rep(F2, [(1, 0), (0, 1), (1, 1)])
        theta = StabilityParam(m.quiver.vertices, [2, 2, 2, -3])
        p_plus, phi = canonical_phi(m, theta)
        self.assertEqual(p_plus.dim.values_tuple, (1, 1, 1, 3))
        self.assertTrue(phi.is_surjective())
        i_minus, psi = canonical_psi(m, theta)
        self.assertEqual(i_minus.dim.values_tuple, (2, 2, 2, 2))
        self.assertTrue(psi.is_injective())

    def test_framed_maps_check_shapes(self):
        m = subspace_rep(F2, [(1, 0), (0, 1)])
        bad = {"q1": zeros(F2, 2, 1), "q2": zeros(F2, 1, 1), "s": zeros(F2, 2, 0)}
        with self.assertRaises(DimensionMismatch):
            framed_phi(m, bad)
        b = {"q1": zeros(F2, 0, 1), "q2": zeros(F2, 0, 1), "s": identity(F2, 2)}
        i_beta, psi = framed_psi(m, b)
        self.assertIsInstance(psi, Homomorphism)
        self.assertTrue(psi.is_valid())
        self.assertEqual(i_beta.dim.values_tuple, (2, 2, 2))


if __name__ == '__main__':
    unittest.main()
