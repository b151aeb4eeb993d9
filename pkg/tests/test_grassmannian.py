"""
Unit tests for quiver Grassmannian enumeration and the framing-group action.
"""

import unittest

from qml.field_matrix import DimensionMismatch, FieldSpec, Matrix, standard_subspace, zeros
from qml.grassmannian import (
    GrassmannianError,
    SubspaceTuple,
    all_subspace_tuples,
    count_subspaces,
    enumerate_group,
    enumerate_subspaces,
    gaussian_binomial,
    general_linear_group,
    gl_order,
    grassmannian_count,
    grassmannian_points,
    orbit_of_point,
    partition_orbits,
    quotient_grassmannian_points,
    sigma_action,
)
from qml.harness import Budget, BudgetExceeded
from qml.quiver_core import DimVector, GroupElement, Quiver, StabilityParam, restricted_dim, theta_split
from qml.representation import Representation, injective_sum, projective, projective_sum, simple

F2 = FieldSpec(2)
F3 = FieldSpec(3)


class TestCounting(unittest.TestCase):
    """Test cases for closed-form counts."""

    def test_gaussian_binomial(self):
        self.assertEqual(gaussian_binomial(2, 1, 3), 4)
        self.assertEqual(gaussian_binomial(3, 1, 2), 7)
        self.assertEqual(gaussian_binomial(4, 2, 2), 35)
        self.assertEqual(gaussian_binomial(2, 3, 2), 0)

    def test_count_subspaces_and_gl_order(self):
        self.assertEqual(count_subspaces(2, 2), 5)
        self.assertEqual(gl_order(2, 2), 6)
        self.assertEqual(gl_order(0, 5), 1)

    def test_enumerate_subspaces_matches_count(self):
        for d, k, field in ((3, 1, F2), (3, 2, F2), (2, 1, F3), (4, 2, F2)):
            found = enumerate_subspaces(field, d, k)
            self.assertEqual(len(found), gaussian_binomial(d, k, field.size))
            self.assertEqual(len(set(found)), len(found))

    def test_general_linear_group(self):
        self.assertEqual(len(general_linear_group(F2, 2)), 6)
        self.assertEqual(len(general_linear_group(F3, 1)), 2)
        self.assertEqual(general_linear_group(F2, 0)[0].shape, (0, 0))

    def test_enumerate_group(self):
        dims = DimVector(["1", "2"], [2, 1])
        self.assertEqual(len(list(enumerate_group(F3, dims))), 48 * 2)

    def test_budget(self):
        with self.assertRaises(BudgetExceeded) as context:
            enumerate_subspaces(F2, 4, 2, Budget(10))
        self.assertEqual(context.exception.count, 35)
        with self.assertRaises(BudgetExceeded):
            list(enumerate_group(F2, DimVector(["1"], [2]), Budget(5)))


class TestGrassmannianPoints(unittest.TestCase):
    """Test cases for Gr_beta(M) on the 3-subspace quiver."""

    def setUp(self):
        self.quiver = Quiver.subspace(3)
        self.alpha = DimVector(self.quiver.vertices, [1, 1, 1, 2])
        self.theta = StabilityParam(self.quiver.vertices, [2, 2, 2, -3])
        plus, minus = theta_split(self.theta)
        self.beta_plus = restricted_dim(self.alpha, plus)
        self.beta_minus = restricted_dim(self.alpha, minus)
        self.i_minus = injective_sum(self.quiver, F2, self.beta_minus)
        self.p_plus = projective_sum(self.quiver, F2, self.beta_plus)

    def test_injective_side(self):
        points = list(grassmannian_points(self.i_minus, self.alpha))
        self.assertEqual(len(points), 27)
        self.assertTrue(all(p.is_subrepresentation() for p in points))
        self.assertTrue(all(p.dim == self.alpha for p in points))
        self.assertEqual(grassmannian_count(self.i_minus, self.alpha, recount=True), 27)

    def test_projective_side(self):
        points = list(quotient_grassmannian_points(self.p_plus, self.alpha))
        self.assertEqual(len(points), 7)
        self.assertEqual(points[0].dim.values_tuple, (0, 0, 0, 1))

    def test_dimension_too_large(self):
        big = DimVector(self.quiver.vertices, [3, 1, 1, 2])
        with self.assertRaises(GrassmannianError):
            list(grassmannian_points(self.i_minus, big))
        with self.assertRaises(GrassmannianError):
            quotient_grassmannian_points(self.p_plus, big)

    def test_budget_applies_to_candidates(self):
        with self.assertRaises(BudgetExceeded):
            list(grassmannian_points(self.i_minus, self.alpha, Budget(20)))

    def test_orbits_on_injective_side(self):
        points = list(grassmannian_points(self.i_minus, self.alpha))
        group = list(enumerate_group(F2, self.beta_minus))
        orbits = partition_orbits(points, group, sigma_action)
        # three distinct lines, three equal lines, and one orbit per position of the odd line out
        self.assertEqual(sorted(len(o) for o in orbits), [3, 6, 6, 6, 6])
        self.assertEqual(sum(len(o) for o in orbits), 27)

    def test_orbits_on_projective_side(self):
        points = list(quotient_grassmannian_points(self.p_plus, self.alpha))
        group = list(enumerate_group(F2, self.beta_plus))
        self.assertEqual(len(group), 1)
        self.assertEqual(len(partition_orbits(points, group, sigma_action)), 7)


class TestSigmaAction(unittest.TestCase):
    """Test cases for sigma(h) and SubspaceTuple."""

    def setUp(self):
        self.quiver = Quiver.linear(2)
        self.beta = DimVector(self.quiver.vertices, [2, 0])
        self.ambient = projective_sum(self.quiver, F3, self.beta)

    def test_identity_fixes_points(self):
        point = next(grassmannian_points(self.ambient, DimVector(self.quiver.vertices, [1, 1])))
        h = GroupElement.identity(F3, self.beta)
        self.assertEqual(sigma_action(h, point), point)

    def test_orbit_size(self):
        points = list(grassmannian_points(self.ambient, DimVector(self.quiver.vertices, [1, 1])))
        # U_1 is a line of k^2 and U_2 its image, so GL_2 permutes the four points transitively
        self.assertEqual(len(points), 4)
        orbit = orbit_of_point(points[0], list(enumerate_group(F3, self.beta)))
        self.assertEqual(len(orbit), 4)

    def test_sigma_checks_dimensions(self):
        point = next(grassmannian_points(self.ambient, DimVector(self.quiver.vertices, [0, 0])))
        wrong = GroupElement.identity(F3, DimVector(self.quiver.vertices, [1, 0]))
        with self.assertRaises(DimensionMismatch):
            sigma_action(wrong, point)

    def test_sigma_needs_labels(self):
        bare = simple(self.quiver, F3, "1")
        unlabeled = Representation(bare.quiver, bare.field, bare.dim, bare.maps)
        point = SubspaceTuple(unlabeled, {"1": zeros(F3, 0, 1), "2": zeros(F3, 0, 0)})
        with self.assertRaises(GrassmannianError):
            sigma_action(GroupElement.identity(F3, DimVector(self.quiver.vertices, [1, 0])), point)

    def test_subspace_tuple_checks_ambient(self):
        with self.assertRaises(DimensionMismatch):
            SubspaceTuple(self.ambient, {"1": standard_subspace(F3, 3, [0]), "2": zeros(F3, 0, 2)})

    def test_canonical_equality(self):
        a = SubspaceTuple(self.ambient, {"1": Matrix(F3, [[2, 0]]), "2": Matrix(F3, [[1, 1]])})
        b = SubspaceTuple(self.ambient, {"1": Matrix(F3, [[1, 0]]), "2": Matrix(F3, [[2, 2]])})
        self.assertEqual(a, b)
        self.assertEqual(hash(a), hash(b))


class TestAllSubrepresentations(unittest.TestCase):
    """Test cases for all_subspace_tuples."""

    def test_projective_of_a2(self):
        p1 = projective(Quiver.linear(2), F2, "1")
        dims = sorted(p.dim.values_tuple for p in all_subspace_tuples(p1))
        self.assertEqual(dims, [(0, 0), (0, 1), (1, 1)])

    def test_free_vertex(self):
        quiver = Quiver(["x"], [])
        plane = Representation(quiver, F2, DimVector(["x"], [2]), {})
        self.assertEqual(len(list(all_subspace_tuples(plane))), 5)


if __name__ == '__main__':
    unittest.main()
