"""
Unit tests for theta-stability checks.
"""

import unittest

import numpy as np

from qml.field_matrix import FieldSpec, InfiniteField, Matrix
from qml.harness import Budget, BudgetExceeded
from qml.quiver_core import DimVector, Quiver, StabilityParam, WrongQuiverShape
from qml.representation import Representation, projective, simple
from qml.stability import (
    StabilityError,
    StabilityKind,
    check_stability,
    count_reps,
    enumerate_reps,
    enumerate_subreps,
    subspace_quiver_criterion,
    subspace_theta,
    verify_canonical_maps,
    verify_stability_invariance,
    verify_subspace_criterion,
)

F2 = FieldSpec(2)
F3 = FieldSpec(3)


def lines(field, vectors):
    quiver = Quiver.subspace(len(vectors))
    dim = DimVector(quiver.vertices, [1] * len(vectors) + [2])
    maps = {f"a{k + 1}": Matrix(field, [[v[0]], [v[1]]]) for k, v in enumerate(vectors)}
    return Representation(quiver, field, dim, maps)


class TestCheckStability(unittest.TestCase):
    """Test cases for check_stability."""

    def setUp(self):
        self.quiver = Quiver.subspace(3)
        self.theta = StabilityParam(self.quiver.vertices, [2, 2, 2, -3])

    def test_three_distinct_lines_are_stable(self):
        verdict = check_stability(lines(F2, [(1, 0), (0, 1), (1, 1)]), self.theta)
        self.assertEqual(verdict.kind, StabilityKind.STABLE)
        self.assertTrue(verdict.is_stable and verdict.is_semistable)
        self.assertIsNone(verdict.witness)

    def test_repeated_line_is_unstable(self):
        verdict = check_stability(lines(F2, [(1, 0), (1, 0), (0, 1)]), self.theta)
        self.assertEqual(verdict.kind, StabilityKind.UNSTABLE)
        self.assertEqual(verdict.witness.dim.values_tuple, (1, 1, 0, 1))
        self.assertEqual(verdict.witness.theta_value, 1)
        self.assertEqual(verdict.to_dict()["verdict"], "unstable")

    def test_theta_nonzero(self):
        m = lines(F2, [(1, 0), (0, 1), (1, 1)])
        verdict = check_stability(m, StabilityParam(self.quiver.vertices, [1, 1, 1, 1]))
        self.assertEqual(verdict.kind, StabilityKind.THETA_NONZERO)
        self.assertFalse(verdict.is_semistable)

    def test_strictly_semistable(self):
        quiver = Quiver.subspace(4)
        theta = StabilityParam(quiver.vertices, [2, 2, 2, 2, -4])
        m = lines(F2, [(1, 0), (1, 0), (0, 1), (0, 1)])
        verdict = check_stability(m, theta)
        self.assertEqual(verdict.kind, StabilityKind.SEMISTABLE_NOT_STABLE)
        self.assertEqual(verdict.witness.theta_value, 0)

    def test_simple_is_stable_for_any_balanced_theta(self):
        s1 = simple(Quiver.linear(2), F2, "1")
        self.assertTrue(check_stability(s1, StabilityParam(("1", "2"), [0, 5])).is_stable)

    def test_projective_of_a2(self):
        # P(1) has the subrepresentation S(2)
        p1 = projective(Quiver.linear(2), F3, "1")
        self.assertEqual(check_stability(p1, StabilityParam(("1", "2"), [1, -1])).kind, StabilityKind.STABLE)
        self.assertEqual(check_stability(p1, StabilityParam(("1", "2"), [-1, 1])).kind, StabilityKind.UNSTABLE)
        self.assertEqual(check_stability(p1, StabilityParam(("1", "2"), [0, 0])).kind,
                         StabilityKind.SEMISTABLE_NOT_STABLE)

    def test_requires_finite_field(self):
        m = lines(FieldSpec(None), [(1, 0), (0, 1), (1, 1)])
        with self.assertRaises(InfiniteField):
            check_stability(m, self.theta)

    def test_budget(self):
        with self.assertRaises(BudgetExceeded):
            check_stability(lines(F2, [(1, 0), (0, 1), (1, 1)]), self.theta, Budget(3))

    def test_enumerate_subreps_includes_zero_and_whole(self):
        dims = [w.dim.values_tuple for w in enumerate_subreps(projective(Quiver.linear(2), F2, "1"))]
        self.assertIn((0, 0), dims)
        self.assertIn((1, 1), dims)


class TestSubspaceCriterion(unittest.TestCase):
    """Test cases for the closed-form subspace quiver criterion."""

    def test_agrees_on_examples(self):
        for vectors in ([(1, 0), (0, 1), (1, 1)], [(1, 0), (1, 0), (0, 1)], [(0, 0), (1, 0), (0, 1)]):
            m = lines(F2, vectors)
            expected = check_stability(m, subspace_theta(m.quiver, [1, 1, 1], 2)).kind
            self.assertEqual(subspace_quiver_criterion(m, [1, 1, 1]).kind, expected)

    def test_weights_mapping(self):
        m = lines(F3, [(1, 0), (0, 1), (1, 1)])
        verdict = subspace_quiver_criterion(m, {"q1": 1, "q2": 1, "q3": 1})
        self.assertTrue(verdict.is_stable)

    def test_subspace_theta(self):
        quiver = Quiver.subspace(3)
        self.assertEqual(subspace_theta(quiver, [1, 2, 1], 2).values_tuple, (2, 4, 2, -4))

    def test_wrong_shape(self):
        p1 = projective(Quiver.linear(3), F2, "1")
        with self.assertRaises(WrongQuiverShape):
            subspace_quiver_criterion(p1, [1, 1])

    def test_bad_weights(self):
        with self.assertRaises(StabilityError):
            subspace_quiver_criterion(lines(F2, [(1, 0), (0, 1), (1, 1)]), [1, 0, 1])


class TestVerification(unittest.TestCase):
    """Test cases for the exhaustive verification sweeps."""

    def setUp(self):
        self.quiver = Quiver.subspace(3)
        self.alpha = DimVector(self.quiver.vertices, [1, 1, 1, 2])
        self.theta = StabilityParam(self.quiver.vertices, [2, 2, 2, -3])

    def test_enumerate_reps(self):
        self.assertEqual(count_reps(self.quiver, self.alpha, F2), 64)
        reps = list(enumerate_reps(self.quiver, self.alpha, F2))
        self.assertEqual(len(reps), 64)
        self.assertEqual(len(set(reps)), 64)
        with self.assertRaises(BudgetExceeded):
            list(enumerate_reps(self.quiver, self.alpha, F2, Budget(63)))

    def test_enumeration_logs_progress(self):
        with self.assertLogs("qml.stability", level="DEBUG") as logs:
            verify_canonical_maps(self.quiver, self.alpha, self.theta, F2)
        self.assertTrue(any("Enumerating 64 points" in line for line in logs.output))
        self.assertTrue(any("6 of 64 points" in line for line in logs.output))

    def test_canonical_maps_on_semistable_locus(self):
        report = verify_canonical_maps(self.quiver, self.alpha, self.theta, F2)
        self.assertTrue(report.passed)
        self.assertEqual(report.details, {"points": 64, "semistable": 6, "stable": 6})

    def test_subspace_criterion_three_lines(self):
        report = verify_subspace_criterion(self.quiver, self.alpha, [1, 1, 1], F2, workers=2)
        self.assertTrue(report.passed, report.failures)
        self.assertEqual(report.details["verdicts"], {"stable": 6, "unstable": 58})

    def test_subspace_criterion_four_lines(self):
        quiver = Quiver.subspace(4)
        alpha = DimVector(quiver.vertices, [1, 1, 1, 1, 2])
        report = verify_subspace_criterion(quiver, alpha, [1, 1, 1, 1], F2)
        self.assertTrue(report.passed, report.failures)
        self.assertEqual(report.details["verdicts"].get("stable", 0), 0)
        self.assertEqual(report.details["verdicts"]["semistable_not_stable"], 54)

    def test_stability_invariance(self):
        report = verify_stability_invariance(self.quiver, self.alpha, self.theta, F2, samples=10,
                                             rng=np.random.default_rng(5))
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, 64 * 2 + 10)


if __name__ == '__main__':
    unittest.main()
