"""
Unit tests for the enumeration budget and verification reports.
"""

import unittest

from qml.harness import (
    BUDGET_ENV_VAR,
    DEFAULT_BUDGET,
    MAX_RECORDED_FAILURES,
    Budget,
    BudgetExceeded,
    VerificationReport,
    derive_rng,
    parallel_map,
    resolve_budget,
)


class TestBudget(unittest.TestCase):
    """Test cases for Budget."""

    def test_default(self):
        self.assertEqual(Budget().limit, DEFAULT_BUDGET)
        self.assertEqual(Budget.from_env({}).limit, DEFAULT_BUDGET)
        self.assertEqual(Budget.from_env({BUDGET_ENV_VAR: "  "}).limit, DEFAULT_BUDGET)

    def test_from_env(self):
        self.assertEqual(Budget.from_env({BUDGET_ENV_VAR: "500"}).limit, 500)

    def test_invalid_env(self):
        with self.assertRaises(ValueError):
            Budget.from_env({BUDGET_ENV_VAR: "lots"})
        with self.assertRaises(ValueError):
            Budget.from_env({BUDGET_ENV_VAR: "0"})

    def test_non_positive(self):
        with self.assertRaises(ValueError):
            Budget(0)
        with self.assertRaises(ValueError):
            Budget(-3)

    def test_ensure(self):
        budget = Budget(10)
        self.assertEqual(budget.ensure(10, "points"), 10)
        with self.assertRaises(BudgetExceeded) as context:
            budget.ensure(11, "points")
        error = context.exception
        self.assertEqual((error.what, error.count, error.limit), ("points", 11, 10))
        self.assertIn("points", str(error))

    def test_resolve_budget(self):
        explicit = Budget(7)
        self.assertIs(resolve_budget(explicit), explicit)
        self.assertIsInstance(resolve_budget(None), Budget)


class TestVerificationReport(unittest.TestCase):
    """Test cases for VerificationReport."""

    def test_record(self):
        report = VerificationReport("demo")
        self.assertTrue(report.record(True, case=1))
        self.assertFalse(report.record(False, case=2))
        self.assertEqual(report.checked, 2)
        self.assertEqual(report.failure_count, 1)
        self.assertFalse(report.passed)
        self.assertEqual(report.failures, [{"case": 2}])

    def test_failures_are_capped(self):
        report = VerificationReport("demo")
        for k in range(MAX_RECORDED_FAILURES + 5):
            report.record(False, case=k)
        self.assertEqual(report.failure_count, MAX_RECORDED_FAILURES + 5)
        self.assertEqual(len(report.failures), MAX_RECORDED_FAILURES)

    def test_merge(self):
        total = VerificationReport("suite")
        part = VerificationReport("part")
        part.record(False, case="x")
        part.details["points"] = 3
        total.merge(part, prefix="renamed")
        self.assertEqual(total.checked, 1)
        self.assertEqual(total.failures, [{"part": "renamed", "case": "x"}])
        self.assertEqual(total.details, {"renamed": {"points": 3}})

    def test_to_dict(self):
        report = VerificationReport("demo")
        report.record(True)
        self.assertEqual(report.to_dict(), {
            "name": "demo",
            "checked": 1,
            "passed": True,
            "failure_count": 0,
            "failures": [],
            "details": {},
        })


class TestHelpers(unittest.TestCase):
    """Test cases for derive_rng and parallel_map."""

    def test_derive_rng_is_deterministic(self):
        a = derive_rng(3, "stability").integers(0, 1000, size=5).tolist()
        b = derive_rng(3, "stability").integers(0, 1000, size=5).tolist()
        self.assertEqual(a, b)

    def test_derive_rng_depends_on_labels(self):
        a = derive_rng(3, "stability").integers(0, 10 ** 9, size=4).tolist()
        b = derive_rng(3, "framing").integers(0, 10 ** 9, size=4).tolist()
        self.assertNotEqual(a, b)

    def test_parallel_map_preserves_order(self):
        items = list(range(20))
        self.assertEqual(parallel_map(lambda x: x * x, items, workers=4), [x * x for x in items])
        self.assertEqual(parallel_map(str, items), [str(x) for x in items])
        self.assertEqual(parallel_map(str, [], workers=3), [])


if __name__ == '__main__':
    unittest.main()
