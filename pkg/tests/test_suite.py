"""
Unit tests for the verification suite runner.
"""

import importlib
import inspect
import unittest

from qml import suite
from qml.field_matrix import FieldSpec
from qml.harness import Budget
from qml.quiver_core import DimVector, Quiver, StabilityParam
from qml.report_writer import render_report
from qml.suite import (
    DEFAULT_SAMPLES,
    EXIT_BUDGET,
    EXIT_OK,
    PRESETS,
    SUITE_CHECKS,
    SuiteConfig,
    SuiteError,
    UnknownPreset,
    preset,
    resolve_checks,
    run_suite,
    subspace_weights,
)

LIBRARY_MODULES = ("representation", "stability", "framing", "correspondence", "zelevinsky")


class TestPresets(unittest.TestCase):
    """Test cases for the named instances."""

    def test_presets_are_balanced(self):
        for name in PRESETS:
            cfg = preset(name)
            self.assertEqual(cfg.name, name)
            total = sum(cfg.theta[v] * cfg.alpha[v] for v in cfg.quiver.vertices)
            self.assertEqual(total, 0, name)

    def test_subspace_preset(self):
        cfg = preset("subspace-3-2")
        self.assertEqual(cfg.alpha.values_tuple, (1, 1, 1, 2))
        self.assertEqual(cfg.theta.values_tuple, (2, 2, 2, -3))
        self.assertEqual(cfg.field, FieldSpec(2))
        self.assertEqual(preset("subspace-3-2-f3").field, FieldSpec(3))

    def test_unknown_preset(self):
        with self.assertRaises(UnknownPreset) as context:
            preset("e8")
        self.assertIn("subspace-3-2", str(context.exception))


class TestSuiteConfig(unittest.TestCase):
    """Test cases for SuiteConfig validation and weights."""

    def setUp(self):
        self.quiver = Quiver.subspace(3)
        self.alpha = DimVector(self.quiver.vertices, [1, 1, 1, 2])

    def test_invalid_values(self):
        theta = StabilityParam(self.quiver.vertices, [2, 2, 2, -3])
        with self.assertRaises(SuiteError):
            SuiteConfig(self.quiver, self.alpha, theta, workers=0)
        with self.assertRaises(SuiteError):
            SuiteConfig(self.quiver, self.alpha, theta, samples=-1)
        with self.assertRaises(SuiteError):
            SuiteConfig(self.quiver, self.alpha, theta, n=0)

    def test_weights_read_from_theta(self):
        cfg = SuiteConfig(self.quiver, self.alpha, StabilityParam(self.quiver.vertices, [2, 4, 2, -4]))
        self.assertEqual(subspace_weights(cfg), (1, 2, 1))
        cfg = SuiteConfig(self.quiver, self.alpha, StabilityParam(self.quiver.vertices, [1, 1, 2, -2]))
        self.assertIsNone(subspace_weights(cfg))

    def test_to_dict(self):
        data = preset("a2-11").to_dict()
        self.assertEqual(data["field"], "F2")
        self.assertEqual(data["theta"], {"1": 1, "2": -1})


class TestResolveChecks(unittest.TestCase):
    """Test cases for resolve_checks."""

    def test_all(self):
        self.assertEqual(resolve_checks(["all"]), list(SUITE_CHECKS))
        self.assertEqual(resolve_checks([]), list(SUITE_CHECKS))

    def test_declared_order(self):
        self.assertEqual(resolve_checks(["zelevinsky", "hom-ext"]), ["hom-ext", "zelevinsky"])

    def test_unknown(self):
        with self.assertRaises(SuiteError):
            resolve_checks(["hom-ext", "moduli"])

    def test_every_sweep_is_reachable(self):
        for module_name in LIBRARY_MODULES:
            module = importlib.import_module(f"qml.{module_name}")
            for name, fn in inspect.getmembers(module, inspect.isfunction):
                if not name.startswith("verify_") or fn.__module__ != module.__name__:
                    continue
                if name == "verify_resolution_exact":
                    continue
                self.assertIs(getattr(suite, name, None), fn, name)


class TestRunSuite(unittest.TestCase):
    """Test cases for run_suite."""

    def setUp(self):
        self.cfg = preset("a2-11")
        self.cfg.samples = 5

    def test_small_instance_passes(self):
        code, report = run_suite(self.cfg, ["hom-ext", "canonical-maps", "correspondence", "zelevinsky"])
        self.assertEqual(code, EXIT_OK, report["failed"])
        self.assertTrue(report["passed"])
        self.assertEqual(report["default_N"], 3)
        self.assertEqual(set(report["checks"]), {"hom-ext", "canonical-maps", "correspondence", "zelevinsky"})

    def test_sampled_checks_at_default_size(self):
        cfg = preset("subspace-3-2")
        self.assertEqual(cfg.samples, DEFAULT_SAMPLES)
        code, report = run_suite(cfg, ["hom-ext", "hilbert-equivariance"])
        self.assertEqual(code, EXIT_OK, report["failed"])
        self.assertEqual(report["checks"]["hom-ext"]["checked"], DEFAULT_SAMPLES)
        self.assertEqual(report["checks"]["hom-ext"]["details"]["fields"], ["F2", "F3"])
        self.assertEqual(report["checks"]["hilbert-equivariance"]["status"], "passed")

    def test_reports_are_deterministic(self):
        first = render_report(run_suite(self.cfg, ["hom-ext", "stability-invariance"])[1])
        second = render_report(run_suite(self.cfg, ["hom-ext", "stability-invariance"])[1])
        self.assertEqual(first, second)

    def test_workers_do_not_change_report(self):
        names = ["hom-ext", "theta-pm", "saturation"]
        serial = render_report(run_suite(self.cfg, names)[1])
        self.cfg.workers = 3
        self.assertEqual(render_report(run_suite(self.cfg, names)[1]), serial)

    def test_budget_exceeded(self):
        self.cfg.budget = Budget(1)
        code, report = run_suite(self.cfg, ["canonical-maps"])
        self.assertEqual(code, EXIT_BUDGET)
        self.assertEqual(report["over_budget"], ["canonical-maps"])
        self.assertEqual(report["checks"]["canonical-maps"]["status"], "budget_exceeded")
        self.assertFalse(report["passed"])

    def test_skipped_checks(self):
        cfg = preset("an-linear-111")
        code, report = run_suite(cfg, ["subspace-criterion", "bipartite"])
        self.assertEqual(code, EXIT_OK)
        for name in ("subspace-criterion", "bipartite"):
            self.assertEqual(report["checks"][name]["status"], "skipped")
            self.assertTrue(report["checks"][name]["reason"])

    def test_zelevinsky_skipped_off_type_a(self):
        cfg = preset("subspace-3-2")
        _, report = run_suite(cfg, ["zelevinsky"])
        self.assertEqual(report["checks"]["zelevinsky"]["status"], "skipped")

    def test_timings(self):
        self.cfg.timings = True
        _, report = run_suite(self.cfg, ["canonical-maps"])
        self.assertIn("seconds", report["checks"]["canonical-maps"])


if __name__ == '__main__':
    unittest.main()
