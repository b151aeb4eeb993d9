"""
Unit tests for the JSON report writer module.
"""

import json
import os
import shutil
import tempfile
import unittest
from fractions import Fraction

import numpy as np

from qml.field_matrix import FieldSpec, Matrix, zeros
from qml.quiver_core import DimVector
from qml.report_writer import (
    SCHEMA_VERSION,
    ReportWriter,
    ReportWriterError,
    render_report,
    to_jsonable,
    write_report,
)


class TestToJsonable(unittest.TestCase):
    """Test cases for value conversion."""

    def test_matrices(self):
        self.assertEqual(to_jsonable(Matrix(FieldSpec(3), [[1, 2], [0, 1]])), [[1, 2], [0, 1]])
        self.assertEqual(to_jsonable(Matrix(FieldSpec(None), [[Fraction(1, 2)]])), [["1/2"]])

    def test_fractions(self):
        self.assertEqual(to_jsonable(Fraction(3, 4)), "3/4")
        self.assertEqual(to_jsonable(Fraction(4, 2)), 2)

    def test_numpy_scalars(self):
        converted = to_jsonable({"n": np.int64(5), "ok": np.bool_(True)})
        self.assertEqual(converted, {"n": 5, "ok": True})
        self.assertIsInstance(converted["n"], int)
        self.assertIsInstance(converted["ok"], bool)

    def test_to_dict_objects(self):
        self.assertEqual(to_jsonable(DimVector(("1", "2"), [1, 0])), {"1": 1, "2": 0})

    def test_sets_are_sorted(self):
        self.assertEqual(to_jsonable({3, 1, 2}), [1, 2, 3])

    def test_tuples_and_keys(self):
        self.assertEqual(to_jsonable({1: (1, 2)}), {"1": [1, 2]})


class TestReportWriter(unittest.TestCase):
    """Test cases for ReportWriter."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.temp_dir = tempfile.mkdtemp()
        self.report = {"name": "demo", "passed": True, "counts": {"b": 2, "a": 1}}

    def tearDown(self):
        """Clean up test fixtures after each test method."""
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_render_is_deterministic(self):
        """Test that key order does not change the rendered text."""
        reordered = {"counts": {"a": 1, "b": 2}, "passed": True, "name": "demo"}
        self.assertEqual(render_report(self.report), render_report(reordered))

    def test_render_format(self):
        """Test schema version, sorted keys and the trailing newline."""
        text = ReportWriter().render(self.report)
        self.assertTrue(text.endswith("}\n"))
        data = json.loads(text)
        self.assertEqual(data["schema_version"], SCHEMA_VERSION)
        self.assertEqual(list(data["counts"]), ["a", "b"])
        self.assertLess(text.index('"counts"'), text.index('"name"'))

    def test_render_rejects_unserializable(self):
        """Test that arbitrary objects raise ReportWriterError."""
        with self.assertRaises(ReportWriterError):
            render_report({"value": object()})

    def test_write_creates_directories(self):
        """Test that parent directories are created on write."""
        path = os.path.join(self.temp_dir, "nested", "dir", "report.json")
        written = write_report(self.report, path)
        self.assertEqual(written, path)
        with open(path, encoding='utf-8') as f:
            self.assertEqual(json.load(f)["name"], "demo")

    def test_write_twice_is_byte_identical(self):
        """Test that two writes of one report give identical files."""
        first = os.path.join(self.temp_dir, "first.json")
        second = os.path.join(self.temp_dir, "second.json")
        write_report(self.report, first)
        write_report(dict(reversed(list(self.report.items()))), second)
        with open(first, 'rb') as a, open(second, 'rb') as b:
            self.assertEqual(a.read(), b.read())

    def test_write_without_path(self):
        """Test that writing needs an output path."""
        with self.assertRaises(ReportWriterError):
            ReportWriter().write(self.report)

    def test_write_into_file_path(self):
        """Test that an unwritable location is reported."""
        blocker = os.path.join(self.temp_dir, "blocker")
        with open(blocker, 'w', encoding='utf-8') as f:
            f.write("x")
        with self.assertRaises(ReportWriterError):
            write_report(self.report, os.path.join(blocker, "report.json"))

    def test_empty_matrix(self):
        """Test that empty matrices render as empty lists."""
        data = json.loads(render_report({"m": zeros(FieldSpec(2), 0, 3)}))
        self.assertEqual(data["m"], [])


if __name__ == '__main__':
    unittest.main()
