"""
Unit tests for the instance file parser module.

This module covers quiver, vector, representation and complete instance
documents, inline vectors given on the command line, and the located errors
reported for malformed input.
"""

import json
import os
import tempfile
import unittest
from unittest.mock import mock_open, patch

from qml import parser as parser_module
from qml.field_matrix import FieldSpec, Matrix
from qml.parser import (
    Instance,
    InstanceParseError,
    InstanceParser,
    load_quiver,
    load_representation,
    load_vector,
    parse_instance_content,
    parse_instance_file,
)
from qml.quiver_core import DimVector, Quiver, StabilityParam

THREE_LINES = {
    "quiver": {
        "vertices": ["q1", "q2", "q3", "s"],
        "arrows": [
            {"id": "a1", "src": "q1", "dst": "s"},
            {"id": "a2", "src": "q2", "dst": "s"},
            {"id": "a3", "src": "q3", "dst": "s"},
        ],
    },
    "alpha": [1, 1, 1, 2],
    "theta": {"q1": 2, "q2": 2, "q3": 2, "s": -3},
    "field": "F2",
    "rep": {
        "dim": [1, 1, 1, 2],
        "maps": {"a1": [[1], [0]], "a2": [[0], [1]], "a3": [[1], [1]]},
    },
}


class TestInstanceParser(unittest.TestCase):
    """Test cases for InstanceParser."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.parser = InstanceParser()
        self.quiver = Quiver.subspace(3)

    def test_parse_complete_instance(self):
        """Test that every key of an instance document is read."""
        instance = self.parser.parse_content(json.dumps(THREE_LINES))
        self.assertIsInstance(instance, Instance)
        self.assertEqual(instance.quiver, self.quiver)
        self.assertEqual(instance.field, FieldSpec(2))
        self.assertEqual(instance.alpha.values_tuple, (1, 1, 1, 2))
        self.assertIsInstance(instance.theta, StabilityParam)
        self.assertEqual(instance.theta["s"], -3)
        self.assertEqual(instance.rep.map("a3"), Matrix(FieldSpec(2), [[1], [1]]))

    def test_optional_keys(self):
        """Test that an instance may consist of a quiver only."""
        instance = self.parser.parse_content(json.dumps({"quiver": THREE_LINES["quiver"]}))
        self.assertIsNone(instance.alpha)
        self.assertIsNone(instance.theta)
        self.assertIsNone(instance.rep)
        self.assertEqual(instance.field, FieldSpec(2))

    def test_default_field(self):
        """Test that the parser's field applies when the document names none."""
        parser = InstanceParser(FieldSpec(5))
        instance = parser.parse_content(json.dumps({"quiver": THREE_LINES["quiver"]}))
        self.assertEqual(instance.field.name, "F5")

    def test_unknown_instance_keys(self):
        """Test that unexpected top-level keys are rejected."""
        data = dict(THREE_LINES, colour="red")
        with self.assertRaises(InstanceParseError) as context:
            self.parser.parse_content(json.dumps(data))
        self.assertIn("colour", str(context.exception))

    def test_missing_quiver(self):
        """Test that a document without a quiver is rejected."""
        with self.assertRaises(InstanceParseError):
            self.parser.parse_content(json.dumps({"alpha": [1, 1]}))

    def test_malformed_json_is_located(self):
        """Test that decoder errors carry line and column."""
        parser = InstanceParser()
        parser.source = "broken.json"
        with self.assertRaises(InstanceParseError) as context:
            parser.parse_content('{\n  "quiver": {\n    "vertices": [1,\n}')
        error = context.exception
        self.assertEqual(error.source, "broken.json")
        self.assertEqual(error.line, 4)
        self.assertTrue(str(error).startswith("broken.json:4:"))

    def test_unknown_arrow_endpoint(self):
        """Test that arrows must connect declared vertices."""
        data = {"vertices": ["1"], "arrows": [{"id": "a", "src": "1", "dst": "2"}]}
        with self.assertRaises(InstanceParseError) as context:
            self.parser.parse_quiver(data)
        self.assertIn("dst", str(context.exception))

    def test_incomplete_arrow(self):
        """Test that arrows need an id, a source and a target."""
        with self.assertRaises(InstanceParseError):
            self.parser.parse_quiver({"vertices": ["1", "2"], "arrows": [{"id": "a", "src": "1"}]})

    def test_oriented_cycle(self):
        """Test that quivers with oriented cycles are rejected."""
        data = {"vertices": ["1", "2"], "arrows": [{"id": "a", "src": "1", "dst": "2"},
                                                    {"id": "b", "src": "2", "dst": "1"}]}
        with self.assertRaises(InstanceParseError):
            self.parser.parse_quiver(data)

    def test_unknown_field(self):
        """Test that only prime fields and Q are accepted."""
        with self.assertRaises(InstanceParseError):
            self.parser.parse_field("F4")
        self.assertEqual(self.parser.parse_field("Q"), FieldSpec(None))

    def test_single_error_class(self):
        """Test that InstanceParseError is the only parse error the module exports."""
        self.assertFalse(hasattr(parser_module, "ParseError"))
        self.assertTrue(issubclass(InstanceParseError, Exception))


class TestParseVector(unittest.TestCase):
    """Test cases for the three ways of writing a vector."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.parser = InstanceParser()
        self.quiver = Quiver.subspace(3)

    def test_inline(self):
        """Test comma separated integers in vertex order."""
        theta = self.parser.parse_vector("2, 2, 2, -3", self.quiver, StabilityParam)
        self.assertEqual(theta.values_tuple, (2, 2, 2, -3))

    def test_mapping_and_list(self):
        """Test that mappings and lists give the same vector."""
        by_name = self.parser.parse_vector({"q1": 1, "q2": 1, "q3": 1, "s": 2}, self.quiver)
        by_order = self.parser.parse_vector([1, 1, 1, 2], self.quiver)
        self.assertEqual(by_name, by_order)

    def test_wrong_length(self):
        """Test that the vector must cover every vertex."""
        with self.assertRaises(InstanceParseError):
            self.parser.parse_vector("1,1", self.quiver)
        with self.assertRaises(InstanceParseError):
            self.parser.parse_vector({"q1": 1}, self.quiver)

    def test_not_integers(self):
        """Test that inline values must be integers."""
        with self.assertRaises(InstanceParseError):
            self.parser.parse_vector("1,x,1,2", self.quiver)

    def test_negative_dimension(self):
        """Test that dimension vectors are non-negative while theta may be negative."""
        with self.assertRaises(InstanceParseError):
            self.parser.parse_vector([1, 1, 1, -2], self.quiver, DimVector)
        self.assertEqual(self.parser.parse_vector([1, 1, 1, -2], self.quiver, StabilityParam)["s"], -2)

    def test_wrong_type(self):
        """Test that numbers alone are not vectors."""
        with self.assertRaises(InstanceParseError):
            self.parser.parse_vector(7, self.quiver)


class TestFileHelpers(unittest.TestCase):
    """Test cases for the file based convenience functions."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.temp_dir = tempfile.mkdtemp()
        self.instance_path = os.path.join(self.temp_dir, "lines.json")
        with open(self.instance_path, 'w', encoding='utf-8') as f:
            json.dump(THREE_LINES, f)

    def tearDown(self):
        """Clean up test fixtures after each test method."""
        import shutil
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_parse_instance_file(self):
        """Test parsing an instance from disk."""
        instance = parse_instance_file(self.instance_path)
        self.assertEqual(instance.rep.dim.values_tuple, (1, 1, 1, 2))

    def test_missing_file(self):
        """Test that a missing file is a parse error naming the file."""
        missing = os.path.join(self.temp_dir, "nope.json")
        with self.assertRaises(InstanceParseError) as context:
            parse_instance_file(missing)
        self.assertEqual(context.exception.source, missing)

    def test_load_quiver_from_instance(self):
        """Test that load_quiver accepts both bare quivers and instances."""
        self.assertEqual(load_quiver(self.instance_path), Quiver.subspace(3))
        bare = os.path.join(self.temp_dir, "quiver.json")
        with open(bare, 'w', encoding='utf-8') as f:
            json.dump(THREE_LINES["quiver"], f)
        self.assertEqual(load_quiver(bare), Quiver.subspace(3))

    def test_load_vector_file_or_inline(self):
        """Test that load_vector reads files and inline values."""
        quiver = Quiver.subspace(3)
        path = os.path.join(self.temp_dir, "alpha.json")
        with open(path, 'w', encoding='utf-8') as f:
            json.dump([1, 1, 1, 2], f)
        self.assertEqual(load_vector(path, quiver), load_vector("1,1,1,2", quiver))
        with self.assertRaises(InstanceParseError) as context:
            load_vector("1,1", quiver)
        self.assertEqual(context.exception.source, "<argument>")

    def test_load_representation(self):
        """Test reading the rep entry of an instance file."""
        rep = load_representation(self.instance_path, Quiver.subspace(3))
        self.assertEqual(rep.field, FieldSpec(2))
        self.assertEqual(rep.map("a1").entries(), [[1], [0]])

    def test_load_representation_uses_instance_field(self):
        """Test that the instance's field applies to its rep entry."""
        path = os.path.join(self.temp_dir, "f3.json")
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(dict(THREE_LINES, field="F3"), f)
        rep = load_representation(path, Quiver.subspace(3))
        self.assertEqual(rep.field, FieldSpec(3))
        self.assertEqual(load_representation(path, Quiver.subspace(3), FieldSpec(5)).field, FieldSpec(5))

    def test_representation_shape_error(self):
        """Test that a matrix of the wrong shape is reported as a parse error."""
        data = {"dim": [1, 1, 1, 2], "maps": {"a1": [[1, 0]], "a2": [[0], [1]], "a3": [[1], [1]]}}
        with self.assertRaises(InstanceParseError):
            InstanceParser().parse_representation(data, Quiver.subspace(3))

    @patch('builtins.open', new_callable=mock_open, read_data='{"quiver": {"vertices": ["x"]}}')
    def test_parse_file_with_mock(self, mock_file):
        """Test parsing through a mocked file handle."""
        instance = parse_instance_file("virtual.json")
        self.assertEqual(instance.quiver.vertices, ("x",))
        mock_file.assert_called_once_with("virtual.json", encoding='utf-8')

    def test_parse_instance_content_source(self):
        """Test that string documents are reported as <string>."""
        with self.assertRaises(InstanceParseError) as context:
            parse_instance_content("[")
        self.assertEqual(context.exception.source, "<string>")


if __name__ == '__main__':
    unittest.main()
