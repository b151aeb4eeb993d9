"""
Instance file parser module.

This module reads the JSON files the command line works with: quivers,
dimension vectors, stability parameters, representations and complete
instances bundling all of them. Dimension vectors and stability parameters may
also be written inline as comma separated integers in vertex order
(``--alpha 1,1,1,2``).

Every failure is reported as an InstanceParseError carrying the file name and,
for malformed JSON, the line and column where decoding stopped.
"""

import json
import os
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Type, Union

try:
    from .field_matrix import FieldMatrixError, FieldSpec
    from .quiver_core import DimVector, Quiver, QuiverError, StabilityParam, VertexVector
    from .representation import Representation
except ImportError:
    from field_matrix import FieldMatrixError, FieldSpec
    from quiver_core import DimVector, Quiver, QuiverError, StabilityParam, VertexVector
    from representation import Representation


class InstanceParseError(Exception):
    """Custom exception for instance file parsing errors."""

    def __init__(self, message: str, source: Optional[str] = None, line: Optional[int] = None,
                 col: Optional[int] = None):
        self.message = message
        self.source = source
        self.line = line
        self.col = col
        super().__init__(self.location() + message)

    def location(self) -> str:
        if self.source is None:
            return ""
        if self.line is None:
            return f"{self.source}: "
        return f"{self.source}:{self.line}:{self.col}: "


@dataclass
class Instance:
    """A quiver with whatever an instance file provides on top of it."""

    quiver: Quiver
    field: FieldSpec
    alpha: Optional[DimVector] = None
    theta: Optional[StabilityParam] = None
    rep: Optional[Representation] = None


class InstanceParser:
    """Parser for quiver instance files."""

    # Keys of a complete instance document
    INSTANCE_KEYS = ("quiver", "alpha", "theta", "field", "rep")

    def __init__(self, field: Optional[FieldSpec] = None):
        """
        Initialize the parser.

        Args:
            field: Field used when a document does not name one (F2 otherwise)
        """
        self.field = field
        self.source: Optional[str] = None

    def _error(self, message: str) -> InstanceParseError:
        return InstanceParseError(message, self.source)

    def load_json(self, content: str) -> Any:
        """
        Decode JSON, turning decoder errors into located parse errors.

        Raises:
            InstanceParseError: If the content is not valid JSON
        """
        try:
            return json.loads(content)
        except json.JSONDecodeError as e:
            raise InstanceParseError(e.msg, self.source or "<string>", e.lineno, e.colno)

    def _read_text(self, file_path: str) -> str:
        self.source = file_path
        try:
            with open(file_path, encoding='utf-8') as file:
                content = file.read()
        except FileNotFoundError:
            raise InstanceParseError("File not found", file_path)
        except OSError as e:
            raise InstanceParseError(f"Error reading file: {e}", file_path)
        return content

    def read_file(self, file_path: str) -> Any:
        """
        Read and decode a JSON file.

        Raises:
            InstanceParseError: If the file cannot be read or decoded
        """
        return self.load_json(self._read_text(file_path))

    def parse_field(self, value: Any) -> FieldSpec:
        """
        Parse a field name such as ``F2`` or ``Q``.

        Raises:
            InstanceParseError: If the name is not a supported field
        """
        if value is None:
            return self.field or FieldSpec(2)
        try:
            return FieldSpec.parse(str(value))
        except FieldMatrixError as e:
            raise self._error(str(e))

    def parse_quiver(self, data: Any) -> Quiver:
        """
        Parse ``{"vertices": [...], "arrows": [{"id", "src", "dst"}, ...]}``.

        Raises:
            InstanceParseError: On missing keys, unknown vertices or oriented cycles
        """
        if not isinstance(data, Mapping) or "vertices" not in data:
            raise self._error("Quiver must be an object with a 'vertices' list")
        if not isinstance(data["vertices"], list):
            raise self._error("'vertices' must be a list")
        vertices = {str(v) for v in data["vertices"]}
        for k, arrow in enumerate(data.get("arrows", [])):
            if not isinstance(arrow, Mapping) or not {"id", "src", "dst"} <= set(arrow):
                raise self._error(f"Arrow #{k} needs 'id', 'src' and 'dst'")
            for end in ("src", "dst"):
                if str(arrow[end]) not in vertices:
                    raise self._error(f"Arrow {arrow['id']} has unknown {end} vertex {arrow[end]!r}")
        try:
            return Quiver.from_dict({"vertices": [str(v) for v in data["vertices"]],
                                     "arrows": data.get("arrows", [])})
        except QuiverError as e:
            raise self._error(str(e))

    def parse_vector(self, value: Any, quiver: Quiver,
                     kind: Type[VertexVector] = DimVector) -> VertexVector:
        """
        Parse a per-vertex integer vector.

        Args:
            value: A mapping vertex -> int, a list in vertex order, or an
                inline string such as ``"1,1,1,2"`` or ``"2,2,2,-3"``
            quiver: The quiver whose vertices index the vector
            kind: DimVector or StabilityParam

        Raises:
            InstanceParseError: If the value does not fit the quiver
        """
        if isinstance(value, str):
            try:
                value = [int(part) for part in value.replace(" ", "").split(",") if part]
            except ValueError:
                raise self._error(f"Cannot read {value!r} as comma separated integers")
        if isinstance(value, Mapping):
            value = {str(k): v for k, v in value.items()}
        elif not isinstance(value, list):
            raise self._error(f"{kind.__name__} must be an object or a list, got {type(value).__name__}")
        try:
            return kind(quiver.vertices, value)
        except (QuiverError, TypeError, ValueError) as e:
            raise self._error(str(e))

    def parse_representation(self, data: Any, quiver: Quiver, field: Optional[FieldSpec] = None) -> Representation:
        """
        Parse ``{"dim": {...}, "field": "F2", "maps": {"a1": [[...]], ...}}``.

        Raises:
            InstanceParseError: If the representation does not fit the quiver
        """
        if not isinstance(data, Mapping) or "dim" not in data:
            raise self._error("Representation must be an object with a 'dim' entry")
        if field is None:
            field = self.parse_field(data.get("field"))
        dim = self.parse_vector(data["dim"], quiver, DimVector)
        try:
            return Representation.from_dict(quiver, {"dim": dim.to_dict(), "maps": data.get("maps", {})}, field)
        except Exception as e:
            raise self._error(f"Invalid representation: {e}")

    def parse_content(self, content: str) -> Instance:
        """
        Parse an instance document from a string.

        Returns:
            The Instance; keys other than ``quiver`` are optional
        """
        data = self.load_json(content)
        if not isinstance(data, Mapping) or "quiver" not in data:
            raise self._error("Instance must be an object with a 'quiver' entry")
        unknown = set(data) - set(self.INSTANCE_KEYS)
        if unknown:
            raise self._error(f"Unknown instance keys: {sorted(unknown)}")
        quiver = self.parse_quiver(data["quiver"])
        field = self.parse_field(data.get("field"))
        instance = Instance(quiver, field)
        if "alpha" in data:
            instance.alpha = self.parse_vector(data["alpha"], quiver, DimVector)
        if "theta" in data:
            instance.theta = self.parse_vector(data["theta"], quiver, StabilityParam)
        if "rep" in data:
            instance.rep = self.parse_representation(data["rep"], quiver, field)
        return instance

    def parse_file(self, file_path: str) -> Instance:
        """
        Parse an instance file.

        Raises:
            InstanceParseError: If the file cannot be read or parsed
        """
        return self.parse_content(self._read_text(file_path))


def parse_instance_file(file_path: str, field: Optional[FieldSpec] = None) -> Instance:
    """
    Convenience function to parse an instance file.

    Raises:
        InstanceParseError: If parsing fails
    """
    return InstanceParser(field).parse_file(file_path)


def parse_instance_content(content: str, field: Optional[FieldSpec] = None) -> Instance:
    """Convenience function to parse an instance document held in a string."""
    parser = InstanceParser(field)
    parser.source = "<string>"
    return parser.parse_content(content)


def load_quiver(file_path: str) -> Quiver:
    """Read a quiver file, or the quiver of a complete instance file."""
    parser = InstanceParser()
    data = parser.read_file(file_path)
    if isinstance(data, Mapping) and "quiver" in data:
        data = data["quiver"]
    return parser.parse_quiver(data)


def load_vector(value: str, quiver: Quiver,
                kind: Type[VertexVector] = DimVector) -> Union[DimVector, StabilityParam]:
    """
    Read a vector given on the command line: a JSON file path or an inline comma list.

    Raises:
        InstanceParseError: If the value cannot be read
    """
    parser = InstanceParser()
    if os.path.exists(value):
        return parser.parse_vector(parser.read_file(value), quiver, kind)
    parser.source = "<argument>"
    return parser.parse_vector(value, quiver, kind)


def load_representation(file_path: str, quiver: Quiver, field: Optional[FieldSpec] = None) -> Representation:
    """Read a representation file, or the ``rep`` entry of a complete instance file."""
    parser = InstanceParser(field)
    data: Dict[str, Any] = parser.read_file(file_path)
    if isinstance(data, Mapping) and "rep" in data:
        if field is None and "field" in data and "field" not in data["rep"]:
            field = parser.parse_field(data["field"])
        data = data["rep"]
    return parser.parse_representation(data, quiver, field)
