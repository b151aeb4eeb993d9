"""
JSON report writer module.

Reports are written as UTF-8 JSON with sorted keys, two-space indentation and a
trailing newline, so that two runs over the same instance give byte-identical
files. Every report carries a ``schema_version`` field.
"""

import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

try:
    from .field_matrix import Matrix, to_json
except ImportError:
    from field_matrix import Matrix, to_json

SCHEMA_VERSION = 1


class ReportWriterError(Exception):
    """Custom exception for report writing errors."""
    pass


def to_jsonable(value: Any) -> Any:
    """
    Convert report values to plain JSON types.

    Matrices become nested lists, rationals become ``"n/d"`` strings, numpy
    scalars become Python numbers, sets become sorted lists and anything with
    a ``to_dict`` method is converted through it.
    """
    if isinstance(value, Matrix):
        return to_json(value)
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((to_jsonable(v) for v in value), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


class ReportWriter:
    """Writes verification and computation reports as JSON."""

    def __init__(self, output_path: Optional[str] = None):
        """
        Initialize the report writer.

        Args:
            output_path: File to write; None means the caller prints the rendered text
        """
        self.output_path = output_path

    def render(self, report: Dict[str, Any]) -> str:
        """
        Render a report as deterministic JSON text.

        Raises:
            ReportWriterError: If the report holds values JSON cannot represent
        """
        payload = {"schema_version": SCHEMA_VERSION, **to_jsonable(report)}
        try:
            return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
        except (TypeError, ValueError) as e:
            raise ReportWriterError(f"Report is not JSON serializable: {str(e)}")

    def write(self, report: Dict[str, Any]) -> str:
        """
        Write a report to ``output_path``, creating parent directories.

        Returns:
            The path written to

        Raises:
            ReportWriterError: If there is no output path or writing fails
        """
        if not self.output_path:
            raise ReportWriterError("No output path configured")
        content = self.render(report)
        try:
            parent = os.path.dirname(self.output_path)
            if parent:
                Path(parent).mkdir(parents=True, exist_ok=True)
            with open(self.output_path, 'w', encoding='utf-8') as f:
                f.write(content)
            return self.output_path
        except OSError as e:
            raise ReportWriterError(f"Failed to write report '{self.output_path}': {str(e)}")


def write_report(report: Dict[str, Any], output_path: str) -> str:
    """Convenience function to write one report."""
    return ReportWriter(output_path).write(report)


def render_report(report: Dict[str, Any]) -> str:
    """Convenience function to render one report as JSON text."""
    return ReportWriter().render(report)
