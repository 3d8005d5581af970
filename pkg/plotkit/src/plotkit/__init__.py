"""Figure rendering for run and probe outputs, consuming only the documented
CSV/JSONL file formats."""

__version__ = "0.1.0"

from .readers import (SchemaError, Table, read_snapshots, read_table,
                      serialize_snapshots, serialize_table)
from .render import KINDS, PlotSpec, render

__all__ = [
    "KINDS",
    "PlotSpec",
    "SchemaError",
    "Table",
    "read_snapshots",
    "read_table",
    "render",
    "serialize_snapshots",
    "serialize_table",
    "__version__",
]
