"""Schema-checked readers for the run and probe file formats.

The writers serialize floats with repr and counters with str(int), so a
parsed table re-serialized by this module reproduces the file byte for byte;
that round trip is the compatibility contract with the producing tool.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass


class SchemaError(Exception):
    """Input exists but does not match the documented schema."""


# column name -> python type, in file order
TABLE_SCHEMAS: dict[str, tuple[tuple[str, type], ...]] = {
    "series": (
        ("t", float), ("kinetic", float), ("potential", float), ("E", float),
        ("dissipation", float), ("power", float), ("mass", float),
        ("clamps", int),
    ),
    "periodic_residual": (
        ("k", int), ("t", float), ("delta_rho", float), ("delta_mom", float),
        ("mass_l1", float),
    ),
    "shift_distances": (
        ("n", int), ("t_shift", float), ("delta_rho_window", float),
        ("delta_mom_window", float),
    ),
    "steady_convergence": (("t", float), ("e_rho", float), ("e_q", float)),
}


@dataclass(frozen=True)
class Table:
    kind: str
    names: tuple[str, ...]
    columns: dict[str, list]

    def __len__(self) -> int:
        return len(self.columns[self.names[0]]) if self.names else 0


def _schema_for(kind: str, header: list[str], path: str):
    if kind == "static_profile":
        # variable coordinate columns x0..x{d-1}, then rho_s
        if not header or header[-1] != "rho_s":
            raise SchemaError(f"{path}: missing column 'rho_s'")
        for i, name in enumerate(header[:-1]):
            if name != f"x{i}":
                raise SchemaError(
                    f"{path}: unexpected column {name!r} (wanted 'x{i}')")
        return tuple((name, float) for name in header)
    return TABLE_SCHEMAS[kind]


def read_table(path: str, kind: str) -> Table:
    """Parse a CSV of the given kind, checking the header and every cell."""
    if kind not in TABLE_SCHEMAS and kind != "static_profile":
        raise SchemaError(f"unknown table kind {kind!r}")
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    schema = _schema_for(kind, header, path)
    expected = [name for name, _ in schema]
    for name in expected:
        if name not in header:
            raise SchemaError(f"{path}: missing column {name!r}")
    for name in header:
        if name not in expected:
            raise SchemaError(f"{path}: unexpected column {name!r}")
    if header != expected:
        raise SchemaError(
            f"{path}: column order {header} does not match {expected}")

    columns: dict[str, list] = {name: [] for name in expected}
    for row_no, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(expected):
            raise SchemaError(
                f"{path}: row {row_no} has {len(cells)} cells, "
                f"expected {len(expected)}")
        for (name, dtype), cell in zip(schema, cells):
            try:
                value = dtype(cell)
            except ValueError:
                raise SchemaError(
                    f"{path}: row {row_no}, column {name!r}: "
                    f"cannot parse {cell!r}") from None
            if dtype is float and not math.isfinite(value):
                raise SchemaError(
                    f"{path}: row {row_no}, column {name!r}: "
                    f"non-finite value {cell!r}")
            columns[name].append(value)
    return Table(kind=kind, names=tuple(expected), columns=columns)


def serialize_table(table: Table) -> str:
    """Rebuild the exact text the producing tool wrote for this table."""
    schema = (tuple((name, float) for name in table.names)
              if table.kind == "static_profile"
              else TABLE_SCHEMAS[table.kind])
    rows = [",".join(table.names)]
    for j in range(len(table)):
        rows.append(",".join(
            str(table.columns[name][j]) if dtype is int
            else repr(table.columns[name][j])
            for name, dtype in schema
        ))
    return "\n".join(rows) + "\n"


def _check_snapshot(doc: dict, path: str, line_no: int):
    def fail(field: str, why: str):
        raise SchemaError(f"{path}: line {line_no}, field {field!r}: {why}")

    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: line {line_no}: not a JSON object")
    for key in ("t", "rho", "mom", "grid"):
        if key not in doc:
            fail(key, "missing")
    for key in doc:
        if key not in ("t", "rho", "mom", "grid"):
            fail(key, "unexpected")
    grid = doc["grid"]
    for key in ("dim", "extents", "cells", "ghost"):
        if not isinstance(grid, dict) or key not in grid:
            fail(f"grid.{key}", "missing")
    cells = grid["cells"]
    dim = grid["dim"]
    if len(grid["extents"]) != dim or len(cells) != dim:
        fail("grid", f"extents/cells do not match dim={dim}")

    import numpy as np

    rho = np.asarray(doc["rho"], dtype=float)
    if rho.shape != tuple(cells):
        fail("rho", f"shape {rho.shape} does not match cells {cells}")
    mom = np.asarray(doc["mom"], dtype=float)
    if mom.shape != (dim, *cells):
        fail("mom", f"shape {mom.shape} does not match (dim, cells)")


def read_snapshots(path: str) -> list[dict]:
    """Parse a snapshots JSONL file, one validated object per line."""
    out = []
    with open(path) as fh:
        for line_no, line in enumerate(fh.read().splitlines(), start=1):
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(
                    f"{path}: line {line_no}: invalid JSON ({e})") from None
            _check_snapshot(doc, path, line_no)
            out.append(doc)
    if not out:
        raise SchemaError(f"{path}: empty file")
    return out


def serialize_snapshots(snapshots: list[dict]) -> str:
    """Rebuild the exact JSONL text the producing tool wrote."""
    return "\n".join(
        json.dumps(doc, separators=(",", ":")) for doc in snapshots
    ) + "\n"
