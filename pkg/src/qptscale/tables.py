"""Typed result tables with provenance comments and atomic CSV round-trips."""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass, field

from .errors import InputError

# 17 significant digits: exact float64 round-trip
_FLOAT_FMT = "{:.16e}"
_INT_RE = re.compile(r"^[+-]?\d+$")


@dataclass
class ResultTable:
    """Columns of int/float/str cells plus units and a provenance block."""

    columns: dict
    units: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {name: len(col) for name, col in self.columns.items()}
        if len(set(lengths.values())) > 1:
            raise InputError(f"column lengths differ: {lengths}")
        if not self.provenance:
            raise InputError("provenance block must not be empty")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0


def _format_cell(value) -> str:
    if isinstance(value, bool):
        raise InputError("boolean cells are not supported; use strings")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _FLOAT_FMT.format(value)
    if isinstance(value, str):
        if "," in value or "\n" in value or value.startswith("#"):
            raise InputError(f"string cell {value!r} would break the CSV dialect")
        return value
    raise InputError(f"unsupported cell type {type(value).__name__}")


def _parse_cell(text: str):
    if _INT_RE.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def _render(table: ResultTable) -> str:
    lines = []
    for key in sorted(table.provenance):
        lines.append(f"# provenance: {key} = {table.provenance[key]}")
    for key in sorted(table.units):
        lines.append(f"# unit: {key} = {table.units[key]}")
    names = list(table.columns)
    lines.append(",".join(names))
    for i in range(table.n_rows):
        lines.append(",".join(_format_cell(table.columns[name][i]) for name in names))
    return "\n".join(lines) + "\n"


def write_table(table: ResultTable, path: str) -> str:
    """Write atomically (temp file + rename); returns the path."""
    text = _render(table)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qptscale_", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_table(path: str) -> ResultTable:
    """Parse a table written by :func:`write_table` back, losslessly."""
    provenance = {}
    units = {}
    header = None
    rows = []
    with open(path, "r") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("# provenance: "):
                key, _, value = line[len("# provenance: "):].partition(" = ")
                provenance[key] = value
            elif line.startswith("# unit: "):
                key, _, value = line[len("# unit: "):].partition(" = ")
                units[key] = value
            elif line.startswith("#"):
                continue
            elif header is None:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    if header is None:
        raise InputError(f"{path}: no header row found")
    columns = {name: [] for name in header}
    for row in rows:
        if len(row) != len(header):
            raise InputError(f"{path}: row width {len(row)} != header width {len(header)}")
        for name, cell in zip(header, row):
            columns[name].append(_parse_cell(cell))
    return ResultTable(columns=columns, units=units, provenance=provenance)
