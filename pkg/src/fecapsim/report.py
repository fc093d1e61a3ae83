"""Deterministic CSV/JSON emission and the report manifest.

Output files are byte-identical across runs with the same config and seed:
floats are formatted with a fixed significant-digit rule, rows keep a fixed
order, and no timestamps are written.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path


def fmt(value) -> str:
    """Format one cell: floats at 12 significant digits, rest via str()."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(path: str | Path, header: list[str], rows: list[list]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines.extend(",".join(fmt(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json(path: str | Path, header: list[str], rows: list[list]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records = [{key: (fmt(cell) if isinstance(cell, float) else cell) for key, cell in zip(header, row)} for row in rows]
    path.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_table(path: str | Path, header: list[str], rows: list[list], fmt_name: str = "csv") -> Path:
    if fmt_name == "csv":
        return write_csv(path, header, rows)
    if fmt_name == "json":
        return write_json(Path(path).with_suffix(".json"), header, rows)
    raise ValueError(f"unknown output format {fmt_name!r}")


@dataclass
class ReportManifest:
    """Maps every emitted artifact to its file and generation parameters."""

    entries: dict[str, dict] = field(default_factory=dict)

    def add(self, name: str, path: Path, **params) -> None:
        self.entries[name] = {"path": str(path), "params": {k: fmt(v) for k, v in sorted(params.items())}}

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        # paths are stored relative to the manifest so reruns into any
        # output directory stay byte-identical
        relative = {
            name: {"path": os.path.relpath(entry["path"], path.parent), "params": entry["params"]}
            for name, entry in self.entries.items()
        }
        path.write_text(json.dumps(relative, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path
