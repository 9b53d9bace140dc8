"""Readers for the kdv5 experiment output schemas.

These parse exactly the files the simulator's runner writes: headered CSV
tables and JSON-lines snapshot records with a sibling run_meta.json.  No
dependency on the simulator package itself.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np


class SchemaError(ValueError):
    """Input file does not match the expected column schema."""


def read_table(path: str, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Read a headered CSV; require the named columns, keep all of them.

    Numeric cells become floats, empty cells NaN; a missing column raises
    SchemaError naming both the expected and the found columns.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration as exc:
            raise SchemaError(f"{path}: empty file") from exc
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing columns {missing}; found {header}")
        rows = list(reader)
    table: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        column = []
        for row in rows:
            cell = row[j] if j < len(row) else ""
            if cell == "":
                column.append(np.nan)
            else:
                try:
                    column.append(float(cell))
                except ValueError:
                    column.append(np.nan)
        table[name] = np.asarray(column)
    return table


def read_conserved(path: str):
    """Parse the conserved series (t, quantity, kappa, value) into per-series arrays."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["t", "quantity", "kappa", "value"]:
            raise SchemaError(
                f"{path}: expected columns ['t', 'quantity', 'kappa', 'value'];"
                f" found {header}")
        series: dict[str, list[tuple[float, float]]] = {}
        for t, quantity, kappa, value in reader:
            key = quantity if kappa == "" else f"{quantity}[{kappa}]"
            series.setdefault(key, []).append((float(t), float(value)))
    return {k: np.asarray(v) for k, v in series.items()}


def read_snapshots(jsonl_path: str, meta_path: str | None = None):
    """Parse snapshots.jsonl (+ run_meta.json for the spatial axis)."""
    if meta_path is None:
        meta_path = os.path.join(os.path.dirname(jsonl_path), "run_meta.json")
    times = []
    states = []
    with open(jsonl_path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "t" not in record or "samples" not in record:
                raise SchemaError(
                    f"{jsonl_path}: expected keys ['t', 'samples']; found {sorted(record)}")
            times.append(float(record["t"]))
            states.append(np.asarray(record["samples"], dtype=float))
    with open(meta_path) as fh:
        meta = json.load(fh)
    grid = meta.get("grid", {})
    if not {"x0", "dx", "N"} <= set(grid):
        raise SchemaError(f"{meta_path}: grid must carry x0, dx, N; found {sorted(grid)}")
    x = grid["x0"] + grid["dx"] * np.arange(int(grid["N"]))
    return np.asarray(times), np.vstack(states), x, meta
