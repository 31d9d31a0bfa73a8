"""Input parsing and layout persistence (JSON, CSV)."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .model import Assignment, GridLayout, GridSpec, LayoutError, Sample, SampleSet

LAYOUT_SCHEMA_VERSION = 1


def load_samples(path: str | Path) -> SampleSet:
    """Parse a sample file (.json or .csv) and validate the sample set."""
    path = Path(path)
    if not path.exists():
        raise LayoutError(f"no such file: {path}")
    if path.suffix.lower() == ".csv":
        return _load_samples_csv(path)
    return _load_samples_json(path)


def _check_position(sid: str, x, y, where: str) -> tuple[float, float]:
    try:
        x, y = float(x), float(y)
    except (TypeError, ValueError):
        raise LayoutError(f"{where}: non-numeric coordinates for sample {sid!r}")
    if not (math.isfinite(x) and math.isfinite(y)):
        raise LayoutError(f"{where}: non-finite coordinates for sample {sid!r}")
    return x, y


def _load_samples_json(path: Path) -> SampleSet:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LayoutError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    if not isinstance(data, dict) or "samples" not in data:
        raise LayoutError(f"{path}: expected an object with a 'samples' array")
    samples = []
    for i, rec in enumerate(data["samples"]):
        where = f"{path}: samples[{i}]"
        for field in ("id", "x", "y", "cluster"):
            if field not in rec:
                raise LayoutError(f"{where}: missing field {field!r}")
        sid = str(rec["id"])
        x, y = _check_position(sid, rec["x"], rec["y"], where)
        meta = rec.get("meta")
        if meta is not None:
            meta = {str(k): str(v) for k, v in meta.items()}
        samples.append(Sample(sid, (x, y), str(rec["cluster"]), meta))
    sims = data.get("similarities")
    if sims is not None:
        sims = np.asarray(sims, dtype=float)
    return SampleSet(tuple(samples), sims)


def _load_samples_csv(path: Path) -> SampleSet:
    samples = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"id", "x", "y", "cluster"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise LayoutError(f"{path}: header must include {sorted(required)}")
        for lineno, rec in enumerate(reader, start=2):
            sid = rec["id"]
            x, y = _check_position(sid, rec["x"], rec["y"], f"{path}:{lineno}")
            samples.append(Sample(sid, (x, y), rec["cluster"]))
    return SampleSet(tuple(samples))


def save_samples(samples: SampleSet, path: str | Path) -> None:
    data = {
        "samples": [
            {
                "id": s.id,
                "x": s.position[0],
                "y": s.position[1],
                "cluster": s.cluster,
                **({"meta": dict(s.meta)} if s.meta else {}),
            }
            for s in samples.samples
        ],
        "similarities": None
        if samples.similarities is None
        else samples.similarities.tolist(),
    }
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def save_layout(layout: GridLayout, path: str | Path) -> None:
    spec = layout.spec
    cells = []
    for i, cell in enumerate(layout.assignment.cell_of):
        c, r = spec.cell_of_index(cell)
        s = layout.samples.samples[i]
        cells.append({"col": c, "row": r, "sample": s.id, "cluster": s.cluster})
    cells.sort(key=lambda rec: (rec["row"], rec["col"]))
    data = {
        "version": LAYOUT_SCHEMA_VERSION,
        "grid": {"w": spec.width, "h": spec.height},
        "cells": cells,
    }
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_layout(path: str | Path, samples: Optional[SampleSet] = None) -> GridLayout:
    """Rebuild a layout from a file; `samples` supplies positions and meta.

    Without a sample set, a positional stand-in is reconstructed from the
    file (cell centers as positions), which is enough for rendering.
    """
    path = Path(path)
    if not path.exists():
        raise LayoutError(f"no such file: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LayoutError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    version = data.get("version")
    if version != LAYOUT_SCHEMA_VERSION:
        raise LayoutError(f"unsupported schema version: {version!r}")
    grid = data.get("grid", {})
    spec = GridSpec(int(grid.get("w", 0)), int(grid.get("h", 0)))
    records = data.get("cells", [])
    for rec in records:
        for field in ("col", "row", "sample", "cluster"):
            if field not in rec:
                raise LayoutError(f"{path}: cell record missing {field!r}")
        if not (0 <= rec["col"] < spec.width and 0 <= rec["row"] < spec.height):
            raise LayoutError(f"cell ({rec['col']}, {rec['row']}) outside the grid")
    if samples is None:
        made = tuple(
            Sample(
                str(rec["sample"]),
                (rec["col"] + 0.5, rec["row"] + 0.5),
                str(rec["cluster"]),
            )
            for rec in records
        )
        samples = SampleSet(made)
    index = samples.index_of()
    cell_of = [-1] * len(samples)
    seen = set()
    for rec in records:
        sid = str(rec["sample"])
        if sid not in index:
            raise LayoutError(f"unknown sample id in layout: {sid!r}")
        if sid in seen:
            raise LayoutError(f"sample {sid!r} appears in two cells")
        seen.add(sid)
        i = index[sid]
        if samples.samples[i].cluster != str(rec["cluster"]):
            raise LayoutError(
                f"cluster mismatch for {sid!r}: {rec['cluster']!r} in file"
            )
        cell_of[i] = spec.cell_index(int(rec["col"]), int(rec["row"]))
    if any(c < 0 for c in cell_of):
        missing = [samples.samples[i].id for i, c in enumerate(cell_of) if c < 0]
        raise LayoutError(f"layout misses samples: {missing[:5]}")
    return GridLayout(samples, spec, Assignment(spec, tuple(cell_of)))
