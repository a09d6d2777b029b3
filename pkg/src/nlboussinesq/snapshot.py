"""Field snapshots: a JSON header next to a raw little-endian float64 or CSV block.

Scalar fields store two blocks, ``values`` (n x n) and ``trace`` (4 x n);
vector fields store ``ux`` ((n+1) x n) and ``uy`` (n x (n+1)). Blocks are
row-major and written in that order.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ArtifactError
from .mesh import Mesh, ScalarField, VectorField


def _blocks(field):
    if isinstance(field, ScalarField):
        return "scalar", "cell-centre+trace", [("values", field.values), ("trace", field.trace)]
    if isinstance(field, VectorField):
        return "vector", "mac-faces", [("ux", field.ux), ("uy", field.uy)]
    raise TypeError(f"cannot snapshot {type(field).__name__}")


def write_snapshot(stem: Path | str, field, t: float = 0.0, fmt: str = "raw") -> Path:
    """Write ``<stem>.json`` and ``<stem>.bin`` (or ``.csv``); returns the header path."""
    if fmt not in ("raw", "csv"):
        raise ValueError(f"unknown snapshot format {fmt!r}")
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    kind, layout, blocks = _blocks(field)
    data = stem.with_suffix(".bin" if fmt == "raw" else ".csv")
    header = {
        "nx": field.mesh.nx,
        "ny": field.mesh.ny,
        "kind": kind,
        "layout": layout,
        "time": float(t),
        "format": fmt,
        "dtype": "<f8",
        "blocks": [{"name": name, "shape": list(arr.shape)} for name, arr in blocks],
        "data": data.name,
    }
    if fmt == "raw":
        data.write_bytes(b"".join(np.ascontiguousarray(arr, dtype="<f8").tobytes() for _, arr in blocks))
    else:
        with open(data, "w", newline="") as fh:
            w = csv.writer(fh)
            for _, arr in blocks:
                for row in arr:
                    w.writerow([repr(float(x)) for x in row])
    head = stem.with_suffix(".json")
    head.write_text(json.dumps(header, indent=2, sort_keys=True))
    return head


def read_snapshot(path: Path | str):
    """Read a snapshot header and its data block; returns ``(field, time)``."""
    path = Path(path)
    try:
        header = json.loads(path.read_text())
        data = path.parent / header["data"]
        shapes = [tuple(b["shape"]) for b in header["blocks"]]
        sizes = [int(np.prod(s)) for s in shapes]
        if header["format"] == "raw":
            flat = np.frombuffer(data.read_bytes(), dtype="<f8")
        else:
            with open(data, newline="") as fh:
                flat = np.array([float(x) for row in csv.reader(fh) for x in row])
        if flat.size != sum(sizes):
            raise ArtifactError(f"{data}: expected {sum(sizes)} values, found {flat.size}")
        arrays, start = [], 0
        for s, k in zip(shapes, sizes):
            arrays.append(flat[start : start + k].reshape(s).astype(float))
            start += k
        mesh = Mesh(header["nx"], header["ny"])
        if header["kind"] == "scalar":
            field = ScalarField(mesh, arrays[0], arrays[1])
        elif header["kind"] == "vector":
            field = VectorField(mesh, arrays[0], arrays[1])
        else:
            raise ArtifactError(f"{path}: unknown field kind {header['kind']!r}")
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ArtifactError(f"malformed snapshot {path}: {exc}") from exc
    except OSError as exc:
        raise ArtifactError(f"cannot read snapshot {path}: {exc}") from exc
    return field, float(header.get("time", 0.0))
