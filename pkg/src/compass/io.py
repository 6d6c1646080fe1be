"""Serialization and file ingestion.

JSON output is canonical: keys sorted, floats rendered with 17 significant
digits (which round-trips IEEE doubles exactly), so identical inputs give
byte-identical report files.  All writes are atomic (temp file in the same
directory, then rename).  Loaders accept the documented JSON/CSV layouts
and raise InputError subclasses with the offending detail on bad content.
"""
from __future__ import annotations

import csv
import hashlib
import io as _stdio
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .cones_products import ConePoint
from .errors import InputError
from .finite_metric import DistanceMatrix, from_graph, validate_metric
from .jacobi_riccati import CurvatureProfile
from .lattice_short_basis import Lattice
from .semiconcave_flow import PiecewiseMinFunction, load_function

VERSION = "0.1.0"


def format_float(x: float) -> str:
    """Canonical float text: 17 significant digits, full round-trip."""
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, canonical float rendering,
    non-finite floats as quoted strings."""
    out = _stdio.StringIO()
    _write_json(obj, out)
    out.write("\n")
    return out.getvalue()


def _write_json(obj, out) -> None:
    if obj is None:
        out.write("null")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.write("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            out.write(format_float(x))
        else:
            out.write(json.dumps(format_float(x)))
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    elif isinstance(obj, dict):
        out.write("{")
        for i, key in enumerate(sorted(obj, key=str)):
            if i:
                out.write(",")
            out.write(json.dumps(str(key)))
            out.write(":")
            _write_json(obj[key], out)
        out.write("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        out.write("[")
        for i, item in enumerate(seq):
            if i:
                out.write(",")
            _write_json(item, out)
        out.write("]")
    elif hasattr(obj, "to_dict"):
        _write_json(obj.to_dict(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str | Path, data: str | bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json(path: str | Path, obj) -> None:
    write_atomic(path, canonical_json(obj))


def write_csv(path: str | Path, header: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    """CSV with canonical float rendering, written atomically."""
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, (float, np.floating))
                         else v for v in row])
    write_atomic(path, buf.getvalue())


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def report_envelope(payload, *, tolerance, inputs: dict[str, str],
                    command: str, seed: int | None = None) -> dict:
    """Standard wrapper: every report embeds the tool version, tolerance,
    and a sha256 digest of each input file."""
    return {
        "tool": "compass",
        "version": VERSION,
        "command": command,
        "tolerance": tolerance,
        "seed": seed,
        "inputs": inputs,
        "report": payload,
    }


def _load_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc


def _require(data: dict, key: str, path: Path):
    if key not in data:
        raise InputError(f"{path}: missing required key {key!r}")
    return data[key]


def load_matrix(path: str | Path) -> DistanceMatrix:
    """Distance matrix from JSON {labels, d} or CSV (label header row)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    if path.suffix.lower() == ".csv":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if len(rows) < 2:
            raise InputError(f"{path}: need a label row plus a square matrix")
        labels = rows[0]
        try:
            d = [[float(v) for v in row] for row in rows[1:]]
        except ValueError as exc:
            raise InputError(f"{path}: non-numeric matrix entry ({exc})") from exc
        return validate_metric(labels, d)
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return validate_metric(_require(data, "labels", path), _require(data, "d", path))


def load_graph(path: str | Path) -> DistanceMatrix:
    """Shortest-path metric from graph JSON {vertices, edges: [[u, v, w]]}."""
    path = Path(path)
    data = _load_json(path)
    vertices = _require(data, "vertices", path)
    edges = _require(data, "edges", path)
    try:
        edges = [(u, v, float(w)) for u, v, w in edges]
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: edges must be [u, v, weight] triples") from exc
    return from_graph(vertices, edges)


def load_space(path: str | Path) -> DistanceMatrix:
    """Matrix or graph input, dispatched on content: CSV and JSON with a
    "d" key load as matrices, JSON with an "edges" key as graphs."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    if path.suffix.lower() == ".csv":
        return load_matrix(path)
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    if "d" in data:
        return validate_metric(_require(data, "labels", path), data["d"])
    if "edges" in data:
        return load_graph(path)
    raise InputError(f"{path}: neither a matrix (\"d\") nor a graph (\"edges\")")


def load_lattice(path: str | Path) -> Lattice:
    path = Path(path)
    data = _load_json(path)
    basis = _require(data, "basis", path)
    try:
        return Lattice(np.array(basis, dtype=float))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad basis ({exc})") from exc


def load_min_function(path: str | Path) -> PiecewiseMinFunction:
    path = Path(path)
    data = _load_json(path)
    if "branches" not in data:
        raise InputError(f"{path}: missing required key 'branches'")
    try:
        return load_function(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad function spec ({exc})") from exc


def load_profile_csv(path: str | Path, horizon: float | None = None) -> CurvatureProfile:
    """Curvature profile from two-column CSV (t, kappa); an optional
    non-numeric header row is skipped."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    ts: list[float] = []
    ks: list[float] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                t, k = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not ts:
                    continue  # header row
                raise InputError(f"{path}: bad profile row {row!r}")
            ts.append(t)
            ks.append(k)
    if len(ts) < 2:
        raise InputError(f"{path}: need at least two (t, kappa) samples")
    return CurvatureProfile.from_samples(ts, ks)


def load_cone_points(path: str | Path) -> list[ConePoint]:
    path = Path(path)
    data = _load_json(path)
    pts = _require(data, "points", path)
    try:
        return [ConePoint(int(p["dir"]), float(p["r"])) for p in pts]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad cone point list ({exc})") from exc


def matrix_to_dict(m: DistanceMatrix) -> dict:
    return {"labels": list(m.labels), "d": m.d.tolist()}
