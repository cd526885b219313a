"""Serialization: CSV matrices/tables with JSON sidecars, atomic writes.

CSV files are RFC-4180 style (header row, comma separator, '.' decimal
point).  JSON is emitted with sorted keys so identical inputs produce
byte-identical reports.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os

import numpy as np

from .bv_scalar import GridField, IndicatorSet
from .curves import PolylineCurve


def atomic_write_text(path, text):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", newline="") as f:
        f.write(text)
    os.replace(tmp, path)


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def config_hash(cfg):
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()


def write_json(path, obj):
    atomic_write_text(path, canonical_json(obj))


def write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    atomic_write_text(path, buf.getvalue())


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _sidecar(path):
    return os.path.splitext(path)[0] + ".json"


def save_curve(path, curve):
    write_csv(path, ("x", "y"), curve.points)
    meta = {"closed": bool(curve.closed)}
    if curve.params is not None:
        meta["params"] = [float(t) for t in curve.params]
    write_json(_sidecar(path), meta)


def load_curve(path):
    pts = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with open(_sidecar(path)) as f:
        meta = json.load(f)
    params = meta.get("params")
    return PolylineCurve(pts, closed=meta.get("closed", False),
                         params=None if params is None else np.asarray(params))


def save_grid(path, field):
    values = field.mask.astype(float) if isinstance(field, IndicatorSet) else field.values
    buf = io.StringIO()
    np.savetxt(buf, values, delimiter=",")
    atomic_write_text(path, buf.getvalue())
    write_json(_sidecar(path), {
        "origin": [float(field.origin[0]), float(field.origin[1])],
        "spacing": float(field.spacing),
        "kind": "indicator" if isinstance(field, IndicatorSet) else "field",
    })


def load_grid(path):
    values = np.loadtxt(path, delimiter=",", ndmin=2)
    with open(_sidecar(path)) as f:
        meta = json.load(f)
    origin = tuple(meta["origin"])
    spacing = float(meta["spacing"])
    if meta.get("kind") == "indicator":
        return IndicatorSet(values > 0.5, origin, spacing)
    return GridField(values, origin, spacing)


def save_cover(path, cover):
    rows = [(cx, cy, r) for (cx, cy), r in zip(cover.centers, cover.radii)]
    write_csv(path, ("cx", "cy", "r"), rows)
