"""Deterministic artifact writers: 17 significant digits, sorted JSON keys, no timestamps."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    x = float(x)
    return format(x, ".17g") if math.isfinite(x) else ""


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path, header, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([fmt(a) for a in row])
