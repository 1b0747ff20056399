"""Deterministic serialization helpers shared by the exporters and the CLI."""

import json
import math
from importlib import resources

import numpy as np


def fmt(x):
    """12 significant digits, scientific notation, locale independent."""
    return format(float(x), ".11e")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    x = float(obj)
    if not math.isfinite(x):
        return None
    return float(fmt(x))


def dumps(record):
    return json.dumps(_clean(record), indent=2, sort_keys=True) + "\n"


def write_json(record, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(record))


def load_schema(name):
    """Published JSON schema ``name`` (e.g. ``"trajectory"``)."""
    text = resources.files("coupledstore").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)
