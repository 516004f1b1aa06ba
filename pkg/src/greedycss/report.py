"""Report documents: JSON with every float written to 17 significant digits.

Non-finite floats (an infinite condition number, say) are written as the
strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .matcore import _atomic_write, format_float

SCHEMA_VERSION = 1
TIMING_KEYS = ("wall_time", "timings")


def _scalar(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format_float(x)
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_scalar(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    return _scalar(obj)


def write_report(obj, path) -> None:
    _atomic_write(path, dumps(obj) + "\n")


def load_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def strip_timing(obj):
    """Copy of a report tree without wall-clock fields."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


_number = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}
_index_list = {"type": "array", "items": {"type": "integer", "minimum": 0}}

SELECTION_SCHEMA = {
    "type": "object",
    "required": ["method", "chosen", "coverage_trace", "final_coverage", "coverage_ratio",
                 "gain_evaluations", "wall_time", "seed"],
    "properties": {
        "method": {"type": "string"},
        "chosen": _index_list,
        "coverage_trace": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "final_coverage": {"type": "number", "minimum": 0},
        "coverage_ratio": {"type": "number", "minimum": 0, "maximum": 1 + 1e-10},
        "gain_evaluations": {"type": "integer", "minimum": 0},
        "wall_time": {"type": "number", "minimum": 0},
        "seed": {"type": ["integer", "null"]},
        "params": {"type": "object"},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["matrix_path", "method"],
    "properties": {
        "matrix_path": {"type": "string"},
        "candidates_path": {"type": ["string", "null"]},
        "method": {"enum": ["greedy", "lazier", "dist", "random"]},
        "k": {"type": ["integer", "null"], "minimum": 1},
        "r": {"type": ["integer", "null"], "minimum": 1},
        "delta": {"type": ["number", "null"]},
        "machines": {"type": ["integer", "null"], "minimum": 1},
        "k_prime": {"type": ["integer", "null"], "minimum": 1},
        "k_dprime": {"type": ["integer", "null"], "minimum": 1},
        "epochs": {"type": ["integer", "null"], "minimum": 1},
        "sketch_rows": {"type": ["integer", "string", "null"]},
        "pcps_cols": {"type": ["integer", "string", "null"]},
        "epsilon": {"type": ["number", "null"]},
        "seed": {"type": "integer"},
        "workers": {"type": ["integer", "null"]},
        "output_path": {"type": ["string", "null"]},
    },
}

RUN_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "greedycss run report",
    "type": "object",
    "required": ["schema_version", "kind", "version", "config", "result", "coverage_ratio",
                 "frobenius_sq_A", "timings"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"const": "select"},
        "version": {"type": "string"},
        "config": CONFIG_SCHEMA,
        "resolved": {"type": "object"},
        "result": SELECTION_SCHEMA,
        "dist": {"type": ["object", "null"]},
        "coverage_ratio": {"type": "number", "minimum": 0, "maximum": 1 + 1e-10},
        "frobenius_sq_A": {"type": "number", "minimum": 0},
        "timings": {
            "type": "object",
            "required": ["load", "sketch", "select", "evaluate"],
            "additionalProperties": {"type": "number", "minimum": 0},
        },
    },
}

BENCH_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "greedycss bench report",
    "type": "object",
    "required": ["schema_version", "kind", "version", "suite", "seed", "trials", "cases",
                 "n_cases", "n_passed", "passed"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"const": "bench"},
        "suite": {"type": "string"},
        "seed": {"type": "integer"},
        "trials": {"type": ["integer", "null"]},
        "passed": {"type": "boolean"},
        "cases": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["case", "passed", "measured", "bound", "margin"],
                "properties": {
                    "case": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "measured": _number,
                    "bound": _number,
                    "margin": _number,
                },
            },
        },
    },
}
