"""File formats and canonical serialization.

All reports are JSON with keys sorted, two-space indentation, a trailing
newline, and every float rounded to 12 significant digits before encoding —
so a report is byte-for-byte reproducible across runs and platforms, and
re-serializing a parsed report is the identity.

Channel files hold the transition tensor row-major as nested lists::

    {"x1_size": 4, "x2_size": 2, "y_size": 12,
     "transition": [[[...y...], ...x2...], ...x1...],
     "y_factorized": [6, 2]}            # optional output-split metadata

Joint-input files are ``{"kind": "joint", "probs": [[...]]}``; word-level
conditioned distributions (for coordinate extraction) carry their shape::

    {"kind": "conditioned_words", "n": 3, "x1_size": 2, "x2_size": 2,
     "weights": [...], "conditionals": [[...], ...]}
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .errors import ValidationError
from .mac import DiscreteMac, validate_mac
from .measures import ConditionedJoint, JointPmf

__all__ = [
    "FORMAT_VERSION",
    "round_floats",
    "canonical_json",
    "write_json",
    "read_json",
    "write_sigma_csv",
    "save_mac",
    "load_mac",
    "save_joint",
    "load_joint",
    "save_word_distribution",
    "load_word_distribution",
]

FORMAT_VERSION = 1


def round_floats(obj):
    """Recursively convert numpy scalars/arrays and round floats to 12 digits."""
    if isinstance(obj, dict):
        return {str(k): round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return float(f"{x:.12g}")
        return x
    return obj


def canonical_json(obj) -> str:
    return json.dumps(round_floats(obj), sort_keys=True, indent=2) + "\n"


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(canonical_json(obj))


def read_json(path: str):
    with open(path, "r", encoding="ascii") as fh:
        return json.load(fh)


def write_sigma_csv(path: str, rows) -> None:
    """Rows of (delta, value, slack, restarts) under a fixed header."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["delta", "value", "slack", "restarts"])
        for delta, value, slack, restarts in rows:
            writer.writerow(
                [f"{float(delta):.12g}", f"{float(value):.12g}", f"{float(slack):.12g}", int(restarts)]
            )


def save_mac(path: str, mac: DiscreteMac) -> None:
    doc = {
        "x1_size": mac.x1_size,
        "x2_size": mac.x2_size,
        "y_size": mac.y_size,
        "transition": mac.transition,
    }
    if mac.y_split is not None:
        doc["y_factorized"] = list(mac.y_split)
    write_json(path, doc)


def load_mac(path: str) -> DiscreteMac:
    doc = read_json(path)
    for key in ("x1_size", "x2_size", "y_size", "transition"):
        if key not in doc:
            raise ValidationError(f"channel file is missing {key!r}")
    t = np.asarray(doc["transition"], dtype=np.float64)
    expected = (int(doc["x1_size"]), int(doc["x2_size"]), int(doc["y_size"]))
    if t.shape != expected:
        raise ValidationError(f"transition shape {t.shape} does not match sizes {expected}")
    y_split = tuple(int(v) for v in doc["y_factorized"]) if "y_factorized" in doc else None
    return validate_mac(t, y_split=y_split)


def save_joint(path: str, joint: JointPmf) -> None:
    write_json(path, {"kind": "joint", "probs": joint.probs})


def load_joint(path: str) -> JointPmf:
    doc = read_json(path)
    if doc.get("kind") != "joint" or "probs" not in doc:
        raise ValidationError("expected a joint-distribution file")
    return JointPmf(np.asarray(doc["probs"], dtype=np.float64))


def save_word_distribution(
    path: str, cj: ConditionedJoint, n: int, x1_size: int, x2_size: int
) -> None:
    write_json(
        path,
        {
            "kind": "conditioned_words",
            "n": int(n),
            "x1_size": int(x1_size),
            "x2_size": int(x2_size),
            "weights": cj.weights,
            "conditionals": cj.conditionals,
        },
    )


def load_word_distribution(path: str) -> tuple[ConditionedJoint, int, int, int]:
    doc = read_json(path)
    if doc.get("kind") != "conditioned_words":
        raise ValidationError("expected a conditioned word-distribution file")
    for key in ("n", "x1_size", "x2_size", "weights", "conditionals"):
        if key not in doc:
            raise ValidationError(f"word-distribution file is missing {key!r}")
    n = int(doc["n"])
    s1 = int(doc["x1_size"])
    s2 = int(doc["x2_size"])
    cj = ConditionedJoint(
        np.asarray(doc["weights"], dtype=np.float64),
        np.asarray(doc["conditionals"], dtype=np.float64),
    )
    if cj.conditionals.shape[1:] != (s1**n, s2**n):
        raise ValidationError("conditionals do not match the declared word shape")
    return cj, n, s1, s2
