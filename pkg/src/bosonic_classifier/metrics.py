"""Binary classification metrics and decision-surface export.

Label 1 (outside the circle) is the positive class.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import circuit as circ
from .circuit import CircuitSpec
from .data import Dataset


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    @classmethod
    def from_labels(cls, y_true, y_pred) -> "ConfusionMatrix":
        t = np.asarray(y_true, dtype=int)
        p = np.asarray(y_pred, dtype=int)
        return cls(
            tp=int(np.sum((t == 1) & (p == 1))),
            fn=int(np.sum((t == 1) & (p == 0))),
            fp=int(np.sum((t == 0) & (p == 1))),
            tn=int(np.sum((t == 0) & (p == 0))),
        )


@dataclass(frozen=True)
class Rates:
    tpr: Optional[float]
    tnr: Optional[float]
    accuracy: Optional[float]

    @property
    def balanced_accuracy(self) -> Optional[float]:
        if self.tpr is None or self.tnr is None:
            return None
        return (self.tpr + self.tnr) / 2


def _ratio(num: int, den: int) -> Optional[float]:
    # undefined rather than zero when the class is absent
    return num / den if den > 0 else None


def rates(cm: ConfusionMatrix) -> Rates:
    return Rates(
        tpr=_ratio(cm.tp, cm.tp + cm.fn),
        tnr=_ratio(cm.tn, cm.tn + cm.fp),
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
    )


def evaluate(spec: CircuitSpec, theta, ds: Dataset) -> ConfusionMatrix:
    if len(ds) == 0:
        return ConfusionMatrix(0, 0, 0, 0)
    return ConfusionMatrix.from_labels(ds.y, circ.classify_batch(spec, theta, ds.X))


def metrics_dict(cm: ConfusionMatrix) -> dict:
    r = rates(cm)
    return {
        "tp": cm.tp,
        "fn": cm.fn,
        "fp": cm.fp,
        "tn": cm.tn,
        "total": cm.total,
        "tpr": r.tpr,
        "tnr": r.tnr,
        "accuracy": r.accuracy,
        "balanced_accuracy": r.balanced_accuracy,
    }


def decision_grid(spec: CircuitSpec, theta, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities on a ``resolution x resolution`` grid over the unit square.

    Returns ``(axis, P)`` where ``P[i, j]`` is the probability at
    ``x1 = axis[i], x2 = axis[j]``.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    if spec.feature_dim != 2:
        raise ValueError("decision grids need two features")
    axis = np.linspace(0.0, 1.0, resolution)
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    pts = np.column_stack([x1.ravel(), x2.ravel()])
    return axis, circ.forward_batch(spec, theta, pts).reshape(resolution, resolution)


def save_grid_csv(spec: CircuitSpec, axis: np.ndarray, P: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", "p", "label"])
        for i, a in enumerate(axis):
            for j, b in enumerate(axis):
                w.writerow([repr(float(a)), repr(float(b)), repr(float(P[i, j])), int(P[i, j] > spec.threshold)])
