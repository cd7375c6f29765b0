"""Binary confusion matrix and the derived percentage metrics.

Positive class is attack (label 1). Precision, recall, F1 and accuracy are
returned as percentages in [0, 100]; any 0/0 denominator yields 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LabelError, ShapeError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise LabelError(f"{name} must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(predicted, actual) -> ConfusionMatrix:
    pred = np.asarray(predicted).reshape(-1).astype(int)
    act = np.asarray(actual).reshape(-1).astype(int)
    if pred.shape[0] != act.shape[0]:
        raise ShapeError(f"{pred.shape[0]} predictions vs {act.shape[0]} labels")
    for v in (pred, act):
        bad = set(np.unique(v)) - {0, 1}
        if bad:
            raise LabelError(f"labels must be 0/1, found {sorted(bad)}")
    return ConfusionMatrix(
        tp=int(((pred == 1) & (act == 1)).sum()),
        tn=int(((pred == 0) & (act == 0)).sum()),
        fp=int(((pred == 1) & (act == 0)).sum()),
        fn=int(((pred == 0) & (act == 1)).sum()),
    )


def _pct(numerator: float, denominator: float) -> float:
    if denominator == 0:
        return 0.0
    return 100.0 * numerator / denominator


def precision(cm: ConfusionMatrix) -> float:
    return _pct(cm.tp, cm.tp + cm.fp)


def recall(cm: ConfusionMatrix) -> float:
    return _pct(cm.tp, cm.tp + cm.fn)


def f1(cm: ConfusionMatrix) -> float:
    p = precision(cm)
    r = recall(cm)
    if p + r == 0:
        return 0.0
    return 2.0 * p * r / (p + r)


def accuracy(cm: ConfusionMatrix) -> float:
    return _pct(cm.tp + cm.tn, cm.total)


def summarize(cm: ConfusionMatrix) -> dict:
    return {
        "tp": cm.tp, "tn": cm.tn, "fp": cm.fp, "fn": cm.fn,
        "precision": precision(cm), "recall": recall(cm),
        "f1": f1(cm), "accuracy": accuracy(cm),
    }
