"""Confusion-matrix evaluation; flood is the positive class.

F1 here is positive-class F1 (not macro), and is defined as 0 when
precision + recall is 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..corpus import Label
from ..errors import DataError


@dataclass(frozen=True)
class EvalMetrics:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0


def evaluate(predictions: Mapping[str, Label], gold: Mapping[str, Label]) -> EvalMetrics:
    if set(predictions) != set(gold):
        only_pred = sorted(set(predictions) - set(gold))[:3]
        only_gold = sorted(set(gold) - set(predictions))[:3]
        raise DataError(
            f"prediction/gold id mismatch (extra predictions: {only_pred}, "
            f"missing predictions: {only_gold})"
        )
    tp = fp = fn = tn = 0
    for article_id, truth in gold.items():
        predicted = predictions[article_id]
        if truth is Label.FLOOD:
            if predicted is Label.FLOOD:
                tp += 1
            else:
                fn += 1
        else:
            if predicted is Label.FLOOD:
                fp += 1
            else:
                tn += 1
    return EvalMetrics(tp=tp, fp=fp, fn=fn, tn=tn)
