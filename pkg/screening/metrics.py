"""
Screening metrics
Confusion counts, Sensitivity/Specificity/Balanced Accuracy, the empirical
ROC curve, its AUC, the max-BAcc operating point and the best specificity
at a sensitivity floor. Counts stay integral throughout so AUC equals the
pairwise statistic exactly.
"""

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from utils.errors import InputError, MetricError, ParameterError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise InputError(f"confusion counts must be non-negative: {self}")

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.tn + self.fp


def _validate(scores: Sequence[float], labels: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise InputError(f"{len(s)} scores but {len(y)} labels")
    if not np.all(np.isin(y, (0, 1))):
        raise InputError("labels must be 0 or 1")
    if not np.all(np.isfinite(s)):
        raise InputError("scores must be finite")
    return s, y.astype(np.int64)


def confusion(scores: Sequence[float], labels: Sequence[int], threshold: float) -> ConfusionCounts:
    """Counts with positive prediction iff score >= threshold."""
    s, y = _validate(scores, labels)
    predicted = s >= threshold
    positive = y == 1
    return ConfusionCounts(
        tp=int(np.sum(predicted & positive)),
        tn=int(np.sum(~predicted & ~positive)),
        fp=int(np.sum(predicted & ~positive)),
        fn=int(np.sum(~predicted & positive)),
    )


def sen_spe_bacc(c: ConfusionCounts) -> Tuple[float, float, float]:
    """
    Sen = TP/(TP+FN), Spe = TN/(TN+FP), BAcc = (Sen+Spe)/2.

    Raises:
        MetricError: Either class is absent
    """
    if c.positives == 0 or c.negatives == 0:
        raise MetricError("sensitivity/specificity need both classes present")
    sen = c.tp / c.positives
    spe = c.tn / c.negatives
    return sen, spe, (sen + spe) / 2


class OperatingPoint(NamedTuple):
    threshold: float
    sensitivity: float
    specificity: float
    bacc: float


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    tp: int
    tn: int


@dataclass(frozen=True)
class RocCurve:
    """
    Operating points by strictly decreasing threshold.

    The first point is the +inf sentinel (Sen 0, Spe 1); the last, at the
    lowest score, predicts everything positive (Sen 1, Spe 0).
    """

    points: Tuple[RocPoint, ...]
    positives: int
    negatives: int

    def sensitivity(self, point: RocPoint) -> float:
        return point.tp / self.positives

    def specificity(self, point: RocPoint) -> float:
        return point.tn / self.negatives

    def operating_point(self, point: RocPoint) -> OperatingPoint:
        sen = self.sensitivity(point)
        spe = self.specificity(point)
        return OperatingPoint(point.threshold, sen, spe, (sen + spe) / 2)

    def rows(self) -> List[Tuple[float, float, float]]:
        """(threshold, sensitivity, specificity) triples."""
        return [(p.threshold, self.sensitivity(p), self.specificity(p)) for p in self.points]

    def __len__(self) -> int:
        return len(self.points)


def roc_curve(scores: Sequence[float], labels: Sequence[int]) -> RocCurve:
    """
    One operating point per distinct score (descending) after the +inf sentinel.

    Raises:
        MetricError: Fewer than two classes
    """
    s, y = _validate(scores, labels)
    positives = int(y.sum())
    negatives = int(len(y) - positives)
    if positives == 0 or negatives == 0:
        raise MetricError("ROC curve needs both classes present")

    thresholds, inverse = np.unique(s, return_inverse=True)
    pos_at = np.bincount(inverse, weights=y, minlength=len(thresholds)).astype(np.int64)
    neg_at = np.bincount(inverse, weights=1 - y, minlength=len(thresholds)).astype(np.int64)

    points = [RocPoint(math.inf, 0, negatives)]
    tp = 0
    fp = 0
    for index in range(len(thresholds) - 1, -1, -1):
        tp += int(pos_at[index])
        fp += int(neg_at[index])
        points.append(RocPoint(float(thresholds[index]), tp, negatives - fp))
    return RocCurve(tuple(points), positives, negatives)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under (1 - Spe, Sen), computed on integer counts."""
    doubled = 0
    previous = curve.points[0]
    for point in curve.points[1:]:
        # (fp_i - fp_{i-1}) * (tp_i + tp_{i-1}) with fp = N - tn
        doubled += (previous.tn - point.tn) * (point.tp + previous.tp)
        previous = point
    return doubled / (2 * curve.positives * curve.negatives)


def pairwise_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """P(score_pos > score_neg) + 0.5 P(tie), by comparing every pair."""
    s, y = _validate(scores, labels)
    pos = s[y == 1]
    neg = s[y == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise MetricError("AUC needs both classes present")
    greater = int(np.sum(pos[:, None] > neg[None, :]))
    ties = int(np.sum(pos[:, None] == neg[None, :]))
    return (2 * greater + ties) / (2 * len(pos) * len(neg))


def best_bacc_point(curve: RocCurve) -> OperatingPoint:
    """Operating point of maximal balanced accuracy; ties go to the higher sensitivity."""
    best = max(
        curve.points,
        key=lambda p: (p.tp * curve.negatives + p.tn * curve.positives, p.tp),
    )
    return curve.operating_point(best)


def spe_at_sensitivity(curve: RocCurve, floor: float = 0.95) -> OperatingPoint:
    """
    Best specificity among points with Sen >= floor.

    Among equally specific points the least achieved sensitivity is reported,
    and BAcc uses the achieved (not the requested) sensitivity.
    """
    if not 0 < floor <= 1:
        raise ParameterError(f"sensitivity floor must be in (0, 1], got {floor}")
    needed = math.ceil(floor * curve.positives - 1e-9)
    eligible = [p for p in curve.points if p.tp >= needed]
    best = max(eligible, key=lambda p: (p.tn, -p.tp))
    return curve.operating_point(best)


@dataclass(frozen=True)
class MetricSummary:
    """AUC plus the max-BAcc operating point of one score set."""

    auc: float
    threshold: float
    sensitivity: float
    specificity: float
    bacc: float


def summarize(scores: Sequence[float], labels: Sequence[int]) -> MetricSummary:
    curve = roc_curve(scores, labels)
    point = best_bacc_point(curve)
    return MetricSummary(
        auc=auc(curve),
        threshold=point.threshold,
        sensitivity=point.sensitivity,
        specificity=point.specificity,
        bacc=point.bacc,
    )
