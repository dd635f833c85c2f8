"""
Training losses
Binary cross entropy for classification heads, Dice coefficient loss for the
disc map, and the closed-form Dice gradient used to seed back-propagation.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from utils.errors import DegenerateInputError, DimensionError, ParameterError

from .tensor import Tensor

BCE_EPSILON = 1e-7


def bce_loss(prob: Tensor, label: int) -> Tensor:
    """
    -(y ln p + (1 - y) ln(1 - p)) with p clamped to [eps, 1 - eps].

    Args:
        prob: Single-element probability tensor
        label: 0 or 1

    Returns:
        Scalar loss tensor (differentiable w.r.t. prob)
    """
    if label not in (0, 1):
        raise ParameterError(f"bce label must be 0 or 1, got {label}")
    if prob.size != 1:
        raise DimensionError(f"bce_loss expects a single probability, got shape {prob.shape}")
    p = prob.clip(BCE_EPSILON, 1.0 - BCE_EPSILON).sum()
    if label == 1:
        return -p.log()
    return -(1.0 - p).log()


@dataclass(frozen=True)
class SegPair:
    """Predicted disc probabilities and the binary ground-truth mask."""

    predicted: Tensor
    truth: np.ndarray

    def __post_init__(self):
        predicted = self.predicted if isinstance(self.predicted, Tensor) else Tensor(self.predicted)
        truth = np.asarray(self.truth, dtype=predicted.dtype)
        if truth.shape != predicted.shape:
            raise DimensionError(f"prediction shape {predicted.shape} != truth shape {truth.shape}")
        if np.any((predicted.data < 0) | (predicted.data > 1)):
            raise ParameterError("predicted probabilities must lie in [0, 1]")
        if np.any((truth != 0) & (truth != 1)):
            raise ParameterError("ground-truth mask must be binary")
        object.__setattr__(self, "predicted", predicted)
        object.__setattr__(self, "truth", truth)


def _dice_terms(pair: SegPair):
    p = pair.predicted.data
    g = pair.truth
    overlap = float(np.sum(p * g))
    denominator = float(np.sum(p * p) + np.sum(g * g))
    if denominator == 0.0:
        raise DegenerateInputError("Dice loss undefined: prediction and truth are both empty")
    return overlap, denominator


def dice_loss(pair: SegPair) -> Tensor:
    """
    1 - 2 sum(p g) / (sum(p^2) + sum(g^2)).

    Built from differentiable primitives so autodiff yields its gradient.

    Raises:
        DegenerateInputError: Both prediction and truth are all zero
    """
    _dice_terms(pair)
    p = pair.predicted
    g = Tensor(pair.truth, requires_grad=False)
    overlap = (p * g).sum()
    denominator = (p * p).sum() + float(np.sum(pair.truth * pair.truth))
    return 1.0 - 2.0 * overlap / denominator


def dice_gradient(pair: SegPair) -> Tensor:
    """
    Closed-form dL/dp_i = (4 p_i sum(pg) - 2 g_i (sum(p^2) + sum(g^2))) / (sum(p^2) + sum(g^2))^2.
    """
    overlap, denominator = _dice_terms(pair)
    p = pair.predicted.data
    g = pair.truth
    grad = (4.0 * p * overlap - 2.0 * g * denominator) / (denominator * denominator)
    return Tensor(grad.astype(p.dtype, copy=False), requires_grad=False)


def dice_overlap(predicted: Union[np.ndarray, Tensor], truth: np.ndarray) -> float:
    """Dice overlap 2|P∩G| / (|P| + |G|) of two binary masks; 1.0 when both are empty."""
    if isinstance(predicted, Tensor):
        predicted = predicted.data
    p = np.asarray(predicted, dtype=bool)
    g = np.asarray(truth, dtype=bool)
    if p.shape != g.shape:
        raise DimensionError(f"mask shapes differ: {p.shape} vs {g.shape}")
    total = int(p.sum()) + int(g.sum())
    if total == 0:
        return 1.0
    return 2.0 * int(np.logical_and(p, g).sum()) / total
