"""
Shared test helpers: central finite differences against reverse-mode gradients.
"""

from typing import Callable, List, Sequence

import numpy as np

from autograd import Tensor, no_grad


def numerical_gradient(loss: Callable[[], float], array: np.ndarray, eps: float = 1e-4) -> np.ndarray:
    """Central differences of loss() with respect to every entry of array (perturbed in place)."""
    grad = np.zeros_like(array)
    flat = array.reshape(-1)
    flat_grad = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + eps
        plus = loss()
        flat[i] = original - eps
        minus = loss()
        flat[i] = original
        flat_grad[i] = (plus - minus) / (2 * eps)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(analytic) + np.linalg.norm(numeric)), 1e-12)
    return float(np.linalg.norm(analytic - numeric)) / scale


def gradient_errors(fn: Callable[..., Tensor], arrays: Sequence[np.ndarray], seed: int = 0,
                    eps: float = 1e-4) -> List[float]:
    """
    Relative error between backprop and finite-difference gradients of sum(w * fn(*inputs)).

    w is a fixed random weighting so every output element contributes.
    """
    arrays = [np.array(a, dtype=np.float64) for a in arrays]
    leaves = [Tensor(a, requires_grad=True) for a in arrays]
    out = fn(*leaves)
    weights = np.random.default_rng(seed).standard_normal(out.shape)
    out.backward(weights)
    analytic = [leaf.grad.copy() for leaf in leaves]

    def loss() -> float:
        with no_grad():
            return float(np.sum(fn(*[Tensor(a) for a in arrays]).data * weights))

    return [relative_error(g, numerical_gradient(loss, a, eps)) for g, a in zip(analytic, arrays)]


def away_from_zero(array: np.ndarray, margin: float = 1e-3) -> np.ndarray:
    """Push entries out of (-margin, margin) so kinks at 0 stay outside the difference step."""
    array = np.array(array, dtype=np.float64)
    small = np.abs(array) < margin
    array[small] = np.where(array[small] < 0, -margin, margin) * 2
    return array
