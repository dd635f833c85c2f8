"""
Parameters and the momentum SGD optimizer
"""

from typing import Iterable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from utils.errors import StateError

from .tensor import Tensor


class Parameter:
    """
    A named, optionally frozen weight tensor.

    Frozen parameters (trainable=False) never receive gradients and are never
    written by sgd_step.
    """

    def __init__(self, data: np.ndarray, trainable: bool = True, name: str = ""):
        self.tensor = data if isinstance(data, Tensor) else Tensor(data)
        self.name = name
        self.velocity: Optional[np.ndarray] = None
        self.trainable = trainable

    @property
    def trainable(self) -> bool:
        return self._trainable

    @trainable.setter
    def trainable(self, value: bool) -> None:
        self._trainable = bool(value)
        self.tensor.requires_grad = self._trainable

    @property
    def data(self) -> np.ndarray:
        return self.tensor.data

    @property
    def grad(self) -> Optional[np.ndarray]:
        return self.tensor.grad

    def zero_grad(self) -> None:
        self.tensor.grad = None

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.data.shape}, trainable={self.trainable})"


class SgdConfig(BaseModel):
    """Momentum SGD with a per-epoch multiplicative learning-rate decay."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = Field(1e-4, gt=0, description="Initial learning rate")
    momentum: float = Field(0.9, ge=0, lt=1)
    decay: float = Field(0.9, gt=0, le=1, description="Learning-rate factor applied per epoch")

    def rate_at(self, epoch: int) -> float:
        """Effective learning rate for a zero-based epoch; non-increasing in epoch."""
        return self.learning_rate * self.decay ** max(epoch, 0)


def sgd_step(params: Iterable[Parameter], config: SgdConfig, epoch: int = 0) -> None:
    """
    Apply one momentum step and clear all gradients.

    v <- momentum * v - lr * grad ; data <- data + v

    Raises:
        StateError: A trainable parameter has no gradient, or its storage is read-only
    """
    params = list(params)
    missing: List[str] = [p.name or repr(p) for p in params if p.trainable and p.grad is None]
    if missing:
        raise StateError(f"sgd_step: no gradient for trainable parameter(s): {', '.join(missing)}")

    rate = config.rate_at(epoch)
    for param in params:
        if param.trainable:
            if not param.data.flags.writeable:
                raise StateError(f"parameter '{param.name}' is finalized for inference")
            if param.velocity is None:
                param.velocity = np.zeros_like(param.data)
            param.velocity *= config.momentum
            param.velocity -= rate * param.grad
            np.add(param.data, param.velocity, out=param.data)
        param.zero_grad()
