"""
Parameter factory and the conv/dense units both architectures are built from
"""

from typing import Dict, List

import numpy as np

from autograd import (
    Parameter,
    Tensor,
    activate,
    channel_affine,
    conv2d,
    dense,
    glorot_uniform,
)

from .model import StreamModel


class ParameterFactory:
    """Creates named, grouped, Glorot-initialized float32 parameters in build order."""

    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)
        self.parameters: List[Parameter] = []
        self.groups: Dict[str, str] = {}

    def _add(self, name: str, data: np.ndarray, group: str) -> None:
        self.parameters.append(Parameter(data.astype(np.float32), name=name))
        self.groups[name] = group

    def conv(self, prefix: str, out_channels: int, in_channels: int, kernel: int,
             group: str, bias: bool, affine: bool) -> None:
        self._add(f"{prefix}.weight", glorot_uniform((out_channels, in_channels, kernel, kernel), self.rng), group)
        if bias:
            self._add(f"{prefix}.bias", np.zeros(out_channels), group)
        if affine:
            self._add(f"{prefix}.scale", np.ones(out_channels), group)
            self._add(f"{prefix}.shift", np.zeros(out_channels), group)

    def dense(self, prefix: str, out_features: int, in_features: int, group: str) -> None:
        self._add(f"{prefix}.weight", glorot_uniform((out_features, in_features), self.rng), group)
        self._add(f"{prefix}.bias", np.zeros(out_features), group)


def conv_unit(model: StreamModel, prefix: str, x: Tensor, stride: int = 1,
              relu: bool = True) -> Tensor:
    """conv (+bias) (+channel affine) (+relu), padding keeping side / stride."""
    params = model.parameters
    weights = params[f"{prefix}.weight"].tensor
    bias = params.get(f"{prefix}.bias")
    out = conv2d(x, weights, bias.tensor if bias else None,
                 stride=stride, padding=weights.shape[2] // 2)
    scale = params.get(f"{prefix}.scale")
    if scale is not None:
        out = channel_affine(out, scale.tensor, params[f"{prefix}.shift"].tensor)
    return activate(out, "relu") if relu else out


def dense_unit(model: StreamModel, prefix: str, x: Tensor) -> Tensor:
    params = model.parameters
    return dense(x, params[f"{prefix}.weight"].tensor, params[f"{prefix}.bias"].tensor)
