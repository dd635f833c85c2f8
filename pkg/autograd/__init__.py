"""Differentiable tensor core: layer primitives, losses and the SGD optimizer."""

from .tensor import (
    Tensor,
    Function,
    as_tensor,
    no_grad,
    is_grad_enabled,
)
from .functional import (
    conv2d,
    activate,
    pool,
    dense,
    upsample_concat,
    channel_affine,
    add,
    flatten,
    conv_output_side,
)
from .optim import (
    Parameter,
    SgdConfig,
    sgd_step,
)
from .initializers import glorot_uniform
from .losses import (
    SegPair,
    bce_loss,
    dice_loss,
    dice_gradient,
    dice_overlap,
)

__all__ = [
    # Tensor
    "Tensor",
    "Function",
    "as_tensor",
    "no_grad",
    "is_grad_enabled",
    # Layer primitives
    "conv2d",
    "activate",
    "pool",
    "dense",
    "upsample_concat",
    "channel_affine",
    "add",
    "flatten",
    "conv_output_side",
    # Optimization
    "Parameter",
    "SgdConfig",
    "sgd_step",
    "glorot_uniform",
    # Losses
    "SegPair",
    "bce_loss",
    "dice_loss",
    "dice_gradient",
    "dice_overlap",
]
