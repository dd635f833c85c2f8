"""
Residual classifier shared by the global, disc and polar streams
"""

from autograd import Tensor, activate, add, flatten, pool
from utils.errors import ParameterError

from .blocks import ParameterFactory, conv_unit, dense_unit
from .config import RESIDUAL_KINDS, StreamConfig
from .model import StreamModel


def build_residual_stream(config: StreamConfig, seed: int = 0) -> StreamModel:
    """
    Build `depth` stride-2 residual stages, global max pooling and a sigmoid dense head.

    Stage i has base * 2^i channels; each stage is two 3x3 conv units with a
    1x1 stride-2 projection shortcut.

    Raises:
        ParameterError: config.kind is not a residual stream
    """
    if config.kind not in RESIDUAL_KINDS:
        raise ParameterError(f"build_residual_stream needs one of {RESIDUAL_KINDS}, got '{config.kind}'")

    factory = ParameterFactory(seed)
    affine = config.channel_affine
    in_channels = config.input_channels
    for stage in range(config.depth):
        width = config.base_channels * 2 ** stage
        factory.conv(f"stage{stage}.conv_a", width, in_channels, 3, "encoder", bias=not affine, affine=affine)
        factory.conv(f"stage{stage}.conv_b", width, width, 3, "encoder", bias=not affine, affine=affine)
        factory.conv(f"stage{stage}.shortcut", width, in_channels, 1, "encoder", bias=True, affine=False)
        in_channels = width
    factory.dense("head", 1, in_channels, "head")
    return StreamModel(config, factory.parameters, factory.groups)


def residual_features(model: StreamModel, x: Tensor) -> Tensor:
    """Feature map after the last stage: [base * 2^(depth-1), side / 2^depth, side / 2^depth]."""
    for stage in range(model.config.depth):
        h = conv_unit(model, f"stage{stage}.conv_a", x, stride=2)
        h = conv_unit(model, f"stage{stage}.conv_b", h, relu=False)
        shortcut = conv_unit(model, f"stage{stage}.shortcut", x, stride=2, relu=False)
        x = activate(add(h, shortcut), "relu")
    return x


def residual_forward(model: StreamModel, x: Tensor) -> Tensor:
    """Glaucoma probability, shape [1]."""
    features = residual_features(model, x)
    pooled = flatten(pool(features, "global_max"))
    return activate(dense_unit(model, "head", pooled), "sigmoid")
