"""
Segmentation-guided U-shape network
The decoder emits the disc probability map; an auxiliary branch from the
saddle layer emits the glaucoma probability. The two heads train in
separate phases.
"""

from typing import List, Tuple

from autograd import Tensor, activate, flatten, pool, upsample_concat
from utils.errors import ParameterError

from .blocks import ParameterFactory, conv_unit, dense_unit
from .config import StreamConfig
from .model import StreamModel

SEGMENTATION_GROUPS = ("encoder", "decoder", "map_head")
CLASSIFIER_GROUPS = ("aux",)


def build_seg_guided(config: StreamConfig, seed: int = 0) -> StreamModel:
    """
    Build encoder, decoder with skip concatenations, 1x1 sigmoid map head and auxiliary branch.

    The auxiliary branch is global average pooling, then dense C -> C/4 with
    relu, then dense C/4 -> 1 with sigmoid, where C is the saddle width.

    Raises:
        ParameterError: config.kind is not seg_guided
    """
    if config.kind != "seg_guided":
        raise ParameterError(f"build_seg_guided needs kind 'seg_guided', got '{config.kind}'")

    factory = ParameterFactory(seed)
    affine = config.channel_affine
    base = config.base_channels

    def unit(prefix, out_c, in_c, group):
        factory.conv(prefix, out_c, in_c, 3, group, bias=not affine, affine=affine)

    unit("enc0.conv_a", base, config.input_channels, "encoder")
    unit("enc0.conv_b", base, base, "encoder")
    for stage in range(1, config.depth + 1):
        width = base * 2 ** stage
        unit(f"enc{stage}.conv_a", width, width // 2, "encoder")
        unit(f"enc{stage}.conv_b", width, width, "encoder")

    for stage in reversed(range(config.depth)):
        width = base * 2 ** stage
        unit(f"dec{stage}.conv_a", width, 3 * width, "decoder")
        unit(f"dec{stage}.conv_b", width, width, "decoder")

    factory.conv("map_head", 1, base, 1, "map_head", bias=True, affine=False)

    saddle = config.saddle_channels
    factory.dense("aux.fc1", saddle // 4, saddle, "aux")
    factory.dense("aux.fc2", 1, saddle // 4, "aux")
    return StreamModel(config, factory.parameters, factory.groups)


def encode(model: StreamModel, x: Tensor) -> Tuple[Tensor, List[Tensor]]:
    """Saddle feature map and the skip maps from full resolution downwards."""
    x = conv_unit(model, "enc0.conv_a", x)
    x = conv_unit(model, "enc0.conv_b", x)
    skips = [x]
    for stage in range(1, model.config.depth + 1):
        x = conv_unit(model, f"enc{stage}.conv_a", x, stride=2)
        x = conv_unit(model, f"enc{stage}.conv_b", x)
        skips.append(x)
    return skips.pop(), skips


def decode(model: StreamModel, saddle: Tensor, skips: List[Tensor]) -> Tensor:
    """Disc probability map [1, side, side]."""
    x = saddle
    for stage in reversed(range(model.config.depth)):
        x = upsample_concat(x, skips[stage])
        x = conv_unit(model, f"dec{stage}.conv_a", x)
        x = conv_unit(model, f"dec{stage}.conv_b", x)
    return activate(conv_unit(model, "map_head", x, relu=False), "sigmoid")


def auxiliary_branch(model: StreamModel, saddle: Tensor) -> Tensor:
    """Glaucoma probability [1] from the saddle features."""
    h = flatten(pool(saddle, "global_average"))
    h = activate(dense_unit(model, "aux.fc1", h), "relu")
    return activate(dense_unit(model, "aux.fc2", h), "sigmoid")


def seg_guided_forward(model: StreamModel, x: Tensor) -> Tuple[Tensor, Tensor]:
    """(disc map, glaucoma probability) for one [C, side, side] input."""
    saddle, skips = encode(model, x)
    return decode(model, saddle, skips), auxiliary_branch(model, saddle)
