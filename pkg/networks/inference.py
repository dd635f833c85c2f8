"""
Prediction with trained stream models
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from autograd import Tensor, no_grad
from imaging import ImageBuffer, resize_array
from utils.errors import DimensionError, ParameterError

from .config import StreamConfig
from .model import StreamModel
from .residual import residual_forward
from .seg_guided import decode, encode, seg_guided_forward


@dataclass(frozen=True)
class SegGuidedOutput:
    """Disc probability map [1, side, side] and the auxiliary glaucoma probability."""

    disc_map: np.ndarray
    glaucoma_prob: float


def network_input(image: ImageBuffer, config: StreamConfig) -> np.ndarray:
    """Raw [0, 1] pixels resized to the stream's input side, channel-first float32."""
    pixels = image.pixels
    if pixels.shape[2] != config.input_channels:
        if pixels.shape[2] == 1:
            pixels = np.repeat(pixels, config.input_channels, axis=2)
        else:
            pixels = pixels.mean(axis=2, keepdims=True)
    pixels = resize_array(pixels, config.input_side, config.input_side)
    return np.ascontiguousarray(pixels.transpose(2, 0, 1), dtype=np.float32)


def _as_input(model: StreamModel, image: Union[ImageBuffer, np.ndarray]) -> Tensor:
    if isinstance(image, ImageBuffer):
        return Tensor(network_input(image, model.config))
    array = np.asarray(image, dtype=np.float32)
    expected = (model.config.input_channels, model.config.input_side, model.config.input_side)
    if array.shape != expected:
        raise DimensionError(f"{model.kind} input must be {expected}, got {array.shape}")
    return Tensor(array)


def predict(model: StreamModel, image: Union[ImageBuffer, np.ndarray]) -> Union[float, SegGuidedOutput]:
    """
    Run a fully trained stream on one image.

    Returns:
        The glaucoma probability for residual streams, SegGuidedOutput for seg_guided

    Raises:
        StateError: The model has not finished both training phases
    """
    model.require_phase("fully_trained")
    with no_grad():
        x = _as_input(model, image)
        if model.kind == "seg_guided":
            disc_map, prob = seg_guided_forward(model, x)
            return SegGuidedOutput(disc_map=disc_map.data.copy(), glaucoma_prob=prob.item())
        return residual_forward(model, x).item()


def predict_disc_map(model: StreamModel, image: Union[ImageBuffer, np.ndarray]) -> np.ndarray:
    """Disc probability map (side, side); usable once the segmentation phase is done."""
    if model.kind != "seg_guided":
        raise ParameterError(f"{model.kind} stream has no disc map")
    model.require_phase("seg_trained", "fully_trained")
    with no_grad():
        saddle, skips = encode(model, _as_input(model, image))
        return decode(model, saddle, skips).data[0].copy()
