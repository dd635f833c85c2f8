"""
Disc localization from the segmentation-guided disc map
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import ndimage

from autograd import Tensor
from imaging import (
    DEFAULT_STRIDE,
    ImageBuffer,
    PolarParams,
    crop,
    disc_crop_side,
    disc_polar_params,
    polar_transform,
)
from utils.console import Console, get_console
from utils.errors import DimensionError, NoDiscFoundError, ParameterError

MapLike = Union[np.ndarray, Tensor]
MapScale = Union[float, Tuple[float, float]]

DEFAULT_THRESHOLD = 0.5
DEFAULT_CROP_RATIO = 2.0


@dataclass(frozen=True)
class DiscLocation:
    """Disc center and diameter in original-image pixels."""

    center_u: float
    center_v: float
    diameter: float
    confidence: float
    fallback: bool = False

    def __post_init__(self):
        if not self.diameter > 0:
            raise ParameterError(f"disc diameter must be positive, got {self.diameter}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ParameterError(f"confidence must be in [0, 1], got {self.confidence}")


def _as_map(disc_map: MapLike) -> np.ndarray:
    array = disc_map.data if isinstance(disc_map, Tensor) else np.asarray(disc_map, dtype=np.float64)
    if array.ndim == 3 and array.shape[0] == 1:
        array = array[0]
    if array.ndim != 2:
        raise DimensionError(f"disc map must be (H, W) or [1, H, W], got {array.shape}")
    return array


def binarize_map(disc_map: MapLike, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    """Boolean mask of pixels with probability >= threshold."""
    if not 0.0 < threshold < 1.0:
        raise ParameterError(f"threshold must be in (0, 1), got {threshold}")
    return _as_map(disc_map) >= threshold


def largest_component(mask: np.ndarray) -> np.ndarray:
    """Keep the largest 4-connected component; the first in raster order wins ties."""
    mask = np.asarray(mask, dtype=bool)
    labels, count = ndimage.label(mask)
    if count == 0:
        return np.zeros_like(mask)
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    return labels == int(np.argmax(sizes))


def _axis_scales(map_scale: MapScale) -> Tuple[float, float]:
    scale_u, scale_v = (map_scale, map_scale) if np.isscalar(map_scale) else map_scale
    if not (scale_u > 0 and scale_v > 0):
        raise ParameterError(f"map_scale must be positive, got {map_scale}")
    return float(scale_u), float(scale_v)


def to_image_coordinate(index: float, scale: float, extent: int) -> float:
    """
    Map a disc-map pixel coordinate to the image, matching the center-aligned resize.

    Pixel centers line up: (index + 0.5) * scale - 0.5, clipped to [0, extent * scale - 1].
    """
    return float(np.clip((index + 0.5) * scale - 0.5, 0.0, max(extent * scale - 1.0, 0.0)))


def locate_disc(disc_map: MapLike, map_scale: MapScale = 1.0,
                threshold: float = DEFAULT_THRESHOLD) -> DiscLocation:
    """
    Centroid and bounding-box diameter of the largest above-threshold region.

    map_scale is image size over map size, either one factor or (width, height) factors;
    a map resized from a non-square image needs the per-axis pair.

    Raises:
        NoDiscFoundError: No pixel reaches the threshold
    """
    scale_u, scale_v = _axis_scales(map_scale)
    values = _as_map(disc_map)
    component = largest_component(binarize_map(values, threshold))
    rows, cols = np.nonzero(component)
    if rows.size == 0:
        raise NoDiscFoundError(f"no disc pixel at threshold {threshold}")

    height = (rows.max() - rows.min() + 1) * scale_v
    width = (cols.max() - cols.min() + 1) * scale_u
    confidence = float(np.clip(values[component].mean(), 0.0, 1.0))
    return DiscLocation(
        center_u=to_image_coordinate(cols.mean(), scale_u, values.shape[1]),
        center_v=to_image_coordinate(rows.mean(), scale_v, values.shape[0]),
        diameter=float(max(height, width)),
        confidence=confidence,
    )


def fallback_location(image: ImageBuffer) -> DiscLocation:
    """Image center with diameter side/5 and zero confidence."""
    center_u, center_v = image.center
    return DiscLocation(center_u, center_v, min(image.width, image.height) / 5.0, 0.0, fallback=True)


def locate_or_fallback(disc_map: MapLike, image: ImageBuffer, map_scale: MapScale = 1.0,
                       threshold: float = DEFAULT_THRESHOLD,
                       console: Optional[Console] = None) -> DiscLocation:
    try:
        return locate_disc(disc_map, map_scale, threshold)
    except NoDiscFoundError:
        (console or get_console()).log("No disc found in map; using image-center fallback", "warning")
        return fallback_location(image)


def crop_side(loc: DiscLocation, crop_ratio: float = DEFAULT_CROP_RATIO) -> int:
    return disc_crop_side(loc.diameter, crop_ratio)


def crop_for_streams(image: ImageBuffer, loc: DiscLocation,
                     crop_ratio: float = DEFAULT_CROP_RATIO) -> ImageBuffer:
    """Square crop of side crop_ratio * diameter around the disc (outside filled with 0)."""
    return crop(image, loc.center_u, loc.center_v, crop_side(loc, crop_ratio))


def polar_params_for(loc: DiscLocation, crop_ratio: float = DEFAULT_CROP_RATIO,
                     stride: float = DEFAULT_STRIDE) -> PolarParams:
    """Polar transform about the disc with radius half the crop side."""
    return disc_polar_params(loc.center_u, loc.center_v, loc.diameter, crop_ratio, stride)


def polar_for_streams(image: ImageBuffer, loc: DiscLocation, crop_ratio: float = DEFAULT_CROP_RATIO,
                      stride: float = DEFAULT_STRIDE) -> ImageBuffer:
    return polar_transform(image, polar_params_for(loc, crop_ratio, stride))


def localization_error(loc: DiscLocation, true_u: float, true_v: float, image_side: int) -> float:
    """Center distance as a fraction of the image side."""
    return math.hypot(loc.center_u - true_u, loc.center_v - true_v) / image_side
