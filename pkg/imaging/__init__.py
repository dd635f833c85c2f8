"""Image rasters, PPM files and the geometric transforms used by every stream."""

from .buffer import ImageBuffer
from .io import read_ppm, write_ppm, read_mask, write_mask
from .polar import (
    PolarParams,
    PolarJitter,
    PolarJitterRange,
    polar_transform,
    inverse_polar_transform,
    IDENTITY_JITTER,
    disc_polar_params,
    polar_augment,
    DEFAULT_STRIDE,
)
from .transforms import (
    rotate_flip,
    rotate_flip_array,
    rotate_flip_point,
    crop,
    crop_array,
    disc_crop_side,
    resize,
    resize_array,
    resize_mask,
)

__all__ = [
    # Raster
    "ImageBuffer",
    # Files
    "read_ppm",
    "write_ppm",
    "read_mask",
    "write_mask",
    # Polar
    "PolarParams",
    "PolarJitter",
    "PolarJitterRange",
    "polar_transform",
    "inverse_polar_transform",
    "IDENTITY_JITTER",
    "disc_polar_params",
    "polar_augment",
    "DEFAULT_STRIDE",
    # Cartesian
    "rotate_flip",
    "rotate_flip_array",
    "rotate_flip_point",
    "crop",
    "crop_array",
    "disc_crop_side",
    "resize",
    "resize_array",
    "resize_mask",
]
