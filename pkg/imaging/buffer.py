"""
Image raster type shared by geometry, data and the networks
"""

from dataclasses import dataclass

import numpy as np

from utils.errors import DimensionError, ParameterError

# Interpolation may overshoot [0, 1] by a few ulps; anything beyond this is an error
_RANGE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """
    Grayscale or RGB raster with float pixels in [0, 1].

    pixels has shape (height, width, channels), channels 1 or 3, and is
    stored read-only so buffers can be shared between threads.
    """

    pixels: np.ndarray

    def __post_init__(self):
        array = np.asarray(self.pixels, dtype=np.float64)
        if array.ndim == 2:
            array = array[:, :, None]
        if array.ndim != 3 or array.shape[2] not in (1, 3):
            raise DimensionError(f"image pixels must be (H, W, 1|3), got {np.shape(self.pixels)}")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise DimensionError(f"image must be non-empty, got {array.shape[:2]}")
        if array.size and (array.min() < -_RANGE_TOLERANCE or array.max() > 1 + _RANGE_TOLERANCE):
            raise ParameterError(
                f"pixel values must lie in [0, 1], got [{array.min():.6g}, {array.max():.6g}]"
            )
        array = np.clip(array, 0.0, 1.0)
        array.setflags(write=False)
        object.__setattr__(self, "pixels", array)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def center(self):
        """Geometric center ((W-1)/2, (H-1)/2) in (u, v) pixel coordinates."""
        return (self.width - 1) / 2.0, (self.height - 1) / 2.0

    def gray(self) -> np.ndarray:
        """(H, W) luminance as the channel mean."""
        return self.pixels.mean(axis=2)

    def to_chw(self, dtype=np.float32) -> np.ndarray:
        """Channel-first copy for network input."""
        return np.ascontiguousarray(self.pixels.transpose(2, 0, 1), dtype=dtype)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

