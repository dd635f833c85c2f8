"""
Cartesian geometry: right-angle rotations and flips, square crops, bilinear resize
"""

import math
from typing import Tuple

import numpy as np
from scipy.ndimage import map_coordinates

from utils.errors import ParameterError

from .buffer import ImageBuffer
from .polar import RIGHT_ANGLES


def _check_rotation(rotation: int) -> int:
    if rotation not in RIGHT_ANGLES:
        raise ParameterError(f"rotation must be one of {RIGHT_ANGLES}, got {rotation}")
    return rotation // 90


def rotate_flip_array(array: np.ndarray, rotation: int = 0,
                      flip_h: bool = False, flip_v: bool = False) -> np.ndarray:
    """Counter-clockwise rotation by a right angle, then horizontal, then vertical flip."""
    out = np.rot90(array, k=_check_rotation(rotation), axes=(0, 1))
    if flip_h:
        out = out[:, ::-1]
    if flip_v:
        out = out[::-1]
    return np.ascontiguousarray(out)


def rotate_flip(image: ImageBuffer, rotation: int = 0,
                flip_h: bool = False, flip_v: bool = False) -> ImageBuffer:
    """Exact pixel permutation; no interpolation."""
    return ImageBuffer(rotate_flip_array(image.pixels, rotation, flip_h, flip_v))


def rotate_flip_point(u: float, v: float, width: int, height: int, rotation: int = 0,
                      flip_h: bool = False, flip_v: bool = False) -> Tuple[float, float]:
    """Where pixel coordinate (u, v) lands under rotate_flip of a width x height image."""
    for _ in range(_check_rotation(rotation)):
        u, v = v, width - 1 - u
        width, height = height, width
    if flip_h:
        u = width - 1 - u
    if flip_v:
        v = height - 1 - v
    return u, v


def crop_origin(center: float, side: int) -> int:
    """Top/left index of a side-long window whose middle sits at center."""
    return math.floor(center - (side - 1) / 2.0 + 0.5)


def crop_array(array: np.ndarray, center_u: float, center_v: float, side: int) -> np.ndarray:
    """Square crop of an (H, W, ...) array; area outside the source is 0."""
    if side < 1:
        raise ParameterError(f"crop side must be positive, got {side}")
    height, width = array.shape[:2]
    x0 = crop_origin(center_u, side)
    y0 = crop_origin(center_v, side)
    out = np.zeros((side, side) + array.shape[2:], dtype=array.dtype)

    src_x0, src_x1 = max(x0, 0), min(x0 + side, width)
    src_y0, src_y1 = max(y0, 0), min(y0 + side, height)
    if src_x0 < src_x1 and src_y0 < src_y1:
        out[src_y0 - y0:src_y1 - y0, src_x0 - x0:src_x1 - x0] = array[src_y0:src_y1, src_x0:src_x1]
    return out


def crop(image: ImageBuffer, center_u: float, center_v: float, side: int) -> ImageBuffer:
    return ImageBuffer(crop_array(image.pixels, center_u, center_v, side))


def disc_crop_side(diameter: float, crop_ratio: float = 2.0) -> int:
    """Side of the square crop around a disc: crop_ratio * diameter, at least one pixel."""
    if not crop_ratio > 0:
        raise ParameterError(f"crop_ratio must be positive, got {crop_ratio}")
    return max(1, int(round(crop_ratio * diameter)))


def resize_array(array: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """
    Bilinear resize of an (H, W) or (H, W, C) array with pixel centers aligned.

    Edges are clamped so constant inputs stay constant.
    """
    if out_w < 1 or out_h < 1:
        raise ParameterError(f"resize target must be positive, got {out_w}x{out_h}")
    height, width = array.shape[:2]
    if (width, height) == (out_w, out_h):
        return array.copy()

    rows = (np.arange(out_h, dtype=np.float64) + 0.5) * (height / out_h) - 0.5
    cols = (np.arange(out_w, dtype=np.float64) + 0.5) * (width / out_w) - 0.5
    grid_r, grid_c = np.meshgrid(rows, cols, indexing="ij")
    coords = np.stack([grid_r.ravel(), grid_c.ravel()])

    def _plane(plane: np.ndarray) -> np.ndarray:
        return map_coordinates(plane, coords, order=1, mode="nearest").reshape(out_h, out_w)

    if array.ndim == 2:
        return _plane(array)
    return np.stack([_plane(array[:, :, c]) for c in range(array.shape[2])], axis=2)


def resize(image: ImageBuffer, out_w: int, out_h: int) -> ImageBuffer:
    return ImageBuffer(resize_array(image.pixels, out_w, out_h))


def resize_mask(mask: np.ndarray, side: int) -> np.ndarray:
    """Resize a binary mask to side x side and re-binarize at 0.5."""
    return (resize_array(np.asarray(mask, dtype=np.float64), side, side) >= 0.5).astype(np.float64)
