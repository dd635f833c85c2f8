"""
Polar resampling about the optic disc
Row r, column j of a polar image samples the Cartesian point
    u = u_o + r cos(j s + phi),  v = v_o + r sin(j s + phi)
with theta measured from the +u axis towards +v (image rows).
"""

import math
from dataclasses import dataclass, replace
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.ndimage import map_coordinates

from utils.errors import ParameterError

from .buffer import ImageBuffer

DEFAULT_STRIDE = 2 * math.pi / 256
RIGHT_ANGLES = (0, 90, 180, 270)

SeedLike = Union[int, Sequence[int]]


@dataclass(frozen=True)
class PolarParams:
    """Center O(u_o, v_o), radius R, angle offset phi and angular stride s."""

    center_u: float
    center_v: float
    radius: float
    angle_offset: float = 0.0
    stride: float = DEFAULT_STRIDE

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"polar radius must be positive, got {self.radius}")
        if not self.stride > 0:
            raise ParameterError(f"polar stride must be positive, got {self.stride}")
        if round(self.radius) < 1 or round(2 * math.pi / self.stride) < 1:
            raise ParameterError(f"polar output would be empty (R={self.radius}, s={self.stride})")

    @property
    def width(self) -> int:
        return round(2 * math.pi / self.stride)

    @property
    def height(self) -> int:
        return round(self.radius)

    def with_changes(self, **changes) -> "PolarParams":
        return replace(self, **changes)


def _sample(pixels: np.ndarray, rows: np.ndarray, cols: np.ndarray, mode: str) -> np.ndarray:
    """Bilinear sampling of every channel at (rows, cols); outside is 0 in constant mode."""
    coords = np.stack([rows.ravel(), cols.ravel()])
    planes = [
        map_coordinates(pixels[:, :, c], coords, order=1, mode=mode, cval=0.0).reshape(rows.shape)
        for c in range(pixels.shape[2])
    ]
    return np.stack(planes, axis=2)


def polar_transform(image: ImageBuffer, params: PolarParams) -> ImageBuffer:
    """
    Resample image onto a round(R) x round(2 pi / s) polar grid.

    Angle shifts are exact column rotations only when 2 pi / s is an integer.
    """
    radii = np.arange(params.height, dtype=np.float64)[:, None]
    angles = np.arange(params.width, dtype=np.float64)[None, :] * params.stride + params.angle_offset
    u = params.center_u + radii * np.cos(angles)
    v = params.center_v + radii * np.sin(angles)
    return ImageBuffer(_sample(image.pixels, v, u, mode="constant"))


def inverse_polar_transform(polar: ImageBuffer, params: PolarParams,
                            out_width: int, out_height: int) -> ImageBuffer:
    """
    Map a polar image back to an out_width x out_height Cartesian raster.

    Pixels farther than R from the center are 0.
    """
    if out_width < 1 or out_height < 1:
        raise ParameterError(f"output size must be positive, got {out_width}x{out_height}")
    if polar.height != params.height or polar.width != params.width:
        raise ParameterError(
            f"polar image {polar.width}x{polar.height} does not match params "
            f"{params.width}x{params.height}"
        )
    vv, uu = np.mgrid[0:out_height, 0:out_width].astype(np.float64)
    du = uu - params.center_u
    dv = vv - params.center_v
    radius = np.hypot(du, dv)
    theta = np.mod(np.arctan2(dv, du) - params.angle_offset, 2 * math.pi)

    # One wrapped column lets the last angular bin interpolate into the first
    wrapped = np.concatenate([polar.pixels, polar.pixels[:, :1]], axis=1)
    out = _sample(wrapped, radius, theta / params.stride, mode="nearest")
    out[radius > params.radius] = 0.0
    return ImageBuffer(out)


@dataclass(frozen=True)
class PolarJitter:
    """One concrete draw of polar augmentation parameters."""

    angle_degrees: int = 0
    drift_u: int = 0
    drift_v: int = 0
    radius_scale: float = 1.0

    def __post_init__(self):
        if self.angle_degrees not in RIGHT_ANGLES:
            raise ParameterError(f"polar angle jitter must be one of {RIGHT_ANGLES}, got {self.angle_degrees}")
        if not self.radius_scale > 0:
            raise ParameterError(f"radius scale must be positive, got {self.radius_scale}")

    def apply(self, base: PolarParams) -> PolarParams:
        return base.with_changes(
            center_u=base.center_u + self.drift_u,
            center_v=base.center_v + self.drift_v,
            radius=base.radius * self.radius_scale,
            angle_offset=base.angle_offset + math.radians(self.angle_degrees),
        )


@dataclass(frozen=True)
class PolarJitterRange:
    """The set polar jitter is drawn from: angles, integer center drift bound, radius scales."""

    angles: Tuple[int, ...] = RIGHT_ANGLES
    max_drift: int = 20
    radius_scales: Tuple[float, ...] = (0.8, 1.0)

    def __post_init__(self):
        if not self.angles or any(a not in RIGHT_ANGLES for a in self.angles):
            raise ParameterError(f"angles must be a non-empty subset of {RIGHT_ANGLES}")
        if self.max_drift < 0:
            raise ParameterError(f"max_drift must be >= 0, got {self.max_drift}")
        if not self.radius_scales or any(s <= 0 for s in self.radius_scales):
            raise ParameterError("radius_scales must be non-empty and positive")

    def draw(self, rng: np.random.Generator) -> PolarJitter:
        angle = self.angles[rng.integers(len(self.angles))]
        drift_u, drift_v = rng.integers(-self.max_drift, self.max_drift + 1, size=2)
        scale = self.radius_scales[rng.integers(len(self.radius_scales))]
        return PolarJitter(int(angle), int(drift_u), int(drift_v), float(scale))


def disc_polar_params(center_u: float, center_v: float, diameter: float, crop_ratio: float = 2.0,
                      stride: float = DEFAULT_STRIDE) -> PolarParams:
    """Polar sampling about a disc with radius half the disc crop side."""
    if not crop_ratio > 0:
        raise ParameterError(f"crop_ratio must be positive, got {crop_ratio}")
    return PolarParams(center_u, center_v, max(1.0, crop_ratio * diameter / 2.0), stride=stride)


IDENTITY_JITTER = PolarJitterRange(angles=(0,), max_drift=0, radius_scales=(1.0,))


def polar_augment(image: ImageBuffer, base: PolarParams, jitter: PolarJitterRange,
                  seed: SeedLike) -> ImageBuffer:
    """Polar transform under one jitter drawn from jitter with seed; deterministic in seed."""
    drawn = jitter.draw(np.random.default_rng(seed))
    return polar_transform(image, drawn.apply(base))
