"""
Per-stream augmentation recipes
    global, seg_guided : random right-angle rotation and flips (mask follows the image)
    disc               : disc crop with integer center drift, then rotation and flips
    polar              : polar transform with jittered angle, center and radius
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from imaging import (
    DEFAULT_STRIDE,
    IDENTITY_JITTER,
    ImageBuffer,
    PolarJitter,
    PolarJitterRange,
    PolarParams,
    crop,
    disc_crop_side,
    disc_polar_params,
    polar_augment,
    polar_transform,
    rotate_flip,
    rotate_flip_array,
)
from utils.errors import InputError, ParameterError

from .sample import Sample

SeedLike = Union[int, Sequence[int]]


class AugmentConfig(BaseModel):
    """Augmentation toggles; drifts are fractions of the crop side (20 px of an 800 px crop)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    enabled: bool = True
    rotations: bool = True
    flips: bool = True
    drift_ratio: float = Field(0.025, ge=0, lt=0.5)
    polar_angles: Tuple[int, ...] = (0, 90, 180, 270)
    polar_drift_ratio: float = Field(0.025, ge=0, lt=0.5)
    polar_radius_scales: Tuple[float, ...] = (0.8, 1.0)

    @field_validator("polar_angles", "polar_radius_scales", mode="before")
    @classmethod
    def _split_list(cls, value):
        if isinstance(value, str):
            return tuple(part.strip() for part in value.split(",") if part.strip())
        return value

    @field_validator("polar_angles")
    @classmethod
    def _right_angles(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value or any(angle not in (0, 90, 180, 270) for angle in value):
            raise ValueError(f"polar_angles must be a non-empty subset of 0,90,180,270, got {value}")
        return value

    @field_validator("polar_radius_scales")
    @classmethod
    def _positive_scales(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value or any(scale <= 0 for scale in value):
            raise ValueError("polar_radius_scales must be non-empty and positive")
        return value


@dataclass(frozen=True)
class AugmentationChoice:
    """One concrete augmentation draw; the default is the identity."""

    rotation: int = 0
    flip_h: bool = False
    flip_v: bool = False
    drift_u: int = 0
    drift_v: int = 0
    polar: PolarJitter = field(default_factory=PolarJitter)


@dataclass(frozen=True, eq=False)
class AugmentedSample:
    image: ImageBuffer
    label: int
    mask: Optional[np.ndarray] = None


def _max_drift(ratio: float, side: float) -> int:
    return int(math.floor(ratio * side + 0.5))


def polar_jitter_range(settings: AugmentConfig, polar_radius: float) -> PolarJitterRange:
    """The polar jitter set of settings for a disc of polar radius polar_radius."""
    if not settings.enabled:
        return IDENTITY_JITTER
    return PolarJitterRange(
        angles=settings.polar_angles,
        max_drift=_max_drift(settings.polar_drift_ratio, 2 * polar_radius),
        radius_scales=settings.polar_radius_scales,
    )


def draw_augmentation(kind: str, rng: np.random.Generator, settings: AugmentConfig,
                      crop_side: int = 0, polar_radius: float = 0.0) -> AugmentationChoice:
    """Draw the parameters of kind's recipe; disabled toggles stay at identity."""
    if not settings.enabled:
        return AugmentationChoice()
    if kind == "polar":
        return AugmentationChoice(polar=polar_jitter_range(settings, polar_radius).draw(rng))

    rotation = int(rng.choice((0, 90, 180, 270))) if settings.rotations else 0
    flip_h, flip_v = (bool(f) for f in rng.integers(0, 2, size=2)) if settings.flips else (False, False)
    drift_u = drift_v = 0
    if kind == "disc":
        bound = _max_drift(settings.drift_ratio, crop_side)
        drift_u, drift_v = (int(d) for d in rng.integers(-bound, bound + 1, size=2))
    return AugmentationChoice(rotation, flip_h, flip_v, drift_u, drift_v)


def _require_location(sample: Sample, kind: str):
    if sample.location is None:
        raise InputError(f"{kind} stream needs a disc location for sample '{sample.name}'")
    return sample.location


def _polar_base(sample: Sample, crop_ratio: float, polar_stride: float) -> PolarParams:
    loc = _require_location(sample, "polar")
    return disc_polar_params(loc.center_u, loc.center_v, loc.diameter, crop_ratio, polar_stride)


def apply_augmentation(sample: Sample, kind: str, choice: AugmentationChoice,
                       crop_ratio: float = 2.0, polar_stride: float = DEFAULT_STRIDE) -> AugmentedSample:
    """Build kind's network view of sample under one concrete augmentation."""
    if kind in ("global", "seg_guided"):
        image = rotate_flip(sample.image, choice.rotation, choice.flip_h, choice.flip_v)
        mask = None
        if kind == "seg_guided" and sample.mask is not None:
            mask = rotate_flip_array(sample.mask, choice.rotation, choice.flip_h, choice.flip_v)
        return AugmentedSample(image, sample.label, mask)

    if kind == "disc":
        loc = _require_location(sample, kind)
        side = disc_crop_side(loc.diameter, crop_ratio)
        cropped = crop(sample.image, loc.center_u + choice.drift_u, loc.center_v + choice.drift_v, side)
        return AugmentedSample(rotate_flip(cropped, choice.rotation, choice.flip_h, choice.flip_v), sample.label)

    if kind == "polar":
        base = _polar_base(sample, crop_ratio, polar_stride)
        return AugmentedSample(polar_transform(sample.image, choice.polar.apply(base)), sample.label)

    raise ParameterError(f"unknown stream kind '{kind}'")


def augment_for_stream(sample: Sample, kind: str, seed: SeedLike,
                       settings: Optional[AugmentConfig] = None, crop_ratio: float = 2.0,
                       polar_stride: float = DEFAULT_STRIDE) -> AugmentedSample:
    """
    Apply kind's recipe with parameters drawn from seed.

    Seeds are usually (global seed, stream, epoch, sample index) so every
    epoch sees a fresh, reproducible view.
    """
    settings = settings or AugmentConfig()
    if kind == "polar":
        base = _polar_base(sample, crop_ratio, polar_stride)
        jitter = polar_jitter_range(settings, base.radius)
        return AugmentedSample(polar_augment(sample.image, base, jitter, seed), sample.label)

    crop_side = 0
    if kind == "disc":
        crop_side = disc_crop_side(_require_location(sample, kind).diameter, crop_ratio)
    choice = draw_augmentation(kind, np.random.default_rng(seed), settings, crop_side)
    return apply_augmentation(sample, kind, choice, crop_ratio, polar_stride)
