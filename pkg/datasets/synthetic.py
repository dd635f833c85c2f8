"""
Synthetic fundus generator
Dark vignetted background, a bright elliptical disc, a brighter concentric
cup, dark vessel curves and noise. The label is decided by the cup-to-disc
ratio range the sample was drawn from, so it is recoverable from geometry.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.ndimage import gaussian_filter

from imaging import ImageBuffer, write_mask, write_ppm
from utils.errors import ParameterError

from .manifest import ManifestRecord, write_manifest
from .sample import Sample

Range = Tuple[float, float]

_BACKGROUND = np.array([0.42, 0.16, 0.07])
_DISC = np.array([0.93, 0.70, 0.42])
_CUP = np.array([1.0, 0.93, 0.78])


class SyntheticSpec(BaseModel):
    """Generator settings; every geometric size is a fraction of image_side."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    image_side: int = Field(128, ge=32)
    disc_radius_range: Range = (0.08, 0.15)
    cup_to_disc_range_normal: Range = (0.3, 0.55)
    cup_to_disc_range_glaucoma: Range = (0.7, 0.9)
    noise_level: float = Field(0.02, ge=0, le=0.2)
    vessel_count: int = Field(6, ge=0, le=32)
    positive_fraction: float = Field(0.5, ge=0, le=1)
    seed: int = Field(0, ge=0)

    @field_validator(
        "disc_radius_range", "cup_to_disc_range_normal", "cup_to_disc_range_glaucoma", mode="before"
    )
    @classmethod
    def _split_range(cls, value):
        if isinstance(value, str):
            return tuple(part.strip() for part in value.split(","))
        return value

    @field_validator("disc_radius_range", "cup_to_disc_range_normal", "cup_to_disc_range_glaucoma")
    @classmethod
    def _ordered_fraction(cls, value: Range) -> Range:
        low, high = value
        if not 0 < low <= high < 1:
            raise ValueError(f"range must satisfy 0 < low <= high < 1, got {value}")
        return value

    @model_validator(mode="after")
    def _separable(self) -> "SyntheticSpec":
        if self.cup_to_disc_range_glaucoma[0] <= self.cup_to_disc_range_normal[1]:
            raise ValueError("glaucoma cup-to-disc range must lie strictly above the normal range")
        if self.disc_radius_range[1] > 0.3:
            raise ValueError("disc radius must stay below 0.3 of the image side")
        return self


@dataclass(frozen=True, eq=False)
class SyntheticSample(Sample):
    """A Sample plus the generator's ground-truth geometry."""

    disc_center: Tuple[float, float] = (0.0, 0.0)
    disc_radius: float = 0.0
    cup_to_disc: float = 0.0


def draw_labels(spec: SyntheticSpec, count: int) -> np.ndarray:
    """Exactly round(count * positive_fraction) positives in seeded random order."""
    positives = int(round(count * spec.positive_fraction))
    labels = np.zeros(count, dtype=np.int64)
    labels[:positives] = 1
    return np.random.default_rng([spec.seed, count]).permutation(labels)


def _vessels(rng: np.random.Generator, side: int, center: Tuple[float, float], count: int) -> np.ndarray:
    layer = np.zeros((side, side))
    for _ in range(count):
        heading = rng.uniform(0, 2 * np.pi)
        bend = rng.uniform(-1.5, 1.5) / side
        length = rng.uniform(0.35, 0.7) * side
        t = np.linspace(0, length, int(4 * length))
        u = center[0] + t * np.cos(heading + bend * t)
        v = center[1] + t * np.sin(heading + bend * t)
        inside = (u >= 0) & (u <= side - 1) & (v >= 0) & (v <= side - 1)
        layer[np.round(v[inside]).astype(int), np.round(u[inside]).astype(int)] = 1.0
    return np.clip(gaussian_filter(layer, sigma=0.8) * 2.5, 0.0, 1.0)


def render_sample(spec: SyntheticSpec, index: int, label: int) -> SyntheticSample:
    """Draw sample `index`; its pixels depend only on (spec.seed, index, label)."""
    rng = np.random.default_rng([spec.seed, index])
    side = spec.image_side
    vv, uu = np.mgrid[0:side, 0:side].astype(np.float64)

    # Integer centers keep the rasterized disc symmetric about its center
    center_u = float(round(side / 2 + rng.uniform(-0.15, 0.15) * side))
    center_v = float(round(side / 2 + rng.uniform(-0.15, 0.15) * side))
    radius = rng.uniform(*spec.disc_radius_range) * side
    elongation = rng.uniform(1.0, 1.1)
    cdr_range = spec.cup_to_disc_range_glaucoma if label else spec.cup_to_disc_range_normal
    cup_to_disc = rng.uniform(*cdr_range)

    ellipse = ((uu - center_u) / radius) ** 2 + ((vv - center_v) / (radius * elongation)) ** 2
    disc = ellipse <= 1.0
    cup = ellipse <= cup_to_disc ** 2

    field_radius = np.hypot(uu - (side - 1) / 2, vv - (side - 1) / 2) / (0.5 * side)
    vignette = np.clip(1.0 - 0.55 * field_radius ** 2, 0.0, 1.0)
    gain = rng.uniform(0.85, 1.1)

    pixels = _BACKGROUND[None, None, :] * vignette[:, :, None]
    pixels = np.where(disc[:, :, None], _DISC[None, None, :], pixels)
    pixels = np.where(cup[:, :, None], _CUP[None, None, :], pixels)
    pixels = gaussian_filter(pixels, sigma=(0.7, 0.7, 0))
    pixels = pixels * (1.0 - 0.45 * _vessels(rng, side, (center_u, center_v), spec.vessel_count))[:, :, None]
    pixels = pixels * gain + rng.normal(0.0, spec.noise_level, size=pixels.shape)
    pixels[field_radius > 1.0] = 0.0

    return SyntheticSample(
        image=ImageBuffer(np.clip(pixels, 0.0, 1.0)),
        label=int(label),
        mask=disc.astype(np.float64),
        name=f"synthetic_{index:05d}",
        disc_center=(center_u, center_v),
        disc_radius=float(radius),
        cup_to_disc=float(cup_to_disc),
    )


def generate_synthetic(spec: SyntheticSpec, count: int) -> List[SyntheticSample]:
    """
    Deterministic synthetic dataset of `count` samples.

    Raises:
        ParameterError: count < 1
    """
    if count < 1:
        raise ParameterError(f"count must be positive, got {count}")
    labels = draw_labels(spec, count)
    return [render_sample(spec, index, int(label)) for index, label in enumerate(labels)]


def export_synthetic(samples: List[SyntheticSample], out_dir: Union[str, Path]) -> Path:
    """Write images/, masks/ and manifest.tsv under out_dir; returns the manifest path."""
    out_dir = Path(out_dir)
    records = []
    for sample in samples:
        image_path = write_ppm(sample.image, out_dir / "images" / f"{sample.name}.ppm")
        mask_path = write_mask(sample.mask, out_dir / "masks" / f"{sample.name}_disc.ppm")
        records.append(ManifestRecord(image_path, sample.label, mask_path))
    return write_manifest(records, out_dir / "manifest.tsv")
