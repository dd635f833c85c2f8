"""
Stream architecture and training-loop configuration
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

StreamKind = Literal["global", "seg_guided", "disc", "polar"]

STREAM_KINDS = ("global", "seg_guided", "disc", "polar")
RESIDUAL_KINDS = ("global", "disc", "polar")


class StreamConfig(BaseModel):
    """
    Shape of one stream's network.

    Residual streams run `depth` stride-2 stages of widths base * 2^i.
    The segmentation-guided U-shape net keeps a full-resolution stage of
    width base, then `depth` stride-2 stages doubling the width, so the
    saddle is (input_side / 2^depth) square with base * 2^depth channels.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: StreamKind
    input_side: int = Field(gt=0, description="Square network input side in pixels")
    base_channels: int = Field(8, gt=0)
    depth: int = Field(gt=0, description="Number of stride-2 down-sampling stages")
    input_channels: int = Field(3, description="1 (grayscale) or 3 (RGB)")
    channel_affine: bool = Field(
        True, description="Learned per-channel scale/shift after each conv (batch-norm stand-in)"
    )

    @model_validator(mode="after")
    def _check_shape(self) -> "StreamConfig":
        step = 2 ** self.depth
        if self.input_side % step:
            raise ValueError(
                f"input_side {self.input_side} must be divisible by 2^depth = {step}"
            )
        if self.input_channels not in (1, 3):
            raise ValueError(f"input_channels must be 1 or 3, got {self.input_channels}")
        if self.kind == "seg_guided" and self.saddle_channels < 4:
            raise ValueError("seg_guided saddle needs at least 4 channels for the auxiliary bottleneck")
        return self

    @property
    def is_residual(self) -> bool:
        return self.kind in RESIDUAL_KINDS

    @property
    def saddle_side(self) -> int:
        """Spatial side of the deepest feature map."""
        return self.input_side // 2 ** self.depth

    @property
    def saddle_channels(self) -> int:
        if self.kind == "seg_guided":
            return self.base_channels * 2 ** self.depth
        return self.base_channels * 2 ** (self.depth - 1)

    @classmethod
    def desk_scale(cls, kind: StreamKind, **overrides) -> "StreamConfig":
        """CPU-sized defaults: 64-pixel residual streams, 128-pixel 4-channel U-shape net without affine."""
        if kind == "seg_guided":
            values = dict(input_side=128, base_channels=4, depth=4, channel_affine=False)
        else:
            values = dict(input_side=64, base_channels=8, depth=5)
        values.update(overrides)
        return cls(kind=kind, **values)

    @classmethod
    def full_scale(cls, kind: StreamKind, **overrides) -> "StreamConfig":
        """Full-size shapes: 224-pixel residual streams; 640-pixel U-shape net with a 40x40x512 saddle."""
        if kind == "seg_guided":
            values = dict(input_side=640, base_channels=32, depth=4, channel_affine=False)
        else:
            values = dict(input_side=224, base_channels=64, depth=5)
        values.update(overrides)
        return cls(kind=kind, **values)


class TrainingConfig(BaseModel):
    """Epoch loop settings shared by every stream and phase."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    segmentation_epochs: int = Field(15, ge=0, le=200)
    classifier_epochs: int = Field(25, ge=0, le=200)
    batch_size: int = Field(8, gt=0)
    patience: int = Field(
        5, ge=0, description="Stop after this many epochs without loss improvement; 0 disables"
    )
    min_delta: float = Field(1e-4, ge=0)
    workers: int = Field(1, ge=1, description="Classifier streams trained concurrently after localization")
