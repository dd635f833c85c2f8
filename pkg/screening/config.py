"""
Pipeline configuration
Built from flat key=value settings (stream.global.depth=5), environment
defaults and CLI overrides, and validated in full before any work starts.
"""

import math
import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from autograd import SgdConfig
from datasets import AugmentConfig, SyntheticSpec
from networks import STREAM_KINDS, StreamConfig, TrainingConfig
from utils.errors import ConfigurationError
from utils.settings import flatten_settings, load_settings_file

from .ensemble import FUSION_MODES, parse_subset
from .localization import DEFAULT_CROP_RATIO, DEFAULT_THRESHOLD

ENV_PREFIX = "DISCSCREEN_"

_FROZEN = ConfigDict(frozen=True, extra="forbid")


class StreamsSection(BaseModel):
    """One StreamConfig per kind; unspecified fields take the desk-scale defaults."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    global_stream: StreamConfig = Field(alias="global")
    seg_guided: StreamConfig
    disc: StreamConfig
    polar: StreamConfig

    @model_validator(mode="before")
    @classmethod
    def _desk_defaults(cls, data: Any) -> Any:
        data = dict(data or {})
        filled = {}
        for kind in STREAM_KINDS:
            key = "global_stream" if kind == "global" and "global_stream" in data else kind
            given = data.pop(key, {})
            if isinstance(given, StreamConfig):
                filled[kind] = given
                continue
            given = dict(given)
            if given.get("kind", kind) != kind:
                raise ValueError(f"stream.{kind}.kind must be '{kind}'")
            filled[kind] = {**StreamConfig.desk_scale(kind).model_dump(), **given, "kind": kind}
        if data:
            raise ValueError(f"unknown stream section(s): {', '.join(sorted(data))}")
        return filled

    def get(self, kind: str) -> StreamConfig:
        return self.global_stream if kind == "global" else getattr(self, kind)


class SgdSection(BaseModel):
    """Optimizer per training phase; desk defaults start above the 1e-4 of pre-trained fine-tuning."""

    model_config = _FROZEN

    segmentation: SgdConfig = SgdConfig(learning_rate=0.05)
    classifier: SgdConfig = SgdConfig(learning_rate=0.01)


class FusionConfig(BaseModel):
    model_config = _FROZEN

    mode: str = "average"
    subset: Tuple[str, ...] = STREAM_KINDS

    @field_validator("mode")
    @classmethod
    def _known_mode(cls, value: str) -> str:
        if value not in FUSION_MODES:
            raise ValueError(f"fusion mode must be one of {', '.join(FUSION_MODES)}")
        return value

    @field_validator("subset", mode="before")
    @classmethod
    def _canonical_subset(cls, value):
        return parse_subset(value)


class LocalizationConfig(BaseModel):
    model_config = _FROZEN

    crop_ratio: float = Field(DEFAULT_CROP_RATIO, gt=0, le=10)
    threshold: float = Field(DEFAULT_THRESHOLD, gt=0, lt=1)


class PolarConfig(BaseModel):
    model_config = _FROZEN

    bins: int = Field(256, ge=8, description="Angular samples per turn; stride = 2 pi / bins")

    @property
    def stride(self) -> float:
        return 2 * math.pi / self.bins


class PathsConfig(BaseModel):
    model_config = _FROZEN

    dataset: Optional[Path] = None
    weights_dir: Path = Path("weights")
    report_dir: Path = Path("reports")


class PipelineConfig(BaseModel):
    """Everything one train / screen / eval run needs."""

    model_config = _FROZEN

    stream: StreamsSection = Field(default_factory=lambda: StreamsSection())
    sgd: SgdSection = SgdSection()
    training: TrainingConfig = TrainingConfig()
    augment: AugmentConfig = AugmentConfig()
    fusion: FusionConfig = FusionConfig()
    localization: LocalizationConfig = LocalizationConfig()
    polar: PolarConfig = PolarConfig()
    synthetic: SyntheticSpec = SyntheticSpec()
    seed: int = Field(0, ge=0)
    paths: PathsConfig = PathsConfig()

    def stream_seed(self, kind: str) -> int:
        """Initialization / shuffling seed of one stream, derived from the run seed."""
        return self.seed * len(STREAM_KINDS) + STREAM_KINDS.index(kind)

    @classmethod
    def from_settings(cls, tree: Dict[str, Any], source: str = "<settings>") -> "PipelineConfig":
        """
        Validate a nested settings dictionary.

        Raises:
            ConfigurationError: Unknown keys or invalid values (all problems listed)
        """
        try:
            return cls.model_validate(tree)
        except ValidationError as exc:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
            )
            raise ConfigurationError(f"{source}: {problems}") from exc

    @classmethod
    def load(cls, path: Union[str, Path, None] = None,
             overrides: Optional[Dict[str, Any]] = None) -> "PipelineConfig":
        """
        File settings, then DISCSCREEN_* environment defaults, then explicit overrides.

        overrides uses dotted keys (e.g. {"seed": 3, "paths.weights_dir": "w"}).
        """
        tree: Dict[str, Any] = load_settings_file(path) if path else {}
        env = {
            "seed": os.getenv(f"{ENV_PREFIX}SEED"),
            "paths.weights_dir": os.getenv(f"{ENV_PREFIX}WEIGHTS_DIR"),
            "paths.report_dir": os.getenv(f"{ENV_PREFIX}REPORT_DIR"),
        }
        merged = {key: value for key, value in env.items() if value}
        merged.update({key: value for key, value in (overrides or {}).items() if value is not None})
        for dotted, value in merged.items():
            node = tree
            *parents, leaf = dotted.split(".")
            for part in parents:
                node = node.setdefault(part, {})
            node[leaf] = value
        return cls.from_settings(tree, source=str(path) if path else "<defaults>")

    def to_settings_text(self) -> str:
        """Effective configuration as key=value lines (reloadable with load)."""
        tree = self.model_dump(by_alias=True, mode="json", exclude_none=True)
        for kind in STREAM_KINDS:
            tree["stream"][kind].pop("kind", None)
        lines = [f"{key}={value}" for key, value in flatten_settings(tree)]
        return "\n".join(lines) + "\n"

