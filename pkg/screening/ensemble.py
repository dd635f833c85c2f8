"""
Stream fusion and the subset / operator studies
"""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

from utils.errors import InputError, ParameterError

from .metrics import summarize

FusionMode = Literal["average", "max", "min", "multiply"]
FUSION_MODES: Tuple[str, ...] = ("average", "max", "min", "multiply")

STREAM_NAMES: Tuple[str, ...] = ("global", "seg_guided", "disc", "polar")

_ALIASES = {
    "global": "global",
    "image": "global",
    "seg_guided": "seg_guided",
    "seg": "seg_guided",
    "disc": "disc",
    "polar": "polar",
}

DISPLAY_NAMES = {"global": "Image", "seg_guided": "Seg", "disc": "Disc", "polar": "Polar"}


def parse_subset(subset: Union[None, str, Iterable[str]]) -> Tuple[str, ...]:
    """
    Canonical stream subset from names or a comma list ("disc,polar").

    None means all four streams. Result follows STREAM_NAMES order.
    """
    if subset is None:
        return STREAM_NAMES
    if isinstance(subset, str):
        subset = [part for part in subset.split(",") if part.strip()]
    names = set()
    for raw in subset:
        key = raw.strip().lower()
        if key not in _ALIASES:
            raise InputError(f"unknown stream '{raw}' (expected one of {', '.join(_ALIASES)})")
        names.add(_ALIASES[key])
    if not names:
        raise InputError("stream subset is empty")
    return tuple(name for name in STREAM_NAMES if name in names)


def subset_label(subset: Sequence[str]) -> str:
    return " + ".join(DISPLAY_NAMES[name] for name in parse_subset(subset))


@dataclass(frozen=True)
class StreamScores:
    """Per-stream glaucoma probabilities for one image; absent streams are None."""

    global_prob: Optional[float] = None
    seg_prob: Optional[float] = None
    disc_prob: Optional[float] = None
    polar_prob: Optional[float] = None

    def __post_init__(self):
        present = self.as_dict()
        if not present:
            raise InputError("StreamScores needs at least one score")
        for name, value in present.items():
            if not 0.0 <= value <= 1.0:
                raise InputError(f"{name} score {value} outside [0, 1]")

    def as_dict(self) -> Dict[str, float]:
        values = {
            "global": self.global_prob,
            "seg_guided": self.seg_prob,
            "disc": self.disc_prob,
            "polar": self.polar_prob,
        }
        return {name: float(v) for name, v in values.items() if v is not None}

    def get(self, name: str) -> Optional[float]:
        return self.as_dict().get(parse_subset([name])[0])

    @classmethod
    def from_dict(cls, values: Dict[str, float]) -> "StreamScores":
        canonical = {parse_subset([name])[0]: value for name, value in values.items()}
        return cls(
            global_prob=canonical.get("global"),
            seg_prob=canonical.get("seg_guided"),
            disc_prob=canonical.get("disc"),
            polar_prob=canonical.get("polar"),
        )


def fuse(scores: StreamScores, mode: str = "average",
         subset: Union[None, str, Iterable[str]] = None) -> float:
    """
    Combine the selected stream probabilities with one unweighted operator.

    Raises:
        InputError: A requested stream has no score
        ParameterError: Unknown fusion mode
    """
    names = parse_subset(subset)
    present = scores.as_dict()
    missing = [name for name in names if name not in present]
    if missing:
        raise InputError(f"missing score for stream(s): {', '.join(missing)}")
    values = [present[name] for name in names]

    if mode == "average":
        return math.fsum(values) / len(values)
    if mode == "max":
        return max(values)
    if mode == "min":
        return min(values)
    if mode == "multiply":
        return math.prod(sorted(values))
    raise ParameterError(f"unknown fusion mode '{mode}' (expected one of {', '.join(FUSION_MODES)})")


def all_subsets() -> List[Tuple[str, ...]]:
    """The 15 non-empty stream subsets, by size then stream order."""
    return [combo for size in range(1, len(STREAM_NAMES) + 1) for combo in combinations(STREAM_NAMES, size)]


@dataclass(frozen=True)
class CombinationRow:
    subset: Tuple[str, ...]
    mode: str
    auc: float
    bacc: float
    sensitivity: float
    specificity: float
    threshold: float

    @property
    def label(self) -> str:
        return subset_label(self.subset)


ScoredImages = Sequence[Tuple[StreamScores, int]]


def _row(per_image: ScoredImages, subset: Tuple[str, ...], mode: str) -> CombinationRow:
    fused = [fuse(scores, mode, subset) for scores, _ in per_image]
    labels = [label for _, label in per_image]
    summary = summarize(fused, labels)
    return CombinationRow(
        subset=subset,
        mode=mode,
        auc=summary.auc,
        bacc=summary.bacc,
        sensitivity=summary.sensitivity,
        specificity=summary.specificity,
        threshold=summary.threshold,
    )


def evaluate_combinations(per_image: ScoredImages, mode: str = "average") -> List[CombinationRow]:
    """
    AUC, BAcc, Sen and Spe at the best-BAcc threshold for all 15 subsets.

    Raises:
        MetricError: Only one class present
    """
    return [_row(per_image, subset, mode) for subset in all_subsets()]


def compare_fusion_modes(per_image: ScoredImages,
                         subset: Union[None, str, Iterable[str]] = None) -> List[CombinationRow]:
    """One row per fusion operator over the same subset (all four streams by default)."""
    names = parse_subset(subset)
    return [_row(per_image, names, mode) for mode in FUSION_MODES]
