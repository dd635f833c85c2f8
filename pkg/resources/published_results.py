"""
Published Reference Results
Per-method screening scores on the SCES and SINDI test sets, specificity at
the 0.95-sensitivity operating point, and the dataset composition, loaded
from the tab-separated tables under resources/data/.
"""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class PublishedScore:
    dataset: str
    method: str
    auc: float
    bacc: float
    sensitivity: float
    specificity: float

    @property
    def recomputed_bacc(self) -> float:
        return (self.sensitivity + self.specificity) / 2


@dataclass(frozen=True)
class HighSensitivityScore:
    """BAcc and Spe at the first operating point reaching Sen >= 0.95."""

    dataset: str
    method: str
    bacc: float
    specificity: float

    @property
    def implied_sensitivity(self) -> float:
        """Achieved sensitivity recovered from BAcc = (Sen + Spe) / 2."""
        return 2 * self.bacc - self.specificity


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    purpose: str
    ground_truth: str
    images: int
    normal: int
    glaucoma: int


def _read_table(name: str) -> List[Dict[str, str]]:
    with (DATA_DIR / name).open(encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle, delimiter="\t"))


PUBLISHED_SCORES: Tuple[PublishedScore, ...] = tuple(
    PublishedScore(row["DATASET"], row["METHOD"], float(row["AUC"]), float(row["BACC"]),
                   float(row["SEN"]), float(row["SPE"]))
    for row in _read_table("published_scores.txt")
)

HIGH_SENSITIVITY_SCORES: Tuple[HighSensitivityScore, ...] = tuple(
    HighSensitivityScore(row["DATASET"], row["METHOD"], float(row["BACC"]), float(row["SPE"]))
    for row in _read_table("high_sensitivity.txt")
)

DATASETS: Dict[str, DatasetInfo] = {
    row["DATASET"]: DatasetInfo(row["DATASET"], row["PURPOSE"], row["GROUND_TRUTH"],
                                int(row["IMAGES"]), int(row["NORMAL"]), int(row["GLAUCOMA"]))
    for row in _read_table("datasets.txt")
}

# Baselines that are not built from the four streams
BASELINE_METHODS = ("Airpuff IOP", "Wavelet", "Gabor", "GRI", "Superpixel", "DeepCDR")


def get_published_score(dataset: str, method: str) -> Optional[PublishedScore]:
    """Look up one row; method names use the stream display names ("Disc + Polar")."""
    for score in PUBLISHED_SCORES:
        if score.dataset == dataset and score.method == method:
            return score
    return None


def get_high_sensitivity_score(dataset: str, method: str) -> Optional[HighSensitivityScore]:
    for score in HIGH_SENSITIVITY_SCORES:
        if score.dataset == dataset and score.method == method:
            return score
    return None


def get_methods(dataset: str) -> List[str]:
    return [score.method for score in PUBLISHED_SCORES if score.dataset == dataset]


def get_stream_combinations(dataset: str) -> List[PublishedScore]:
    """Rows built from the streams (single streams, pairs, triples and the full ensemble)."""
    return [s for s in PUBLISHED_SCORES if s.dataset == dataset and s.method not in BASELINE_METHODS]


def get_quick_reference() -> str:
    """Printable summary of the published tables."""
    lines = ["Published Results - Quick Reference", ""]
    lines.append("Datasets:")
    for info in DATASETS.values():
        lines.append(
            f"  {info.name:<6} {info.purpose:<9} {info.images:>5} images "
            f"({info.normal} normal, {info.glaucoma} glaucoma) - {info.ground_truth}"
        )
    for dataset in ("SCES", "SINDI"):
        lines.append("")
        lines.append(f"{dataset}:  {'method':<22} {'AUC':>6} {'BAcc':>6} {'Sen':>6} {'Spe':>6}")
        for score in PUBLISHED_SCORES:
            if score.dataset == dataset:
                lines.append(
                    f"        {score.method:<22} {score.auc:.4f} {score.bacc:.4f} "
                    f"{score.sensitivity:.4f} {score.specificity:.4f}"
                )
    lines.append("")
    lines.append("Spe at Sen >= 0.95:")
    for score in HIGH_SENSITIVITY_SCORES:
        lines.append(f"  {score.dataset:<6} {score.method:<22} BAcc {score.bacc:.4f}  Spe {score.specificity:.4f}")
    return "\n".join(lines)
