"""
Report writers
Every number is printed with 4 decimals so reports are byte-identical across reruns.
"""

import csv
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from networks import STREAM_KINDS
from utils.errors import ReportIOError

from .ensemble import (
    DISPLAY_NAMES,
    FUSION_MODES,
    CombinationRow,
    compare_fusion_modes,
    evaluate_combinations,
    fuse,
    subset_label,
)
from .metrics import OperatingPoint, RocCurve, roc_curve, spe_at_sensitivity, summarize
from .pipeline import EvaluationResult, ScreeningResult

PathLike = Union[str, Path]


def fmt(value: Optional[float]) -> str:
    if value is None:
        return "-"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.4f}"


def exact(value: Optional[float]) -> str:
    """Shortest text that parses back to the same float."""
    return "-" if value is None else repr(float(value))


def _write_rows(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]], delimiter: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, delimiter=delimiter, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise ReportIOError(path, f"cannot write report ({exc.strerror or exc})") from exc
    return path


def screening_lines(result: ScreeningResult) -> List[str]:
    """Line-oriented report of one screened image."""
    lines = [f"image: {result.name}"]
    if result.location is not None:
        loc = result.location
        lines.append(f"disc_center: {fmt(loc.center_u)} {fmt(loc.center_v)}")
        lines.append(f"disc_diameter: {fmt(loc.diameter)}")
        lines.append(f"disc_confidence: {fmt(loc.confidence)}")
        lines.append(f"disc_fallback: {'yes' if loc.fallback else 'no'}")
    scores = result.scores.as_dict()
    for kind in STREAM_KINDS:
        if kind in scores:
            lines.append(f"{kind}: {fmt(scores[kind])}")
    lines.append(f"fused ({result.mode}, {subset_label(result.subset)}): {fmt(result.fused)}")
    return lines


def location_lines(name: str, location) -> List[str]:
    return [
        f"image: {name}",
        f"disc_center: {fmt(location.center_u)} {fmt(location.center_v)}",
        f"disc_diameter: {fmt(location.diameter)}",
        f"disc_confidence: {fmt(location.confidence)}",
        f"disc_fallback: {'yes' if location.fallback else 'no'}",
    ]


def write_roc_csv(curve: RocCurve, path: PathLike) -> Path:
    """(threshold, sensitivity, specificity) points, sentinel first."""
    rows = [[fmt(t), fmt(sen), fmt(spe)] for t, sen, spe in curve.rows()]
    return _write_rows(Path(path), ["threshold", "sensitivity", "specificity"], rows, ",")


def write_scores_tsv(result: EvaluationResult, path: PathLike) -> Path:
    """Per-image stream probabilities, for recomputing every metric independently."""
    rows = []
    for name, (scores, label) in zip(result.names, result.per_image):
        values = scores.as_dict()
        rows.append([name, str(label)] + [exact(values.get(kind)) for kind in STREAM_KINDS])
    return _write_rows(Path(path), ["image", "label", *STREAM_KINDS], rows, "\t")


def _combination_row(row: CombinationRow, table: str) -> List[str]:
    return [table, row.label, row.mode, fmt(row.auc), fmt(row.bacc),
            fmt(row.sensitivity), fmt(row.specificity), fmt(row.threshold)]


def combination_rows(result: EvaluationResult, mode: str = "average") -> List[Tuple[str, CombinationRow]]:
    """15 subset rows under mode followed by the 4 fusion-operator rows on all streams."""
    rows = [("subset", row) for row in evaluate_combinations(result.per_image, mode)]
    rows.extend(("operator", row) for row in compare_fusion_modes(result.per_image))
    return rows


def write_combinations_tsv(rows: Sequence[Tuple[str, CombinationRow]], path: PathLike) -> Path:
    header = ["table", "streams", "fusion", "AUC", "BAcc", "Sen", "Spe", "threshold"]
    return _write_rows(Path(path), header, [_combination_row(row, table) for table, row in rows], "\t")


def high_sensitivity_points(result: EvaluationResult, mode: str = "average",
                            floor: float = 0.95) -> Dict[str, OperatingPoint]:
    """Specificity at Sen >= floor for each stream and the fused ensemble."""
    labels = result.labels
    points = {}
    for kind in STREAM_KINDS:
        points[DISPLAY_NAMES[kind]] = spe_at_sensitivity(roc_curve(result.stream_scores(kind), labels), floor)
    fused = [fuse(scores, mode) for scores, _ in result.per_image]
    points["Ensemble"] = spe_at_sensitivity(roc_curve(fused, labels), floor)
    return points


def evaluation_report(result: EvaluationResult, mode: str = "average", floor: float = 0.95,
                      combinations: Optional[Sequence[Tuple[str, CombinationRow]]] = None) -> str:
    """Full text report: per-stream rows, subset table, operator study, high-sensitivity table."""
    labels = result.labels
    positives = sum(labels)
    lines = [f"images: {len(labels)} (glaucoma {positives}, normal {len(labels) - positives})"]
    if result.mean_dice is not None:
        lines.append(f"mean disc dice: {fmt(result.mean_dice)}")
        lines.append(f"localized within 5% of side: {fmt(result.localized_within(0.05))}")
    lines.append(f"fallback locations: {result.fallbacks}")

    lines.append("")
    lines.append("stream\tAUC\tBAcc\tSen\tSpe")
    for kind in STREAM_KINDS:
        s = summarize(result.stream_scores(kind), labels)
        lines.append(f"{DISPLAY_NAMES[kind]}\t{fmt(s.auc)}\t{fmt(s.bacc)}\t{fmt(s.sensitivity)}\t{fmt(s.specificity)}")
    fused = summarize([fuse(scores, mode) for scores, _ in result.per_image], labels)
    lines.append(f"Ensemble\t{fmt(fused.auc)}\t{fmt(fused.bacc)}\t{fmt(fused.sensitivity)}\t{fmt(fused.specificity)}")

    combinations = combinations if combinations is not None else combination_rows(result, mode)
    lines.append("")
    lines.append("table\tstreams\tfusion\tAUC\tBAcc\tSen\tSpe")
    for table, row in combinations:
        lines.append("\t".join(_combination_row(row, table)[:-1]))

    lines.append("")
    lines.append(f"Spe at Sen >= {floor:g}")
    lines.append("model\tBAcc\tSen\tSpe")
    for name, point in high_sensitivity_points(result, mode, floor).items():
        lines.append(f"{name}\t{fmt(point.bacc)}\t{fmt(point.sensitivity)}\t{fmt(point.specificity)}")
    return "\n".join(lines) + "\n"


def write_evaluation(result: EvaluationResult, report_dir: PathLike, mode: str = "average",
                     floor: float = 0.95) -> List[Path]:
    """
    Write report.txt, combinations.tsv, scores.tsv and one roc_<model>.csv per stream and the ensemble.

    Raises:
        MetricError: Only one class present
        ReportIOError: A file cannot be written
    """
    report_dir = Path(report_dir)
    combinations = combination_rows(result, mode)
    written = [
        write_scores_tsv(result, report_dir / "scores.tsv"),
        write_combinations_tsv(combinations, report_dir / "combinations.tsv"),
    ]
    labels = result.labels
    for kind in STREAM_KINDS:
        written.append(write_roc_csv(roc_curve(result.stream_scores(kind), labels), report_dir / f"roc_{kind}.csv"))
    fused = [fuse(scores, mode) for scores, _ in result.per_image]
    written.append(write_roc_csv(roc_curve(fused, labels), report_dir / "roc_ensemble.csv"))

    report = report_dir / "report.txt"
    try:
        report.write_text(evaluation_report(result, mode, floor, combinations), encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(report, f"cannot write report ({exc.strerror or exc})") from exc
    written.append(report)
    return written
