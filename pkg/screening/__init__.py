"""Disc localization, stream fusion, screening metrics and the end-to-end pipeline."""

from .metrics import (
    ConfusionCounts,
    MetricSummary,
    OperatingPoint,
    RocCurve,
    RocPoint,
    auc,
    best_bacc_point,
    confusion,
    pairwise_auc,
    roc_curve,
    sen_spe_bacc,
    spe_at_sensitivity,
    summarize,
)
from .ensemble import (
    DISPLAY_NAMES,
    FUSION_MODES,
    STREAM_NAMES,
    CombinationRow,
    StreamScores,
    all_subsets,
    compare_fusion_modes,
    evaluate_combinations,
    fuse,
    parse_subset,
    subset_label,
)
from .localization import (
    DiscLocation,
    binarize_map,
    crop_for_streams,
    fallback_location,
    largest_component,
    locate_disc,
    locate_or_fallback,
    localization_error,
    polar_for_streams,
    polar_params_for,
)
from .config import PipelineConfig
from .pipeline import (
    EvaluationResult,
    ScreeningResult,
    StreamSet,
    evaluate_pipeline,
    locate,
    required_streams,
    screen_image,
    train_pipeline,
    weights_path,
)
from .reports import (
    evaluation_report,
    high_sensitivity_points,
    location_lines,
    screening_lines,
    write_evaluation,
    write_roc_csv,
)

__all__ = [
    # Metrics
    "ConfusionCounts",
    "MetricSummary",
    "OperatingPoint",
    "RocCurve",
    "RocPoint",
    "auc",
    "best_bacc_point",
    "confusion",
    "pairwise_auc",
    "roc_curve",
    "sen_spe_bacc",
    "spe_at_sensitivity",
    "summarize",
    # Ensemble
    "DISPLAY_NAMES",
    "FUSION_MODES",
    "STREAM_NAMES",
    "CombinationRow",
    "StreamScores",
    "all_subsets",
    "compare_fusion_modes",
    "evaluate_combinations",
    "fuse",
    "parse_subset",
    "subset_label",
    # Localization
    "DiscLocation",
    "binarize_map",
    "crop_for_streams",
    "fallback_location",
    "largest_component",
    "locate_disc",
    "locate_or_fallback",
    "localization_error",
    "polar_for_streams",
    "polar_params_for",
    # Pipeline
    "PipelineConfig",
    "EvaluationResult",
    "ScreeningResult",
    "StreamSet",
    "evaluate_pipeline",
    "locate",
    "required_streams",
    "screen_image",
    "train_pipeline",
    "weights_path",
    # Reports
    "evaluation_report",
    "high_sensitivity_points",
    "location_lines",
    "screening_lines",
    "write_evaluation",
    "write_roc_csv",
]
