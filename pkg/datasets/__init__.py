"""Synthetic fundus data, manifest ingestion and per-stream augmentation."""

from .sample import Sample
from .manifest import (
    DatasetManifest,
    ManifestRecord,
    load_manifest,
    write_manifest,
)
from .synthetic import (
    SyntheticSpec,
    SyntheticSample,
    draw_labels,
    render_sample,
    generate_synthetic,
    export_synthetic,
)
from .augmentation import (
    AugmentConfig,
    AugmentationChoice,
    AugmentedSample,
    draw_augmentation,
    apply_augmentation,
    augment_for_stream,
    polar_jitter_range,
)

__all__ = [
    # Samples
    "Sample",
    # Manifests
    "DatasetManifest",
    "ManifestRecord",
    "load_manifest",
    "write_manifest",
    # Synthetic data
    "SyntheticSpec",
    "SyntheticSample",
    "draw_labels",
    "render_sample",
    "generate_synthetic",
    "export_synthetic",
    # Augmentation
    "AugmentConfig",
    "AugmentationChoice",
    "AugmentedSample",
    "draw_augmentation",
    "apply_augmentation",
    "augment_for_stream",
    "polar_jitter_range",
]
