"""
Reference data for the screening pipeline
Published per-method results used as golden arithmetic and by the CLI reference command
"""

from .published_results import (
    PUBLISHED_SCORES,
    HIGH_SENSITIVITY_SCORES,
    DATASETS,
    BASELINE_METHODS,
    PublishedScore,
    HighSensitivityScore,
    DatasetInfo,
    get_published_score,
    get_high_sensitivity_score,
    get_methods,
    get_stream_combinations,
    get_quick_reference as get_published_reference,
)

__all__ = [
    # Tables
    'PUBLISHED_SCORES',
    'HIGH_SENSITIVITY_SCORES',
    'DATASETS',
    'BASELINE_METHODS',
    # Row types
    'PublishedScore',
    'HighSensitivityScore',
    'DatasetInfo',
    # Lookups
    'get_published_score',
    'get_high_sensitivity_score',
    'get_methods',
    'get_stream_combinations',
    'get_published_reference',
]
