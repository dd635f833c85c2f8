"""
Utility modules for the screening pipeline
"""

from .console import Console, get_console, set_console
from .errors import (
    ScreeningError,
    DimensionError,
    ParameterError,
    StateError,
    DegenerateInputError,
    NoDiscFoundError,
    InputError,
    MetricError,
    ConfigurationError,
    ManifestParseError,
    ArtifactIOError,
    ImageIOError,
    WeightFileError,
    ReportIOError,
    TrainingError,
)
from .settings import parse_settings_lines, load_settings_file, flatten_settings

__all__ = [
    # Console
    'Console',
    'get_console',
    'set_console',

    # Errors
    'ScreeningError',
    'DimensionError',
    'ParameterError',
    'StateError',
    'DegenerateInputError',
    'NoDiscFoundError',
    'InputError',
    'MetricError',
    'ConfigurationError',
    'ManifestParseError',
    'ArtifactIOError',
    'ImageIOError',
    'WeightFileError',
    'ReportIOError',
    'TrainingError',

    # Settings files
    'parse_settings_lines',
    'load_settings_file',
    'flatten_settings',
]
