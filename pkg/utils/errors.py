"""
Error types for the screening pipeline
Every failure the pipeline reports on purpose derives from ScreeningError
"""

from pathlib import Path
from typing import Optional, Union


class ScreeningError(Exception):
    """Base class for all expected pipeline failures."""

    exit_code: int = 1


class DimensionError(ScreeningError, ValueError):
    """Tensor or image shapes do not agree with an operation's contract."""


class ParameterError(ScreeningError, ValueError):
    """An operation or builder received an out-of-range parameter."""


class StateError(ScreeningError, RuntimeError):
    """An object is in the wrong lifecycle state for the requested call."""


class DegenerateInputError(ScreeningError, ValueError):
    """Input makes a quantity undefined (e.g. a zero Dice denominator)."""


class NoDiscFoundError(ScreeningError):
    """The disc probability map holds no pixel above the threshold."""


class InputError(ScreeningError, ValueError):
    """Caller supplied inconsistent inputs (missing scores, length mismatch)."""


class MetricError(ScreeningError, ValueError):
    """A metric is undefined for the given labels (e.g. a single class)."""

    exit_code = 4


class ConfigurationError(ScreeningError, ValueError):
    """Pipeline configuration is invalid or incomplete."""

    exit_code = 2


class ManifestParseError(ScreeningError, ValueError):
    """A manifest line could not be parsed."""

    exit_code = 2

    def __init__(self, path: Union[str, Path], line_number: int, reason: str):
        self.path = Path(path)
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"{self.path}:{line_number}: {reason}")


class ArtifactIOError(ScreeningError, OSError):
    """A file the pipeline reads or writes is missing, malformed or unwritable."""

    exit_code = 3

    def __init__(self, path: Union[str, Path], reason: str):
        self.path = Path(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")


class ImageIOError(ArtifactIOError):
    """An image or mask file."""


class WeightFileError(ArtifactIOError):
    """A stream weight file or the weights directory."""


class ReportIOError(ArtifactIOError):
    """An evaluation report or training log."""


class TrainingError(ScreeningError, RuntimeError):
    """Training diverged (non-finite loss) for a named stream."""

    exit_code = 5

    def __init__(self, stream: str, reason: str, epoch: Optional[int] = None):
        self.stream = stream
        self.epoch = epoch
        where = f" at epoch {epoch}" if epoch is not None else ""
        super().__init__(f"stream '{stream}'{where}: {reason}")
