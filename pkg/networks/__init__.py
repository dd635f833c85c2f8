"""The four screening streams: builders, two-phase training, prediction and weight files."""

from .config import (
    StreamConfig,
    StreamKind,
    TrainingConfig,
    STREAM_KINDS,
    RESIDUAL_KINDS,
)
from .model import StreamModel, PHASES
from .residual import build_residual_stream, residual_forward
from .seg_guided import build_seg_guided, seg_guided_forward
from .builders import build_stream
from .training import (
    FrozenFeatures,
    TrainingLog,
    TrainingRecord,
    train_segmentation_phase,
    train_classifier_phase,
)
from .inference import SegGuidedOutput, predict, predict_disc_map, network_input
from .serialization import save_model, load_model, model_to_bytes, model_from_bytes

__all__ = [
    # Configuration
    "StreamConfig",
    "StreamKind",
    "TrainingConfig",
    "STREAM_KINDS",
    "RESIDUAL_KINDS",
    # Models
    "StreamModel",
    "PHASES",
    "build_residual_stream",
    "build_seg_guided",
    "build_stream",
    "residual_forward",
    "seg_guided_forward",
    # Training
    "FrozenFeatures",
    "TrainingLog",
    "TrainingRecord",
    "train_segmentation_phase",
    "train_classifier_phase",
    # Prediction
    "SegGuidedOutput",
    "predict",
    "predict_disc_map",
    "network_input",
    # Weight files
    "save_model",
    "load_model",
    "model_to_bytes",
    "model_from_bytes",
]
