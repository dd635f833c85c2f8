"""
Stream construction by kind
"""

from .config import StreamConfig
from .model import StreamModel
from .residual import build_residual_stream
from .seg_guided import build_seg_guided


def build_stream(config: StreamConfig, seed: int = 0) -> StreamModel:
    """Build the untrained network for config.kind with weights drawn from seed."""
    if config.kind == "seg_guided":
        return build_seg_guided(config, seed)
    return build_residual_stream(config, seed)
