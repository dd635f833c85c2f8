"""
Shared fixtures
"""

import io

import numpy as np
import pytest

from datasets import SyntheticSpec, generate_synthetic
from networks import StreamConfig
from utils.console import Console, set_console


@pytest.fixture(autouse=True)
def quiet_console(monkeypatch):
    """Route library console output to a buffer and clear DISCSCREEN_* defaults."""
    for name in ("DISCSCREEN_CONFIG", "DISCSCREEN_SEED", "DISCSCREEN_WEIGHTS_DIR",
                 "DISCSCREEN_REPORT_DIR", "DISCSCREEN_VERBOSE"):
        monkeypatch.delenv(name, raising=False)
    console = Console(verbose=True, stream=io.StringIO())
    set_console(console)
    yield console
    set_console(Console(verbose=False))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_configs():
    """Smallest valid network of each kind (fast enough for unit tests)."""
    return {
        "global": StreamConfig(kind="global", input_side=16, base_channels=2, depth=2),
        "seg_guided": StreamConfig(kind="seg_guided", input_side=16, base_channels=2, depth=2,
                                   channel_affine=False),
        "disc": StreamConfig(kind="disc", input_side=16, base_channels=2, depth=2),
        "polar": StreamConfig(kind="polar", input_side=16, base_channels=2, depth=2),
    }


@pytest.fixture
def tiny_settings():
    """PipelineConfig settings tree with tiny streams and a couple of epochs."""
    return {
        "seed": "3",
        "stream": {
            "global": {"input_side": "16", "base_channels": "2", "depth": "2"},
            "seg_guided": {"input_side": "32", "base_channels": "2", "depth": "2"},
            "disc": {"input_side": "16", "base_channels": "2", "depth": "2"},
            "polar": {"input_side": "16", "base_channels": "2", "depth": "2"},
        },
        "training": {"segmentation_epochs": "2", "classifier_epochs": "2", "batch_size": "4"},
        "polar": {"bins": "32"},
        "synthetic": {"image_side": "32"},
    }


@pytest.fixture
def small_samples():
    """Eight 32-pixel synthetic samples, balanced."""
    return generate_synthetic(SyntheticSpec(image_side=32, seed=5), 8)
