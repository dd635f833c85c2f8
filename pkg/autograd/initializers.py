"""
Weight initialization
"""

from typing import Tuple

import numpy as np


def glorot_uniform(shape: Tuple[int, ...], rng: np.random.Generator,
                   dtype: np.dtype = np.float32) -> np.ndarray:
    """
    Uniform in +-sqrt(6 / (fan_in + fan_out)).

    Conv weights [O, C, k, k] use fan_in = C*k*k, fan_out = O*k*k;
    dense weights [O, I] use fan_in = I, fan_out = O.
    """
    receptive = int(np.prod(shape[2:])) if len(shape) > 2 else 1
    fan_in = shape[1] * receptive
    fan_out = shape[0] * receptive
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)
