"""
One labeled fundus sample as it moves through training and evaluation
"""

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from imaging import ImageBuffer
from utils.errors import DimensionError, ParameterError

if TYPE_CHECKING:
    from screening.localization import DiscLocation


@dataclass(frozen=True, eq=False)
class Sample:
    """Image, glaucoma label, optional disc mask and optional detected disc location."""

    image: ImageBuffer
    label: int
    mask: Optional[np.ndarray] = None
    location: Optional["DiscLocation"] = None
    name: str = ""

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ParameterError(f"label must be 0 or 1, got {self.label}")
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=np.float64)
            if mask.shape != (self.image.height, self.image.width):
                raise DimensionError(
                    f"mask shape {mask.shape} does not match image {self.image.height}x{self.image.width}"
                )
            object.__setattr__(self, "mask", (mask > 0.5).astype(np.float64))

    def with_location(self, location: "DiscLocation") -> "Sample":
        return replace(self, location=location)

    def mask_centroid(self) -> Tuple[float, float]:
        """(u, v) centroid of the ground-truth disc mask."""
        if self.mask is None or not self.mask.any():
            raise ParameterError(f"sample '{self.name}' has no disc mask")
        rows, cols = np.nonzero(self.mask)
        return float(cols.mean()), float(rows.mean())
