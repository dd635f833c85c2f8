"""
Binary P6 PPM codec (8-bit RGB) for images and disc masks
"""

from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from utils.errors import ImageIOError

from .buffer import ImageBuffer

PathLike = Union[str, Path]


def read_ppm(path: PathLike) -> ImageBuffer:
    """
    Load a P6 PPM as an RGB ImageBuffer scaled to [0, 1].

    Raises:
        ImageIOError: Missing file, undecodable data, or a format other than P6
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.format != "PPM" or img.mode != "RGB":
                raise ImageIOError(path, f"expected binary P6 PPM, got {img.format} {img.mode}")
            array = np.asarray(img, dtype=np.uint8)
    except FileNotFoundError as exc:
        raise ImageIOError(path, "file not found") from exc
    except (UnidentifiedImageError, OSError) as exc:
        if isinstance(exc, ImageIOError):
            raise
        raise ImageIOError(path, f"cannot decode image ({exc})") from exc
    return ImageBuffer(array.astype(np.float64) / 255.0)


def write_ppm(image: ImageBuffer, path: PathLike) -> Path:
    """Write an ImageBuffer as P6; grayscale is replicated into three channels."""
    path = Path(path)
    pixels = image.pixels
    if image.channels == 1:
        pixels = np.repeat(pixels, 3, axis=2)
    data = np.floor(pixels * 255.0 + 0.5).astype(np.uint8)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(data).save(path, format="PPM")
    except OSError as exc:
        raise ImageIOError(path, f"cannot write image ({exc.strerror or exc})") from exc
    return path


def read_mask(path: PathLike) -> np.ndarray:
    """Load a disc mask stored as PPM; returns a binary float (H, W) array."""
    image = read_ppm(path)
    return (image.gray() >= 0.5).astype(np.float64)


def write_mask(mask: np.ndarray, path: PathLike) -> Path:
    """Store a binary (H, W) mask as a black/white PPM."""
    return write_ppm(ImageBuffer((np.asarray(mask) > 0.5).astype(np.float64)), path)
