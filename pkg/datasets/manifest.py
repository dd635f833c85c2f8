"""
Dataset manifests
One record per line, tab-separated: image_path, label (0 or 1), optional
mask_path. Relative paths resolve against the manifest's directory.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Union

import numpy as np

from imaging import ImageBuffer, read_mask, read_ppm
from utils.errors import ArtifactIOError, DimensionError, ManifestParseError

from .sample import Sample


@dataclass(frozen=True)
class ManifestRecord:
    image_path: Path
    label: int
    mask_path: Optional[Path] = None

    def load_image(self) -> ImageBuffer:
        return read_ppm(self.image_path)

    def load_mask(self, image: Optional[ImageBuffer] = None) -> Optional[np.ndarray]:
        """Binary mask, checked against the image's dimensions when one is given."""
        if self.mask_path is None:
            return None
        mask = read_mask(self.mask_path)
        if image is not None and mask.shape != (image.height, image.width):
            raise DimensionError(
                f"{self.mask_path}: mask {mask.shape[1]}x{mask.shape[0]} does not match "
                f"image {image.width}x{image.height}"
            )
        return mask

    def load(self) -> Sample:
        image = self.load_image()
        return Sample(image=image, label=self.label, mask=self.load_mask(image), name=self.image_path.stem)


@dataclass
class DatasetManifest:
    records: List[ManifestRecord] = field(default_factory=list)
    path: Optional[Path] = None

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[ManifestRecord]:
        return iter(self.records)

    @property
    def counts(self) -> Dict[int, int]:
        """Records per class label."""
        return {
            0: sum(1 for r in self.records if r.label == 0),
            1: sum(1 for r in self.records if r.label == 1),
        }

    @property
    def has_masks(self) -> bool:
        return bool(self.records) and all(r.mask_path is not None for r in self.records)

    def load_samples(self) -> List[Sample]:
        return [record.load() for record in self.records]


def _parse_line(line: str, number: int, base: Path, source: Path) -> ManifestRecord:
    fields = line.split("\t")
    if len(fields) not in (2, 3):
        raise ManifestParseError(source, number, f"expected 2 or 3 tab-separated fields, got {len(fields)}")
    image_field, label_field = fields[0], fields[1].strip()
    if not image_field.strip():
        raise ManifestParseError(source, number, "empty image path")
    if label_field not in ("0", "1"):
        raise ManifestParseError(source, number, f"label must be 0 or 1, got '{label_field}'")
    mask_path = None
    if len(fields) == 3:
        if not fields[2].strip():
            raise ManifestParseError(source, number, "empty mask path")
        mask_path = base / fields[2]
    return ManifestRecord(base / image_field, int(label_field), mask_path)


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    """
    Parse a manifest; image files are only opened when a record is loaded.

    Raises:
        ArtifactIOError: The manifest itself cannot be read
        ManifestParseError: A line is malformed (carries the line number)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(path, f"cannot read manifest ({exc.strerror or exc})") from exc

    base = path.parent
    records = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        records.append(_parse_line(line, number, base, path))
    return DatasetManifest(records=records, path=path)


def write_manifest(records: Sequence[ManifestRecord], path: Union[str, Path]) -> Path:
    """Write records with paths relative to the manifest's directory."""
    path = Path(path)
    base = path.parent.resolve()

    def rel(p: Path) -> str:
        return Path(os.path.relpath(Path(p).resolve(), base)).as_posix()

    lines = []
    for record in records:
        fields = [rel(record.image_path), str(record.label)]
        if record.mask_path is not None:
            fields.append(rel(record.mask_path))
        lines.append("\t".join(fields))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(path, f"cannot write manifest ({exc.strerror or exc})") from exc
    return path
