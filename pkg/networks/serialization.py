"""
Versioned weight files

Layout (little-endian):
    magic b"DSCW", uint32 header length, UTF-8 JSON header
    {format_version, kind, config, phase, parameter_count}
    then per parameter in build order:
    uint16 name length, name, uint8 ndim, uint32 dims[ndim], uint8 trainable,
    float32 values (row-major)
"""

import json
import struct
from pathlib import Path
from typing import Union

import numpy as np

from autograd import Parameter
from utils.errors import ParameterError, WeightFileError

from .builders import build_stream
from .config import StreamConfig
from .model import StreamModel

MAGIC = b"DSCW"
FORMAT_VERSION = 1


def model_to_bytes(model: StreamModel) -> bytes:
    header = json.dumps(
        {
            "format_version": FORMAT_VERSION,
            "kind": model.kind,
            "config": model.config.model_dump(),
            "phase": model.phase,
            "parameter_count": len(model.parameters),
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")

    chunks = [MAGIC, struct.pack("<I", len(header)), header]
    for name, param in model.parameters.items():
        encoded = name.encode("utf-8")
        shape = param.data.shape
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack(f"<B{len(shape)}I", len(shape), *shape))
        chunks.append(struct.pack("<B", int(param.trainable)))
        chunks.append(np.ascontiguousarray(param.data, dtype="<f4").tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes, source: str):
        self.data = data
        self.offset = 0
        self.source = source

    def take(self, count: int) -> bytes:
        if self.offset + count > len(self.data):
            raise WeightFileError(self.source, "weight file is truncated")
        chunk = self.data[self.offset:self.offset + count]
        self.offset += count
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def model_from_bytes(data: bytes, source: str = "<bytes>") -> StreamModel:
    """
    Rebuild a StreamModel from weight-file bytes.

    Raises:
        WeightFileError: Bad magic, unsupported version, truncation or trailing bytes
        ParameterError: Parameter names or shapes disagree with the stored config
    """
    reader = _Reader(data, source)
    if reader.take(len(MAGIC)) != MAGIC:
        raise WeightFileError(source, "not a stream weight file")
    (header_length,) = reader.unpack("<I")
    try:
        header = json.loads(reader.take(header_length).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WeightFileError(source, f"corrupt header ({exc})") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise WeightFileError(source, f"unsupported weight format version {header.get('format_version')}")

    config = StreamConfig(**header["config"])
    template = build_stream(config)
    if len(template.parameters) != header["parameter_count"]:
        raise ParameterError(f"{source}: parameter count does not match the {config.kind} architecture")

    parameters = []
    for expected_name, expected in template.parameters.items():
        (name_length,) = reader.unpack("<H")
        name = reader.take(name_length).decode("utf-8")
        (ndim,) = reader.unpack("<B")
        shape = reader.unpack(f"<{ndim}I")
        (trainable,) = reader.unpack("<B")
        if name != expected_name or tuple(shape) != expected.data.shape:
            raise ParameterError(
                f"{source}: found parameter {name}{list(shape)}, "
                f"expected {expected_name}{list(expected.data.shape)}"
            )
        count = int(np.prod(shape)) if shape else 1
        values = np.frombuffer(reader.take(4 * count), dtype="<f4").astype(np.float32).reshape(shape)
        parameters.append(Parameter(values, trainable=bool(trainable), name=name))
    if reader.offset != len(data):
        raise WeightFileError(source, "trailing bytes after the last parameter")

    return StreamModel(config, parameters, template.groups, phase=header["phase"])


def save_model(model: StreamModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(model_to_bytes(model))
    except OSError as exc:
        raise WeightFileError(path, f"cannot write weights ({exc.strerror or exc})") from exc
    return path


def load_model(path: Union[str, Path]) -> StreamModel:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise WeightFileError(path, f"cannot read weights ({exc.strerror or exc})") from exc
    return model_from_bytes(data, source=str(path))
