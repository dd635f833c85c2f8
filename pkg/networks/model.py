"""
StreamModel: one stream's configuration, named parameters and lifecycle phase
"""

import hashlib
from typing import Dict, Iterable, List, Literal, Optional

import numpy as np

from autograd import Parameter
from utils.errors import ParameterError, StateError

from .config import StreamConfig

Phase = Literal["untrained", "seg_trained", "fully_trained"]
PHASES = ("untrained", "seg_trained", "fully_trained")


class StreamModel:
    """
    Weights of one stream plus the phase it has reached.

    Parameters are kept in build order and tagged with a group
    (encoder, decoder, map_head, aux, head). A fully trained model is
    read-only and may be shared between threads for prediction.
    """

    def __init__(self, config: StreamConfig, parameters: Iterable[Parameter],
                 groups: Dict[str, str], phase: Phase = "untrained"):
        self.config = config
        self.parameters: Dict[str, Parameter] = {}
        for param in parameters:
            if param.name in self.parameters:
                raise ParameterError(f"duplicate parameter name '{param.name}'")
            self.parameters[param.name] = param
        missing = set(self.parameters) - set(groups)
        if missing:
            raise ParameterError(f"parameters without a group: {sorted(missing)}")
        self.groups = dict(groups)
        if phase not in PHASES:
            raise ParameterError(f"unknown phase '{phase}'")
        self.phase: Phase = phase
        if phase == "fully_trained":
            self.finalize()

    @property
    def kind(self) -> str:
        return self.config.kind

    def __getitem__(self, name: str) -> Parameter:
        return self.parameters[name]

    def in_groups(self, *groups: str) -> List[Parameter]:
        return [p for name, p in self.parameters.items() if self.groups[name] in groups]

    def set_trainable(self, *groups: str) -> None:
        """Make exactly the parameters of the given groups trainable."""
        if self.is_finalized:
            raise StateError(f"{self.kind} model is finalized for inference")
        for name, param in self.parameters.items():
            param.trainable = self.groups[name] in groups

    def require_phase(self, *phases: str) -> None:
        if self.phase not in phases:
            raise StateError(
                f"{self.kind} model is '{self.phase}', expected {' or '.join(phases)}"
            )

    @property
    def is_finalized(self) -> bool:
        return self.phase == "fully_trained"

    def finalize(self) -> None:
        """Enter inference mode: storage becomes read-only and nothing is trainable."""
        for param in self.parameters.values():
            param.trainable = False
            param.velocity = None
            param.zero_grad()
            param.data.setflags(write=False)
        self.phase = "fully_trained"

    def digest(self, groups: Optional[Iterable[str]] = None) -> str:
        """SHA-256 over names, shapes and raw float32 bytes of the selected groups (all if None)."""
        selected = set(groups) if groups is not None else None
        sha = hashlib.sha256()
        for name, param in self.parameters.items():
            if selected is not None and self.groups[name] not in selected:
                continue
            sha.update(name.encode("utf-8"))
            sha.update(np.asarray(param.data.shape, dtype="<u4").tobytes())
            sha.update(np.ascontiguousarray(param.data, dtype="<f4").tobytes())
        return sha.hexdigest()

    def conv_digest(self) -> str:
        """Digest of every convolutional parameter (everything but dense layers)."""
        return self.digest(g for g in set(self.groups.values()) if g not in ("aux", "head"))

    def parameter_count(self) -> int:
        return sum(p.data.size for p in self.parameters.values())

    def __repr__(self) -> str:
        return (
            f"StreamModel(kind={self.kind!r}, phase={self.phase!r}, "
            f"parameters={len(self.parameters)}, values={self.parameter_count()})"
        )
