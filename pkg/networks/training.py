"""
Two-phase stream training
Phase 1 (seg_guided only): encoder, decoder and map head learn the disc map
under Dice loss. Phase 2: residual streams train end-to-end under BCE; the
seg_guided model trains only its auxiliary dense layers with every conv
parameter frozen.
"""

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from autograd import SegPair, SgdConfig, Tensor, bce_loss, dice_gradient, dice_loss, no_grad, sgd_step
from imaging import ImageBuffer, resize_mask
from utils.console import Console, get_console
from utils.errors import ReportIOError, StateError, TrainingError

from .config import TrainingConfig
from .inference import network_input
from .model import StreamModel
from .residual import residual_forward
from .seg_guided import CLASSIFIER_GROUPS, SEGMENTATION_GROUPS, auxiliary_branch, decode, encode

# prepare(sample, epoch, index) -> (network input [C, side, side], target)
Prepare = Callable[[Any, int, int], Tuple[np.ndarray, Any]]


@dataclass(frozen=True)
class TrainingRecord:
    stream: str
    phase: str
    epoch: int
    loss: float
    learning_rate: float


@dataclass
class TrainingLog:
    """Per-epoch mean losses of every stream and phase, in training order."""

    records: List[TrainingRecord] = field(default_factory=list)

    def append(self, record: TrainingRecord) -> None:
        self.records.append(record)

    def extend(self, other: "TrainingLog") -> None:
        self.records.extend(other.records)

    def losses(self, stream: str, phase: str) -> List[float]:
        return [r.loss for r in self.records if r.stream == stream and r.phase == phase]

    def write_tsv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        try:
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
                writer.writerow(["stream", "phase", "epoch", "loss", "learning_rate"])
                for r in self.records:
                    writer.writerow([r.stream, r.phase, r.epoch, f"{r.loss:.6f}", f"{r.learning_rate:.6g}"])
        except OSError as exc:
            raise ReportIOError(path, f"cannot write training log ({exc.strerror or exc})") from exc
        return path


def segmentation_prepare(model: StreamModel) -> Prepare:
    """Default phase-1 preparation of (ImageBuffer, mask) pairs: resize only."""
    side = model.config.input_side

    def prepare(sample: Tuple[ImageBuffer, np.ndarray], epoch: int, index: int):
        image, mask = sample
        return network_input(image, model.config), resize_mask(mask, side)

    return prepare


def classifier_prepare(model: StreamModel) -> Prepare:
    """Default phase-2 preparation of (ImageBuffer, label) pairs: resize only."""

    def prepare(sample: Tuple[ImageBuffer, int], epoch: int, index: int):
        image, label = sample
        return network_input(image, model.config), int(label)

    return prepare


class FrozenFeatures:
    """
    Saddle features of a frozen encoder, memoized by network-input bytes.

    Right-angle augmentation repeats each input across epochs, so most
    encoder passes after the first few epochs are lookups.
    """

    def __init__(self, model: StreamModel, budget_bytes: int = 256 * 2 ** 20):
        self.model = model
        self.budget_bytes = budget_bytes
        self.used_bytes = 0
        self.hits = 0
        self._store: Dict[bytes, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._store)

    def __call__(self, x: np.ndarray) -> Tensor:
        x = np.ascontiguousarray(x)
        key = hashlib.blake2b(x.tobytes(), digest_size=20).digest() + repr(x.shape).encode()
        saddle = self._store.get(key)
        if saddle is not None:
            self.hits += 1
            return Tensor(saddle)
        with no_grad():
            saddle = encode(self.model, Tensor(x))[0].data
        saddle.setflags(write=False)
        if self.used_bytes + saddle.nbytes <= self.budget_bytes:
            self._store[key] = saddle
            self.used_bytes += saddle.nbytes
        return Tensor(saddle)


class _EpochLoop:
    """Shuffled mini-batches, loss bookkeeping and plateau early stopping."""

    def __init__(self, model: StreamModel, phase: str, data: Sequence[Any], epochs: int,
                 sgd: SgdConfig, training: TrainingConfig, seed: int,
                 log: Optional[TrainingLog], console: Optional[Console]):
        self.model = model
        self.phase = phase
        self.data = data
        self.epochs = epochs
        self.sgd = sgd
        self.training = training
        self.seed = seed
        self.log = log
        self.console = console or get_console()

    def run(self, step: Callable[[Any, int, int, float], float]) -> None:
        """step(sample, epoch, index, scale) back-propagates scale * loss and returns the loss."""
        if self.epochs and not len(self.data):
            raise TrainingError(self.model.kind, f"no training samples for the {self.phase} phase")
        params = list(self.model.parameters.values())
        best = math.inf
        stale = 0
        for epoch in range(self.epochs):
            order = np.random.default_rng([self.seed, epoch]).permutation(len(self.data))
            total = 0.0
            for start in range(0, len(order), self.training.batch_size):
                batch = order[start:start + self.training.batch_size]
                scale = 1.0 / len(batch)
                for index in batch:
                    total += step(self.data[int(index)], epoch, int(index), scale)
                sgd_step(params, self.sgd, epoch)

            loss = total / len(order)
            if not math.isfinite(loss):
                raise TrainingError(self.model.kind, f"non-finite {self.phase} loss", epoch=epoch)
            rate = self.sgd.rate_at(epoch)
            if self.log is not None:
                self.log.append(TrainingRecord(self.model.kind, self.phase, epoch, loss, rate))
            self.console.log_verbose(
                f"{self.model.kind} {self.phase} epoch {epoch + 1}/{self.epochs} loss {loss:.4f} lr {rate:.3g}"
            )

            patience = self.training.patience
            if loss < best - self.training.min_delta:
                best, stale = loss, 0
            else:
                stale += 1
            if patience and stale >= patience:
                self.console.log_verbose(f"{self.model.kind} {self.phase}: loss plateau, stopping at epoch {epoch + 1}")
                break


def train_segmentation_phase(model: StreamModel, data: Sequence[Any], epochs: int, sgd: SgdConfig,
                             training: Optional[TrainingConfig] = None, seed: int = 0,
                             prepare: Optional[Prepare] = None, log: Optional[TrainingLog] = None,
                             console: Optional[Console] = None) -> StreamModel:
    """
    Train the disc map of an untrained seg_guided model with Dice loss.

    The closed-form Dice gradient seeds back-propagation from the map; the
    auxiliary branch is frozen. The model moves to 'seg_trained'.

    Raises:
        StateError: Wrong stream kind or phase
        TrainingError: Non-finite loss
    """
    if model.kind != "seg_guided":
        raise StateError(f"segmentation phase needs a seg_guided model, got '{model.kind}'")
    model.require_phase("untrained")
    training = training or TrainingConfig()
    prepare = prepare or segmentation_prepare(model)
    model.set_trainable(*SEGMENTATION_GROUPS)

    def step(sample: Any, epoch: int, index: int, scale: float) -> float:
        x, mask = prepare(sample, epoch, index)
        saddle, skips = encode(model, Tensor(x))
        disc_map = decode(model, saddle, skips)
        truth = np.asarray(mask, dtype=disc_map.dtype).reshape(disc_map.shape)
        pair = SegPair(disc_map.detach(), truth)
        disc_map.backward(dice_gradient(pair).data * scale)
        return dice_loss(pair).item()

    _EpochLoop(model, "segmentation", data, epochs, sgd, training, seed, log, console).run(step)
    model.set_trainable()
    model.phase = "seg_trained"
    (console or get_console()).log_verbose(f"seg_guided conv digest {model.conv_digest()[:16]}")
    return model


def train_classifier_phase(model: StreamModel, data: Sequence[Any], epochs: int, sgd: SgdConfig,
                           training: Optional[TrainingConfig] = None, seed: int = 0,
                           prepare: Optional[Prepare] = None, log: Optional[TrainingLog] = None,
                           console: Optional[Console] = None) -> StreamModel:
    """
    Train a classification head with BCE and finalize the model.

    Residual streams must be 'untrained' and train every parameter; a
    seg_guided model must be 'seg_trained' and trains only its auxiliary
    dense layers, leaving every conv parameter bit-identical.

    Raises:
        StateError: Wrong phase
        TrainingError: Non-finite loss
    """
    training = training or TrainingConfig()
    prepare = prepare or classifier_prepare(model)
    seg_guided = model.kind == "seg_guided"
    if seg_guided:
        model.require_phase("seg_trained")
        model.set_trainable(*CLASSIFIER_GROUPS)
    else:
        model.require_phase("untrained")
        model.set_trainable(*set(model.groups.values()))
    frozen_digest = model.conv_digest() if seg_guided else None
    features = FrozenFeatures(model) if seg_guided else None

    def step(sample: Any, epoch: int, index: int, scale: float) -> float:
        x, label = prepare(sample, epoch, index)
        if features is not None:
            prob = auxiliary_branch(model, features(x))
        else:
            prob = residual_forward(model, Tensor(x))
        loss = bce_loss(prob, int(label))
        (loss * scale).backward()
        return loss.item()

    _EpochLoop(model, "classification", data, epochs, sgd, training, seed, log, console).run(step)
    if frozen_digest is not None and model.conv_digest() != frozen_digest:
        raise TrainingError(model.kind, "conv parameters changed while frozen")
    model.finalize()
    return model
