"""
End-to-end screening pipeline
Training order: seg_guided (segmentation, then frozen-encoder classification),
disc localization of every training image, then the global, disc and polar
classifier streams, optionally on a worker pool.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from autograd import dice_overlap
from datasets import Sample, augment_for_stream
from imaging import ImageBuffer, resize_mask
from networks import (
    RESIDUAL_KINDS,
    STREAM_KINDS,
    StreamModel,
    TrainingLog,
    build_stream,
    load_model,
    network_input,
    predict,
    predict_disc_map,
    save_model,
    train_classifier_phase,
    train_segmentation_phase,
)
from utils.console import Console, get_console
from utils.errors import ConfigurationError, InputError, WeightFileError

from .config import PipelineConfig
from .ensemble import StreamScores, fuse, parse_subset
from .localization import (
    DiscLocation,
    binarize_map,
    crop_for_streams,
    locate_or_fallback,
    localization_error,
    polar_for_streams,
)

WEIGHTS_SUFFIX = ".weights"


def weights_path(weights_dir: Union[str, Path], kind: str) -> Path:
    return Path(weights_dir) / f"{kind}{WEIGHTS_SUFFIX}"


def required_streams(subset: Iterable[str]) -> Tuple[str, ...]:
    """Streams needed to score subset; disc and polar views need seg_guided's disc map."""
    names = set(parse_subset(tuple(subset)))
    if names & {"disc", "polar"}:
        names.add("seg_guided")
    return tuple(kind for kind in STREAM_KINDS if kind in names)


@dataclass
class StreamSet:
    """Trained stream models keyed by kind."""

    models: Dict[str, StreamModel] = field(default_factory=dict)

    def __getitem__(self, kind: str) -> StreamModel:
        try:
            return self.models[kind]
        except KeyError:
            raise InputError(f"no trained '{kind}' stream loaded") from None

    def __contains__(self, kind: str) -> bool:
        return kind in self.models

    def save(self, weights_dir: Union[str, Path]) -> List[Path]:
        return [save_model(self.models[kind], weights_path(weights_dir, kind))
                for kind in STREAM_KINDS if kind in self.models]

    @classmethod
    def load(cls, weights_dir: Union[str, Path], kinds: Iterable[str] = STREAM_KINDS) -> "StreamSet":
        """
        Load <kind>.weights for each kind.

        Raises:
            WeightFileError: A weight file is missing or malformed
        """
        models = {}
        for kind in kinds:
            path = weights_path(weights_dir, kind)
            if not path.is_file():
                raise WeightFileError(path, f"missing weight file for the {kind} stream")
            model = load_model(path)
            if model.kind != kind:
                raise WeightFileError(path, f"holds a {model.kind} stream, expected {kind}")
            models[kind] = model
        return cls(models)


def map_scale(image: ImageBuffer, side: int) -> Tuple[float, float]:
    """Per-axis image-over-map scale of a side x side disc map."""
    return image.width / side, image.height / side


def locate(seg_model: StreamModel, image: ImageBuffer, config: PipelineConfig,
           console: Optional[Console] = None) -> DiscLocation:
    """Disc location in image pixels; falls back to the image center when the map is empty."""
    disc_map = predict_disc_map(seg_model, image)
    return locate_or_fallback(
        disc_map, image, map_scale(image, seg_model.config.input_side),
        config.localization.threshold, console,
    )


def _check_training_set(samples: Sequence[Sample]) -> None:
    labels = {sample.label for sample in samples}
    if labels != {0, 1}:
        raise InputError(f"training set needs both classes, got labels {sorted(labels)}")
    missing = [sample.name for sample in samples if sample.mask is None]
    if missing:
        raise ConfigurationError(
            f"segmentation phase needs disc masks; {len(missing)} sample(s) have none (first: '{missing[0]}')"
        )


class _StreamTrainer:
    """Per-stream augmentation-aware prepare functions bound to one config."""

    def __init__(self, config: PipelineConfig, console: Console):
        self.config = config
        self.console = console

    def _view(self, kind: str, sample: Sample, epoch: int, index: int):
        seed = (self.config.seed, STREAM_KINDS.index(kind), epoch, index)
        return augment_for_stream(
            sample, kind, seed, self.config.augment,
            crop_ratio=self.config.localization.crop_ratio,
            polar_stride=self.config.polar.stride,
        )

    def segmentation_prepare(self, model: StreamModel):
        def prepare(sample: Sample, epoch: int, index: int):
            view = self._view(model.kind, sample, epoch, index)
            return network_input(view.image, model.config), resize_mask(view.mask, model.config.input_side)

        return prepare

    def classifier_prepare(self, model: StreamModel):
        def prepare(sample: Sample, epoch: int, index: int):
            view = self._view(model.kind, sample, epoch, index)
            return network_input(view.image, model.config), view.label

        return prepare

    def classifier(self, kind: str, samples: Sequence[Sample]) -> Tuple[StreamModel, TrainingLog]:
        model = build_stream(self.config.stream.get(kind), seed=self.config.stream_seed(kind))
        log = TrainingLog()
        self.console.log(f"Training {kind} stream ({model.parameter_count()} parameters)", "info")
        train_classifier_phase(
            model, samples, self.config.training.classifier_epochs, self.config.sgd.classifier,
            self.config.training, seed=self.config.stream_seed(kind),
            prepare=self.classifier_prepare(model), log=log, console=self.console,
        )
        return model, log


def train_pipeline(samples: Sequence[Sample], config: PipelineConfig,
                   console: Optional[Console] = None) -> Tuple[StreamSet, TrainingLog]:
    """
    Train all four streams.

    Returns:
        Fully trained models and the merged per-epoch training log (stream order)

    Raises:
        ConfigurationError: A sample has no disc mask
        InputError: The training set lacks a class
        TrainingError: A stream's loss diverged
    """
    console = console or get_console()
    _check_training_set(samples)
    trainer = _StreamTrainer(config, console)
    training = config.training
    log = TrainingLog()

    seg = build_stream(config.stream.seg_guided, seed=config.stream_seed("seg_guided"))
    console.log(f"Training seg_guided stream ({seg.parameter_count()} parameters)", "info")
    train_segmentation_phase(
        seg, samples, training.segmentation_epochs, config.sgd.segmentation, training,
        seed=config.stream_seed("seg_guided"), prepare=trainer.segmentation_prepare(seg),
        log=log, console=console,
    )
    train_classifier_phase(
        seg, samples, training.classifier_epochs, config.sgd.classifier, training,
        seed=config.stream_seed("seg_guided"), prepare=trainer.classifier_prepare(seg),
        log=log, console=console,
    )

    located = [sample.with_location(locate(seg, sample.image, config, console)) for sample in samples]
    fallbacks = sum(1 for sample in located if sample.location.fallback)
    if fallbacks:
        console.log(f"{fallbacks} training image(s) used the fallback disc location", "warning")

    if training.workers > 1:
        with ThreadPoolExecutor(max_workers=min(training.workers, len(RESIDUAL_KINDS))) as pool:
            futures = {kind: pool.submit(trainer.classifier, kind, located) for kind in RESIDUAL_KINDS}
            results = {kind: future.result() for kind, future in futures.items()}
    else:
        results = {kind: trainer.classifier(kind, located) for kind in RESIDUAL_KINDS}

    models = {"seg_guided": seg}
    for kind in RESIDUAL_KINDS:
        models[kind], stream_log = results[kind]
        log.extend(stream_log)
    console.log("All streams trained", "success")
    return StreamSet(models), log


@dataclass(frozen=True)
class ScreeningResult:
    """Outcome of screening one image."""

    name: str
    location: Optional[DiscLocation]
    scores: StreamScores
    fused: float
    mode: str
    subset: Tuple[str, ...]
    disc_map: Optional[np.ndarray] = None

    @property
    def fallback(self) -> bool:
        return self.location is not None and self.location.fallback


def screen_image(streams: StreamSet, image: ImageBuffer, config: PipelineConfig,
                 name: str = "", console: Optional[Console] = None) -> ScreeningResult:
    """
    Score one image with the configured stream subset and fuse the probabilities.

    Raises:
        InputError: A stream needed by the subset is not loaded
    """
    subset = config.fusion.subset
    needed = required_streams(subset)
    values: Dict[str, float] = {}
    location = None
    disc_map = None

    if "seg_guided" in needed:
        seg_output = predict(streams["seg_guided"], image)
        disc_map = seg_output.disc_map[0]
        location = locate_or_fallback(
            disc_map, image, map_scale(image, streams["seg_guided"].config.input_side),
            config.localization.threshold, console,
        )
        values["seg_guided"] = seg_output.glaucoma_prob
    if "global" in needed:
        values["global"] = predict(streams["global"], image)
    if "disc" in needed:
        values["disc"] = predict(streams["disc"], crop_for_streams(image, location, config.localization.crop_ratio))
    if "polar" in needed:
        polar = polar_for_streams(image, location, config.localization.crop_ratio, config.polar.stride)
        values["polar"] = predict(streams["polar"], polar)

    scores = StreamScores.from_dict(values)
    return ScreeningResult(
        name=name,
        location=location,
        scores=scores,
        fused=fuse(scores, config.fusion.mode, subset),
        mode=config.fusion.mode,
        subset=subset,
        disc_map=disc_map,
    )


@dataclass
class EvaluationResult:
    """Per-image stream scores plus disc-map quality on a labeled set."""

    names: List[str] = field(default_factory=list)
    per_image: List[Tuple[StreamScores, int]] = field(default_factory=list)
    dice: List[float] = field(default_factory=list)
    localization_errors: List[float] = field(default_factory=list)
    fallbacks: int = 0

    @property
    def labels(self) -> List[int]:
        return [label for _, label in self.per_image]

    def stream_scores(self, kind: str) -> List[float]:
        return [scores.get(kind) for scores, _ in self.per_image]

    @property
    def mean_dice(self) -> Optional[float]:
        return float(np.mean(self.dice)) if self.dice else None

    def localized_within(self, fraction: float) -> Optional[float]:
        """Share of images whose center error is below fraction of the image side."""
        if not self.localization_errors:
            return None
        return float(np.mean([error < fraction for error in self.localization_errors]))


def evaluate_pipeline(streams: StreamSet, samples: Sequence[Sample], config: PipelineConfig,
                      console: Optional[Console] = None) -> EvaluationResult:
    """Score every sample with all four streams; masks add Dice and localization error."""
    console = console or get_console()
    everything = config.model_copy(update={"fusion": config.fusion.model_copy(update={"subset": STREAM_KINDS})})
    result = EvaluationResult()
    for index, sample in enumerate(samples):
        screened = screen_image(streams, sample.image, everything, name=sample.name, console=console)
        result.names.append(sample.name or f"image_{index:05d}")
        result.per_image.append((screened.scores, sample.label))
        result.fallbacks += int(screened.fallback)
        if sample.mask is not None and sample.mask.any():
            side = streams["seg_guided"].config.input_side
            predicted = binarize_map(screened.disc_map, config.localization.threshold)
            result.dice.append(dice_overlap(predicted, resize_mask(sample.mask, side)))
            true_u, true_v = sample.mask_centroid()
            result.localization_errors.append(
                localization_error(screened.location, true_u, true_v, sample.image.width)
            )
        console.log_verbose(f"{result.names[-1]}: fused {fuse(screened.scores):.4f} label {sample.label}")
    return result
