"""
Desk-scale pipeline run: train on synthetic fundus images, evaluate held-out sets
"""

import time

import pytest

from datasets import SyntheticSpec, generate_synthetic
from networks import STREAM_KINDS
from screening import (
    PipelineConfig,
    evaluate_combinations,
    evaluate_pipeline,
    fuse,
    roc_curve,
    spe_at_sensitivity,
    summarize,
    train_pipeline,
    write_evaluation,
)

pytestmark = pytest.mark.slow

DESK_MINUTES = 30


@pytest.fixture(scope="module")
def desk_run():
    config = PipelineConfig(seed=0)
    train = generate_synthetic(SyntheticSpec(image_side=128, seed=100), 200)
    test = generate_synthetic(SyntheticSpec(image_side=128, seed=200), 100)
    started = time.perf_counter()
    streams, log = train_pipeline(train, config)
    elapsed = time.perf_counter() - started
    return config, streams, log, evaluate_pipeline(streams, test, config), elapsed


def test_training_finishes_within_budget(desk_run):
    *_, elapsed = desk_run
    assert elapsed < DESK_MINUTES * 60


def test_disc_maps_and_localization(desk_run):
    _, _, _, result, _ = desk_run
    assert result.mean_dice > 0.8
    assert result.localized_within(0.05) >= 0.9


def test_every_stream_separates_classes(desk_run):
    _, _, _, result, _ = desk_run
    for kind in STREAM_KINDS:
        assert summarize(result.stream_scores(kind), result.labels).auc > 0.85, kind


def test_ensemble_keeps_up_with_best_stream(desk_run):
    _, _, _, result, _ = desk_run
    rows = evaluate_combinations(result.per_image, "average")
    best_single = max(row.auc for row in rows if len(row.subset) == 1)
    ensemble = next(row for row in rows if row.subset == STREAM_KINDS)
    assert ensemble.auc >= 0.9
    assert ensemble.auc >= best_single - 0.02


def test_high_sensitivity_on_imbalanced_set(desk_run):
    config, streams, _, _, _ = desk_run
    imbalanced = generate_synthetic(SyntheticSpec(image_side=128, seed=300, positive_fraction=0.1), 100)
    result = evaluate_pipeline(streams, imbalanced, config)
    assert sum(result.labels) == 10
    fused = [fuse(scores) for scores, _ in result.per_image]
    point = spe_at_sensitivity(roc_curve(fused, result.labels), 0.95)
    assert point.sensitivity >= 0.95
    assert 0.0 <= point.specificity <= 1.0


def test_reports_are_reproducible(desk_run, tmp_path):
    config, streams, _, result, _ = desk_run
    test = generate_synthetic(SyntheticSpec(image_side=128, seed=200), 100)
    again = evaluate_pipeline(streams, test, config)
    first = write_evaluation(result, tmp_path / "first")
    second = write_evaluation(again, tmp_path / "second")
    assert [p.name for p in first] == [p.name for p in second]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes(), a.name
