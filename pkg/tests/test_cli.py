"""
Tests for the discscreen command line
"""

import pytest

from cli import build_parser, main
from imaging import read_ppm
from utils.errors import ArtifactIOError, ImageIOError, ReportIOError, WeightFileError

TINY_CONF = """\
seed=3
stream.global.input_side=16
stream.global.base_channels=2
stream.global.depth=2
stream.disc.input_side=16
stream.disc.base_channels=2
stream.disc.depth=2
stream.polar.input_side=16
stream.polar.base_channels=2
stream.polar.depth=2
stream.seg_guided.input_side=32
stream.seg_guided.base_channels=2
stream.seg_guided.depth=2
training.segmentation_epochs=2
training.classifier_epochs=2
training.batch_size=4
training.workers=2
polar.bins=32
"""


def generate(out, count=8, seed=1, extra=()):
    return main(["generate", "--count", str(count), "--out", str(out), "--seed", str(seed),
                 "--image-side", "32", *extra])


class TestParser:
    def test_subcommands(self):
        parser = build_parser()
        for command in (["reference"], ["screen", "a.ppm"], ["localize", "a.ppm"], ["train"], ["eval"]):
            assert parser.parse_args(command).command == command[0]

    def test_unknown_fusion_rejected(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["screen", "a.ppm", "--fusion", "median"])


class TestExitCodes:
    @pytest.mark.parametrize("error", [ImageIOError, WeightFileError, ReportIOError, ArtifactIOError])
    def test_file_errors_share_exit_code(self, error):
        err = error("some/file", "unreadable")
        assert isinstance(err, ArtifactIOError) and isinstance(err, OSError)
        assert err.exit_code == 3
        assert str(err) == f"{err.path}: unreadable"


class TestCommands:
    def test_generate(self, tmp_path, capsys):
        assert generate(tmp_path / "set") == 0
        lines = (tmp_path / "set" / "manifest.tsv").read_text().splitlines()
        assert len(lines) == 8
        assert "glaucoma 4, normal 4" in capsys.readouterr().out

    def test_generate_imbalanced(self, tmp_path):
        assert generate(tmp_path / "set", count=10, extra=("--positive-fraction", "0.1")) == 0
        labels = [line.split("\t")[1] for line in (tmp_path / "set" / "manifest.tsv").read_text().splitlines()]
        assert labels.count("1") == 1

    def test_reference(self, capsys):
        assert main(["reference"]) == 0
        assert "SINDI" in capsys.readouterr().out

    def test_transform_round_trip(self, tmp_path):
        generate(tmp_path / "set", count=1)
        image = tmp_path / "set" / "images" / "synthetic_00000.ppm"
        polar = tmp_path / "polar.ppm"
        assert main(["transform", str(image), "--out", str(polar)]) == 0
        assert (read_ppm(polar).width, read_ppm(polar).height) == (256, 16)
        back = tmp_path / "back.ppm"
        assert main(["transform", str(polar), "--inverse", "--size", "32", "32",
                     "--center", "15.5", "15.5", "--radius", "16", "--out", str(back)]) == 0
        assert read_ppm(back).width == 32

    def test_missing_weights_exit_code(self, tmp_path):
        generate(tmp_path / "set", count=1)
        image = tmp_path / "set" / "images" / "synthetic_00000.ppm"
        assert main(["screen", str(image), "--weights-dir", str(tmp_path / "none")]) == 3

    def test_missing_image_exit_code(self, tmp_path):
        assert main(["localize", str(tmp_path / "absent.ppm")]) == 3

    def test_configuration_exit_codes(self, tmp_path):
        assert main(["eval"]) == 2
        assert main(["reference", "--sens-floor", "1.5"]) == 2
        bad = tmp_path / "bad.conf"
        bad.write_text("fusion.mode=median\n")
        assert main(["reference", "--config", str(bad)]) == 2

    def test_single_class_training_set(self, tmp_path):
        generate(tmp_path / "set", count=4, extra=("--positive-fraction", "0"))
        assert main(["train", "--manifest", str(tmp_path / "set" / "manifest.tsv"),
                     "--weights-dir", str(tmp_path / "w")]) == 1


@pytest.mark.slow
def test_train_screen_eval(tmp_path, capsys):
    conf = tmp_path / "tiny.conf"
    conf.write_text(TINY_CONF)
    common = ["--config", str(conf)]
    weights = tmp_path / "weights"
    assert generate(tmp_path / "train") == 0
    assert generate(tmp_path / "test", count=10, seed=2) == 0

    assert main(["train", "--manifest", str(tmp_path / "train" / "manifest.tsv"),
                 "--weights-dir", str(weights), *common]) == 0
    for kind in ("global", "seg_guided", "disc", "polar"):
        assert (weights / f"{kind}.weights").is_file()
    assert (weights / "pipeline.conf").is_file()
    assert len((weights / "training_log.tsv").read_text().splitlines()) == 1 + 2 * 5

    image = tmp_path / "test" / "images" / "synthetic_00000.ppm"
    capsys.readouterr()
    assert main(["screen", str(image), "--weights-dir", str(weights), "--subset", "disc,polar", *common]) == 0
    out = capsys.readouterr().out
    assert "fused (average, Disc + Polar):" in out
    assert "global:" not in out

    assert main(["localize", str(image), "--weights-dir", str(weights), *common]) == 0
    assert "disc_center:" in capsys.readouterr().out

    reports = tmp_path / "reports"
    assert main(["eval", "--manifest", str(tmp_path / "test" / "manifest.tsv"), "--weights-dir", str(weights),
                 "--report-dir", str(reports), *common]) == 0
    assert (reports / "report.txt").read_text() == capsys.readouterr().out
    assert len((reports / "combinations.tsv").read_text().splitlines()) == 20

    rerun = tmp_path / "reports_again"
    assert main(["eval", "--manifest", str(tmp_path / "test" / "manifest.tsv"), "--weights-dir", str(weights),
                 "--report-dir", str(rerun), *common]) == 0
    for report in reports.iterdir():
        assert (rerun / report.name).read_bytes() == report.read_bytes(), report.name

    # Retraining with the same seed reproduces the weights
    again = tmp_path / "again"
    assert main(["train", "--manifest", str(tmp_path / "train" / "manifest.tsv"),
                 "--weights-dir", str(again), *common]) == 0
    for kind in ("global", "seg_guided", "disc", "polar"):
        assert (again / f"{kind}.weights").read_bytes() == (weights / f"{kind}.weights").read_bytes()
