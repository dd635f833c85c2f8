"""
Tests for image buffers, PPM files and geometric transforms
"""

import math

import numpy as np
import pytest

from imaging import (
    DEFAULT_STRIDE,
    IDENTITY_JITTER,
    ImageBuffer,
    PolarJitter,
    PolarJitterRange,
    PolarParams,
    crop,
    inverse_polar_transform,
    polar_augment,
    polar_transform,
    read_mask,
    read_ppm,
    resize,
    resize_array,
    resize_mask,
    rotate_flip,
    rotate_flip_array,
    rotate_flip_point,
    write_mask,
    write_ppm,
)
from utils.errors import DimensionError, ImageIOError, ParameterError


def smooth_image(width=96, height=96):
    vv, uu = np.mgrid[0:height, 0:width].astype(np.float64)
    red = 0.5 + 0.4 * np.sin(uu / 9.0) * np.cos(vv / 11.0)
    green = 0.5 + 0.3 * np.cos((uu + vv) / 13.0)
    blue = 0.5 + 0.2 * np.sin(vv / 7.0)
    return ImageBuffer(np.stack([red, green, blue], axis=2))


class TestImageBuffer:
    def test_grayscale_gets_channel_axis(self):
        image = ImageBuffer(np.zeros((4, 5)))
        assert (image.height, image.width, image.channels) == (4, 5, 1)
        assert image.center == (2.0, 1.5)

    def test_rejects_out_of_range(self):
        with pytest.raises(ParameterError):
            ImageBuffer(np.full((2, 2), 1.5))

    def test_rejects_bad_channel_count(self):
        with pytest.raises(DimensionError):
            ImageBuffer(np.zeros((2, 2, 2)))

    def test_pixels_are_read_only(self):
        image = ImageBuffer(np.zeros((2, 2, 3)))
        with pytest.raises(ValueError):
            image.pixels[0, 0, 0] = 1.0

    def test_chw_layout(self):
        image = ImageBuffer(np.random.default_rng(0).random((3, 4, 3)))
        chw = image.to_chw()
        assert chw.shape == (3, 3, 4) and chw.dtype == np.float32


class TestPpm:
    def test_round_trip_quantizes_to_bytes(self, tmp_path):
        image = ImageBuffer(np.random.default_rng(1).random((6, 7, 3)))
        loaded = read_ppm(write_ppm(image, tmp_path / "a.ppm"))
        expected = np.floor(image.pixels * 255 + 0.5) / 255
        np.testing.assert_allclose(loaded.pixels, expected, atol=1e-12)

    def test_grayscale_written_as_rgb(self, tmp_path):
        loaded = read_ppm(write_ppm(ImageBuffer(np.full((3, 3), 0.5)), tmp_path / "g.ppm"))
        assert loaded.channels == 3

    def test_mask_round_trip(self, tmp_path):
        mask = np.zeros((5, 5))
        mask[1:3, 2:4] = 1.0
        np.testing.assert_array_equal(read_mask(write_mask(mask, tmp_path / "m.ppm")), mask)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImageIOError) as err:
            read_ppm(tmp_path / "missing.ppm")
        assert err.value.path == tmp_path / "missing.ppm"

    def test_garbage_file(self, tmp_path):
        path = tmp_path / "bad.ppm"
        path.write_bytes(b"not an image")
        with pytest.raises(ImageIOError):
            read_ppm(path)


class TestPolar:
    def test_output_size(self):
        params = PolarParams(10.0, 10.0, 8.4)
        assert (params.width, params.height) == (256, 8)
        assert polar_transform(smooth_image(24, 24), params).pixels.shape == (8, 256, 3)

    def test_invalid_params(self):
        with pytest.raises(ParameterError):
            PolarParams(0.0, 0.0, 0.0)
        with pytest.raises(ParameterError):
            PolarParams(0.0, 0.0, 5.0, stride=-1.0)

    def test_angle_shift_is_column_rotation(self):
        image = smooth_image()
        base = PolarParams(47.5, 47.5, 30.0)
        for k in (1, 17, 64, 200):
            shifted = polar_transform(image, base.with_changes(angle_offset=k * DEFAULT_STRIDE))
            expected = np.roll(polar_transform(image, base).pixels, -k, axis=1)
            np.testing.assert_allclose(shifted.pixels, expected, atol=1e-6)

    def test_center_drift_follows_image_shift(self):
        image = smooth_image()
        du, dv = 5, -3
        shifted = np.zeros_like(image.pixels)
        shifted[max(dv, 0):96 + min(dv, 0), max(du, 0):96 + min(du, 0)] = \
            image.pixels[max(-dv, 0):96 - max(dv, 0), max(-du, 0):96 - max(du, 0)]
        params = PolarParams(48.0, 48.0, 25.0)
        original = polar_transform(image, params)
        moved = polar_transform(ImageBuffer(shifted), params.with_changes(center_u=48.0 + du, center_v=48.0 + dv))
        np.testing.assert_allclose(moved.pixels, original.pixels, atol=1e-9)

    def test_round_trip_inside_radius(self):
        image = smooth_image()
        params = PolarParams(47.5, 47.5, 40.0)
        back = inverse_polar_transform(polar_transform(image, params), params, 96, 96)
        vv, uu = np.mgrid[0:96, 0:96]
        inside = np.hypot(uu - 47.5, vv - 47.5) < 0.9 * 40.0
        assert np.abs(back.pixels[inside] - image.pixels[inside]).mean() < 0.01

    def test_inverse_zero_outside_radius(self):
        params = PolarParams(10.0, 10.0, 5.0)
        polar = ImageBuffer(np.ones((params.height, params.width, 1)))
        back = inverse_polar_transform(polar, params, 21, 21)
        assert back.pixels[0, 0, 0] == 0.0
        assert back.pixels[10, 10, 0] == pytest.approx(1.0)

    def test_inverse_checks_polar_shape(self):
        params = PolarParams(10.0, 10.0, 5.0)
        with pytest.raises(ParameterError):
            inverse_polar_transform(ImageBuffer(np.ones((4, 256, 1))), params, 21, 21)

    def test_outside_source_is_zero(self):
        image = ImageBuffer(np.ones((10, 10, 1)))
        polar = polar_transform(image, PolarParams(0.0, 0.0, 30.0))
        assert polar.pixels[29].min() == 0.0

    def test_jitter_apply(self):
        base = PolarParams(10.0, 20.0, 8.0)
        moved = PolarJitter(90, 2, -1, 0.8).apply(base)
        assert (moved.center_u, moved.center_v) == (12.0, 19.0)
        assert moved.radius == pytest.approx(6.4)
        assert moved.angle_offset == pytest.approx(math.pi / 2)

    def test_jitter_rejects_non_right_angles(self):
        with pytest.raises(ParameterError):
            PolarJitter(angle_degrees=45)

    def test_augment_deterministic_in_seed(self):
        image = smooth_image(40, 40)
        base = PolarParams(20.0, 20.0, 12.0)
        jitter = PolarJitterRange(max_drift=2)
        assert polar_augment(image, base, jitter, seed=9) == polar_augment(image, base, jitter, seed=9)

    def test_augment_zero_jitter_is_plain_transform(self):
        image = smooth_image(40, 40)
        base = PolarParams(20.0, 20.0, 12.0)
        assert polar_augment(image, base, IDENTITY_JITTER, seed=3) == polar_transform(image, base)

    def test_augment_quarter_turn_shifts_columns(self):
        image = smooth_image()
        base = PolarParams(47.5, 47.5, 30.0)
        quarter = PolarJitterRange(angles=(90,), max_drift=0, radius_scales=(1.0,))
        expected = np.roll(polar_transform(image, base).pixels, -round((math.pi / 2) / DEFAULT_STRIDE), axis=1)
        np.testing.assert_allclose(polar_augment(image, base, quarter, seed=0).pixels, expected, atol=1e-6)

    def test_augment_radius_scale_sets_height(self):
        base = PolarParams(20.0, 20.0, 15.0)
        shrink = PolarJitterRange(angles=(0,), max_drift=0, radius_scales=(0.8,))
        assert polar_augment(smooth_image(40, 40), base, shrink, seed=1).height == round(0.8 * 15.0)


class TestRotateFlip:
    @pytest.mark.parametrize("rotation", [0, 90, 180, 270])
    @pytest.mark.parametrize("flip_h,flip_v", [(False, False), (True, False), (False, True), (True, True)])
    def test_point_map_agrees_with_pixels(self, rotation, flip_h, flip_v):
        array = np.zeros((5, 7))
        array[1, 4] = 1.0
        out = rotate_flip_array(array, rotation, flip_h, flip_v)
        u, v = rotate_flip_point(4, 1, 7, 5, rotation, flip_h, flip_v)
        assert out[int(v), int(u)] == 1.0

    def test_invalid_rotation(self):
        with pytest.raises(ParameterError):
            rotate_flip(ImageBuffer(np.zeros((2, 2))), 45)

    def test_full_turn_is_identity(self):
        image = smooth_image(6, 4)
        out = image
        for _ in range(4):
            out = rotate_flip(out, 90)
        assert out == image

    def test_half_turn_is_both_flips(self):
        image = smooth_image(6, 4)
        assert rotate_flip(image, 180) == rotate_flip(rotate_flip(image, flip_h=True), flip_v=True)
        assert rotate_flip(image, 180) == rotate_flip(image, 0, True, True)


class TestCropResize:
    def test_crop_centered(self):
        array = np.arange(100, dtype=np.float64).reshape(10, 10) / 100
        out = crop(ImageBuffer(array), 5.0, 5.0, 3)
        np.testing.assert_allclose(out.pixels[:, :, 0], array[4:7, 4:7])

    def test_crop_outside_is_zero(self):
        out = crop(ImageBuffer(np.ones((4, 4))), 0.0, 0.0, 4)
        assert out.pixels[0, 0, 0] == 0.0
        assert out.pixels[3, 3, 0] == 1.0

    def test_resize_same_size_is_copy(self):
        array = np.random.default_rng(2).random((5, 5))
        out = resize_array(array, 5, 5)
        np.testing.assert_array_equal(out, array)
        assert out is not array

    def test_resize_keeps_constants(self):
        out = resize(ImageBuffer(np.full((7, 9, 3), 0.25)), 4, 3)
        assert out.pixels.shape == (3, 4, 3)
        np.testing.assert_allclose(out.pixels, 0.25)

    def test_resize_mask_stays_binary(self):
        mask = np.zeros((8, 8))
        mask[2:6, 2:6] = 1.0
        out = resize_mask(mask, 4)
        assert set(np.unique(out)) <= {0.0, 1.0}
        assert out[1:3, 1:3].all()
