"""
Tests for the tensor core: primitives, gradients, optimizer
"""

import numpy as np
import pytest

from autograd import (
    Parameter,
    SgdConfig,
    Tensor,
    activate,
    add,
    channel_affine,
    conv2d,
    conv_output_side,
    dense,
    flatten,
    glorot_uniform,
    is_grad_enabled,
    no_grad,
    pool,
    sgd_step,
    upsample_concat,
)
from utils.errors import DimensionError, ParameterError, StateError

from helpers import away_from_zero, gradient_errors

TOLERANCE = 1e-5


def naive_conv(x, w, b, stride, padding):
    channels, height, width = x.shape
    out_c, _, k, _ = w.shape
    xp = np.pad(x, ((0, 0), (padding, padding), (padding, padding)))
    out_h = (height + 2 * padding - k) // stride + 1
    out_w = (width + 2 * padding - k) // stride + 1
    out = np.zeros((out_c, out_h, out_w))
    for o in range(out_c):
        for i in range(out_h):
            for j in range(out_w):
                window = xp[:, i * stride:i * stride + k, j * stride:j * stride + k]
                out[o, i, j] = np.sum(window * w[o]) + (b[o] if b is not None else 0.0)
    return out


class TestTensor:
    def test_broadcast_gradients_are_reduced(self):
        a = Tensor(np.ones((2, 3)), requires_grad=True)
        b = Tensor(np.array([1.0, 2.0, 3.0]), requires_grad=True)
        (a * b).sum().backward()
        np.testing.assert_allclose(a.grad, np.tile([1.0, 2.0, 3.0], (2, 1)))
        np.testing.assert_allclose(b.grad, [2.0, 2.0, 2.0])

    def test_leaf_gradients_accumulate(self):
        x = Tensor(np.array([2.0]), requires_grad=True)
        (x * x).sum().backward()
        (x * 3.0).sum().backward()
        np.testing.assert_allclose(x.grad, [7.0])

    def test_no_grad_records_nothing(self):
        x = Tensor(np.array([1.0, 2.0]), requires_grad=True)
        with no_grad():
            assert not is_grad_enabled()
            y = (x * 2.0).sum()
        assert is_grad_enabled()
        assert not y.requires_grad
        with pytest.raises(StateError):
            y.backward()

    def test_seed_shape_checked(self):
        x = Tensor(np.ones(3), requires_grad=True)
        with pytest.raises(DimensionError):
            (x * 2.0).backward(np.ones(2))

    def test_item_needs_single_element(self):
        with pytest.raises(DimensionError):
            Tensor(np.ones(2)).item()


class TestConvolution:
    @pytest.mark.parametrize(
        "shape,out_c,kernel,stride,padding",
        [
            ((1, 5, 5), 2, 3, 1, 1),
            ((2, 6, 6), 3, 3, 2, 1),
            ((3, 4, 7), 2, 1, 1, 0),
            ((2, 7, 5), 1, 3, 2, 0),
            ((1, 6, 6), 2, 5, 1, 2),
        ],
    )
    def test_matches_naive_loop_and_gradients(self, rng, shape, out_c, kernel, stride, padding):
        x = rng.standard_normal(shape)
        w = rng.standard_normal((out_c, shape[0], kernel, kernel))
        b = rng.standard_normal(out_c)

        out = conv2d(Tensor(x), Tensor(w), Tensor(b), stride=stride, padding=padding)
        np.testing.assert_allclose(out.data, naive_conv(x, w, b, stride, padding), atol=1e-12)
        assert out.shape[1] == conv_output_side(shape[1], kernel, stride, padding)

        errors = gradient_errors(
            lambda xi, wi, bi: conv2d(xi, wi, bi, stride=stride, padding=padding), [x, w, b]
        )
        assert max(errors) < TOLERANCE

    def test_without_bias(self, rng):
        x = rng.standard_normal((2, 5, 5))
        w = rng.standard_normal((3, 2, 3, 3))
        errors = gradient_errors(lambda xi, wi: conv2d(xi, wi, padding=1), [x, w])
        assert max(errors) < TOLERANCE

    def test_channel_mismatch(self, rng):
        with pytest.raises(DimensionError):
            conv2d(Tensor(rng.standard_normal((2, 5, 5))), Tensor(rng.standard_normal((1, 3, 3, 3))))

    def test_even_kernel_rejected(self, rng):
        with pytest.raises(ParameterError):
            conv2d(Tensor(rng.standard_normal((1, 5, 5))), Tensor(rng.standard_normal((1, 1, 2, 2))))

    def test_empty_output_rejected(self, rng):
        with pytest.raises(DimensionError):
            conv2d(Tensor(rng.standard_normal((1, 2, 2))), Tensor(rng.standard_normal((1, 1, 5, 5))))


class TestPrimitiveGradients:
    SHAPES = [(1, 2, 2), (2, 4, 4), (3, 2, 6), (1, 6, 2), (4, 4, 4)]

    @pytest.mark.parametrize("shape", SHAPES)
    def test_relu(self, rng, shape):
        x = away_from_zero(rng.standard_normal(shape))
        assert max(gradient_errors(lambda t: activate(t, "relu"), [x])) < TOLERANCE

    @pytest.mark.parametrize("shape", SHAPES)
    def test_sigmoid(self, rng, shape):
        x = rng.standard_normal(shape) * 3
        assert max(gradient_errors(lambda t: activate(t, "sigmoid"), [x])) < TOLERANCE

    @pytest.mark.parametrize("shape", SHAPES)
    @pytest.mark.parametrize("kind", ["max", "average", "global_max", "global_average"])
    def test_pooling(self, rng, shape, kind):
        # Distinct values keep every max window clear of ties within the difference step
        x = rng.permutation(int(np.prod(shape))).reshape(shape) * 0.01 + rng.uniform(0, 1e-3, shape)
        window = 2 if kind in ("max", "average") else None
        assert max(gradient_errors(lambda t: pool(t, kind, window), [x])) < TOLERANCE

    @pytest.mark.parametrize("d_in,d_out", [(1, 1), (3, 2), (5, 4), (8, 1), (2, 6)])
    def test_dense(self, rng, d_in, d_out):
        arrays = [rng.standard_normal(d_in), rng.standard_normal((d_out, d_in)), rng.standard_normal(d_out)]
        assert max(gradient_errors(dense, arrays)) < TOLERANCE

    @pytest.mark.parametrize("shape", [(1, 1, 1), (2, 2, 2), (3, 1, 3), (1, 3, 2), (2, 2, 1)])
    def test_upsample_concat(self, rng, shape):
        decoder = rng.standard_normal(shape)
        skip = rng.standard_normal((2, shape[1] * 2, shape[2] * 2))
        assert max(gradient_errors(upsample_concat, [decoder, skip])) < TOLERANCE

    @pytest.mark.parametrize("shape", SHAPES)
    def test_channel_affine(self, rng, shape):
        arrays = [rng.standard_normal(shape), rng.standard_normal(shape[0]), rng.standard_normal(shape[0])]
        assert max(gradient_errors(channel_affine, arrays)) < TOLERANCE

    @pytest.mark.parametrize("shape", SHAPES)
    def test_add_and_flatten(self, rng, shape):
        arrays = [rng.standard_normal(shape), rng.standard_normal(shape)]
        assert max(gradient_errors(lambda a, b: flatten(add(a, b)), arrays)) < TOLERANCE

    @pytest.mark.parametrize("size", [1, 3, 5, 8, 13])
    def test_arithmetic(self, rng, size):
        a = rng.uniform(0.5, 2.0, size)
        b = rng.uniform(0.5, 2.0, size)
        errors = gradient_errors(lambda x, y: x * y - x / y + (x + 1.0).log(), [a, b])
        assert max(errors) < TOLERANCE

    def test_clip_passes_gradient_inside_only(self):
        x = Tensor(np.array([-1.0, 0.5, 2.0]), requires_grad=True)
        x.clip(0.0, 1.0).sum().backward()
        np.testing.assert_array_equal(x.grad, [0.0, 1.0, 0.0])

    def test_pool_window_must_divide(self, rng):
        with pytest.raises(DimensionError):
            pool(Tensor(rng.standard_normal((1, 5, 4))), "max", 2)

    def test_max_pool_routes_to_first_argmax(self):
        x = Tensor(np.ones((1, 2, 2)), requires_grad=True)
        pool(x, "max", 2).sum().backward()
        np.testing.assert_array_equal(x.grad[0], [[1.0, 0.0], [0.0, 0.0]])

    def test_add_requires_equal_shapes(self):
        with pytest.raises(DimensionError):
            add(Tensor(np.ones((2, 2))), Tensor(np.ones(2)))


class TestOptimizer:
    def test_momentum_update(self):
        param = Parameter(np.array([1.0]), name="w")
        config = SgdConfig(learning_rate=0.1, momentum=0.5, decay=1.0)
        for expected in (0.8, 0.5):
            param.tensor.grad = np.array([2.0])
            sgd_step([param], config)
            np.testing.assert_allclose(param.data, [expected])
        assert param.grad is None

    def test_step_after_backward_moves_weights_in_place(self):
        weights = Parameter(np.array([[0.5, -0.25]]), name="w")
        bias = Parameter(np.array([0.1]), name="b")
        storage = weights.data
        x = Tensor(np.array([1.0, 2.0]))
        loss = (dense(x, weights.tensor, bias.tensor) * 3.0).sum()
        loss.backward()
        sgd_step([weights, bias], SgdConfig(learning_rate=0.1, momentum=0.9))
        np.testing.assert_allclose(weights.data, [[0.2, -0.85]])
        np.testing.assert_allclose(bias.data, [-0.2])
        assert weights.data is storage
        assert weights.grad is None and bias.grad is None

    def test_learning_rate_decays_per_epoch(self):
        config = SgdConfig(learning_rate=1.0, decay=0.5)
        assert [config.rate_at(e) for e in range(3)] == [1.0, 0.5, 0.25]

    def test_frozen_parameter_untouched(self):
        frozen = Parameter(np.array([1.0]), trainable=False, name="frozen")
        sgd_step([frozen], SgdConfig())
        np.testing.assert_array_equal(frozen.data, [1.0])

    def test_missing_gradient_is_state_error(self):
        with pytest.raises(StateError):
            sgd_step([Parameter(np.array([1.0]), name="w")], SgdConfig())

    def test_read_only_parameter_is_state_error(self):
        param = Parameter(np.array([1.0]), name="w")
        param.tensor.grad = np.array([1.0])
        param.data.setflags(write=False)
        with pytest.raises(StateError):
            sgd_step([param], SgdConfig())

    def test_glorot_bounds(self, rng):
        weights = glorot_uniform((4, 3, 3, 3), rng)
        limit = np.sqrt(6.0 / (27 + 36))
        assert weights.dtype == np.float32
        assert np.abs(weights).max() <= limit + 1e-6
