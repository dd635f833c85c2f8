"""
Tests for the BCE and Dice losses
"""

import math

import numpy as np
import pytest

from autograd import SegPair, Tensor, bce_loss, dice_gradient, dice_loss, dice_overlap
from autograd.losses import BCE_EPSILON
from utils.errors import DegenerateInputError, DimensionError, ParameterError

from helpers import numerical_gradient, relative_error


class TestBce:
    def test_values(self):
        assert bce_loss(Tensor(np.array([0.8])), 1).item() == pytest.approx(-math.log(0.8))
        assert bce_loss(Tensor(np.array([0.8])), 0).item() == pytest.approx(-math.log(0.2))

    def test_clamped_at_extremes(self):
        loss = bce_loss(Tensor(np.array([0.0])), 1).item()
        assert loss == pytest.approx(-math.log(BCE_EPSILON))

    def test_gradient(self):
        p = Tensor(np.array([0.3]), requires_grad=True)
        bce_loss(p, 1).backward()
        np.testing.assert_allclose(p.grad, [-1 / 0.3])

    def test_invalid_label(self):
        with pytest.raises(ParameterError):
            bce_loss(Tensor(np.array([0.5])), 2)

    def test_needs_single_probability(self):
        with pytest.raises(DimensionError):
            bce_loss(Tensor(np.array([0.5, 0.5])), 1)


class TestDice:
    def test_perfect_and_disjoint(self):
        g = np.array([1.0, 1.0, 0.0, 0.0])
        assert dice_loss(SegPair(g.copy(), g)).item() == pytest.approx(0.0)
        assert dice_loss(SegPair(1.0 - g, g)).item() == pytest.approx(1.0)

    def test_both_empty_is_degenerate(self):
        with pytest.raises(DegenerateInputError):
            dice_loss(SegPair(np.zeros(4), np.zeros(4)))

    def test_pair_validation(self):
        with pytest.raises(DimensionError):
            SegPair(np.zeros(3), np.zeros(4))
        with pytest.raises(ParameterError):
            SegPair(np.array([1.5, 0.0]), np.array([1.0, 0.0]))
        with pytest.raises(ParameterError):
            SegPair(np.array([0.5, 0.0]), np.array([0.5, 0.0]))

    def test_closed_form_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(20, 201))
            p = rng.uniform(0.05, 0.95, n)
            g = (rng.random(n) < 0.4).astype(np.float64)
            g[0] = 1.0

            def loss() -> float:
                return dice_loss(SegPair(p, g)).item()

            numeric = numerical_gradient(loss, p)
            analytic = dice_gradient(SegPair(p, g)).data
            worst = max(worst, relative_error(analytic, numeric))
        assert worst < 1e-5

    def test_closed_form_matches_autodiff(self, rng):
        p = Tensor(rng.uniform(0.0, 1.0, (1, 6, 6)), requires_grad=True)
        g = (rng.random((1, 6, 6)) < 0.5).astype(np.float64)
        dice_loss(SegPair(p, g)).backward()
        np.testing.assert_allclose(p.grad, dice_gradient(SegPair(p.detach(), g)).data, rtol=1e-10, atol=1e-12)


class TestDiceOverlap:
    def test_overlap(self):
        assert dice_overlap(np.array([1, 1, 0, 0]), np.array([1, 0, 0, 0])) == pytest.approx(2 / 3)

    def test_both_empty(self):
        assert dice_overlap(np.zeros((2, 2)), np.zeros((2, 2))) == 1.0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            dice_overlap(np.zeros(3), np.zeros(4))
