"""
Layer primitives for the four screening streams
Single-sample layout: feature maps are [C, H, W], vectors are [D].
"""

from typing import Literal, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from utils.errors import DimensionError, ParameterError

from .tensor import Function, Tensor, Add, Reshape

ActivationKind = Literal["relu", "sigmoid"]
PoolKind = Literal["max", "average", "global_max", "global_average"]


def conv_output_side(side: int, kernel: int, stride: int, padding: int) -> int:
    """Spatial extent after a convolution: floor((side + 2p - k) / s) + 1."""
    return (side + 2 * padding - kernel) // stride + 1


class Conv2d(Function):
    """2-D cross-correlation via im2col, optional per-output-channel bias."""

    def forward(self, x: np.ndarray, w: np.ndarray, b: Optional[np.ndarray] = None,
                stride: int = 1, padding: int = 0) -> np.ndarray:
        channels, height, width = x.shape
        out_channels, _, kernel, _ = w.shape
        out_h = conv_output_side(height, kernel, stride, padding)
        out_w = conv_output_side(width, kernel, stride, padding)

        xp = np.pad(x, ((0, 0), (padding, padding), (padding, padding))) if padding else x
        windows = sliding_window_view(xp, (kernel, kernel), axis=(1, 2))[:, ::stride, ::stride]
        cols = windows[:, :out_h, :out_w].transpose(1, 2, 0, 3, 4).reshape(out_h * out_w, -1)
        w_mat = w.reshape(out_channels, -1)

        out = (cols @ w_mat.T).T.reshape(out_channels, out_h, out_w)
        if b is not None:
            out = out + b[:, None, None]

        self.cols, self.w_mat = cols, w_mat
        self.geometry = (channels, height, width, kernel, stride, padding, out_h, out_w)
        self.has_bias = b is not None
        return np.ascontiguousarray(out)

    def backward(self, grad: np.ndarray):
        channels, height, width, kernel, stride, padding, out_h, out_w = self.geometry
        g = grad.reshape(grad.shape[0], -1)

        dw = (g @ self.cols).reshape(grad.shape[0], channels, kernel, kernel)
        dcols = (g.T @ self.w_mat).reshape(out_h, out_w, channels, kernel, kernel)

        dxp = np.zeros((channels, height + 2 * padding, width + 2 * padding), dtype=dcols.dtype)
        row_span = stride * (out_h - 1) + 1
        col_span = stride * (out_w - 1) + 1
        for i in range(kernel):
            for j in range(kernel):
                dxp[:, i:i + row_span:stride, j:j + col_span:stride] += (
                    dcols[:, :, :, i, j].transpose(2, 0, 1)
                )
        dx = dxp[:, padding:padding + height, padding:padding + width] if padding else dxp

        if self.has_bias:
            return dx, dw, g.sum(axis=1)
        return dx, dw


def conv2d(input: Tensor, weights: Tensor, bias: Optional[Tensor] = None,
           stride: int = 1, padding: int = 0) -> Tensor:
    """
    Convolve a [C_in, H, W] map with a [C_out, C_in, k, k] filter bank.

    Raises:
        DimensionError: Channel mismatch or empty output
        ParameterError: Even or non-square kernel, stride < 1, negative padding
    """
    if input.ndim != 3 or weights.ndim != 4:
        raise DimensionError(f"conv2d expects [C,H,W] and [O,C,k,k], got {input.shape} and {weights.shape}")
    if weights.shape[1] != input.shape[0]:
        raise DimensionError(
            f"conv2d channel mismatch: input has {input.shape[0]}, weights expect {weights.shape[1]}"
        )
    kernel = weights.shape[2]
    if kernel != weights.shape[3] or kernel % 2 == 0:
        raise ParameterError(f"conv2d needs an odd square kernel, got {weights.shape[2:]}")
    if stride < 1 or padding < 0:
        raise ParameterError(f"invalid stride/padding ({stride}, {padding})")
    out_h = conv_output_side(input.shape[1], kernel, stride, padding)
    out_w = conv_output_side(input.shape[2], kernel, stride, padding)
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"conv2d output would be empty for input {input.shape}")
    if bias is not None and bias.shape != (weights.shape[0],):
        raise DimensionError(f"conv2d bias shape {bias.shape} != ({weights.shape[0]},)")

    if bias is None:
        return Conv2d.apply(input, weights, stride=stride, padding=padding)
    return Conv2d.apply(input, weights, bias, stride=stride, padding=padding)


class ReLU(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.mask = x > 0
        return np.maximum(x, 0)

    def backward(self, grad: np.ndarray):
        return (grad * self.mask,)


class Sigmoid(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.out = expit(x)
        return self.out

    def backward(self, grad: np.ndarray):
        return (grad * self.out * (1.0 - self.out),)


def activate(input: Tensor, kind: ActivationKind) -> Tensor:
    """Elementwise relu(x) = max(0, x) or sigmoid(x) = 1 / (1 + e^-x)."""
    if kind == "relu":
        return ReLU.apply(input)
    if kind == "sigmoid":
        return Sigmoid.apply(input)
    raise ParameterError(f"unknown activation '{kind}'")


def _blocks(x: np.ndarray, window: int) -> np.ndarray:
    channels, height, width = x.shape
    return (
        x.reshape(channels, height // window, window, width // window, window)
        .transpose(0, 1, 3, 2, 4)
        .reshape(channels, height // window, width // window, window * window)
    )


def _unblocks(blocks: np.ndarray, window: int) -> np.ndarray:
    channels, rows, cols, _ = blocks.shape
    return (
        blocks.reshape(channels, rows, cols, window, window)
        .transpose(0, 1, 3, 2, 4)
        .reshape(channels, rows * window, cols * window)
    )


class MaxPool(Function):
    def forward(self, x: np.ndarray, window: int) -> np.ndarray:
        blocks = _blocks(x, window)
        self.index = blocks.argmax(axis=-1)[..., None]
        self.block_shape, self.window = blocks.shape, window
        return np.take_along_axis(blocks, self.index, axis=-1)[..., 0]

    def backward(self, grad: np.ndarray):
        blocks = np.zeros(self.block_shape, dtype=grad.dtype)
        np.put_along_axis(blocks, self.index, grad[..., None], axis=-1)
        return (_unblocks(blocks, self.window),)


class AveragePool(Function):
    def forward(self, x: np.ndarray, window: int) -> np.ndarray:
        blocks = _blocks(x, window)
        self.block_shape, self.window = blocks.shape, window
        return blocks.mean(axis=-1)

    def backward(self, grad: np.ndarray):
        share = np.broadcast_to(grad[..., None] / (self.window * self.window), self.block_shape)
        return (_unblocks(np.ascontiguousarray(share), self.window),)


class GlobalMaxPool(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.shape = x.shape
        flat = x.reshape(x.shape[0], -1)
        self.index = flat.argmax(axis=1)
        return flat[np.arange(x.shape[0]), self.index].reshape(-1, 1, 1)

    def backward(self, grad: np.ndarray):
        flat = np.zeros((self.shape[0], self.shape[1] * self.shape[2]), dtype=grad.dtype)
        flat[np.arange(self.shape[0]), self.index] = grad.reshape(-1)
        return (flat.reshape(self.shape),)


class GlobalAveragePool(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.shape = x.shape
        return x.mean(axis=(1, 2), keepdims=True)

    def backward(self, grad: np.ndarray):
        count = self.shape[1] * self.shape[2]
        return (np.broadcast_to(grad / count, self.shape).copy(),)


def pool(input: Tensor, kind: PoolKind, window: Optional[int] = None) -> Tensor:
    """
    Windowed or global pooling of a [C, H, W] map.

    Global kinds return [C, 1, 1]. Max routes the gradient to the first argmax
    of each window; average spreads it uniformly.

    Raises:
        DimensionError: Windowed pooling over sides not divisible by window
    """
    if input.ndim != 3:
        raise DimensionError(f"pool expects [C,H,W], got {input.shape}")
    if kind == "global_max":
        return GlobalMaxPool.apply(input)
    if kind == "global_average":
        return GlobalAveragePool.apply(input)
    if kind not in ("max", "average"):
        raise ParameterError(f"unknown pooling kind '{kind}'")
    if window is None or window < 1:
        raise ParameterError(f"{kind} pooling needs a positive window")
    if input.shape[1] % window or input.shape[2] % window:
        raise DimensionError(f"pool window {window} does not divide spatial shape {input.shape[1:]}")
    if kind == "max":
        return MaxPool.apply(input, window=window)
    return AveragePool.apply(input, window=window)


class Dense(Function):
    def forward(self, x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.x, self.w = x, w
        return w @ x + b

    def backward(self, grad: np.ndarray):
        return self.w.T @ grad, np.outer(grad, self.x), grad


def dense(input: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """Affine map W x + b of a [D_in] vector to [D_out]."""
    if input.ndim != 1 or weights.ndim != 2 or bias.ndim != 1:
        raise DimensionError(
            f"dense expects [D_in], [D_out,D_in], [D_out]; got {input.shape}, {weights.shape}, {bias.shape}"
        )
    if weights.shape[1] != input.shape[0] or weights.shape[0] != bias.shape[0]:
        raise DimensionError(
            f"dense dimension mismatch: input {input.shape}, weights {weights.shape}, bias {bias.shape}"
        )
    return Dense.apply(input, weights, bias)


class UpsampleConcat(Function):
    def forward(self, decoder: np.ndarray, skip: np.ndarray) -> np.ndarray:
        self.decoder_shape = decoder.shape
        upsampled = decoder.repeat(2, axis=1).repeat(2, axis=2)
        return np.concatenate([upsampled, skip.astype(upsampled.dtype, copy=False)], axis=0)

    def backward(self, grad: np.ndarray):
        channels, height, width = self.decoder_shape
        up_grad = grad[:channels].reshape(channels, height, 2, width, 2).sum(axis=(2, 4))
        return up_grad, grad[channels:]


def upsample_concat(decoder: Tensor, skip: Tensor) -> Tensor:
    """Nearest-neighbour x2 upsampling of decoder, then channel concat with skip."""
    if decoder.ndim != 3 or skip.ndim != 3:
        raise DimensionError(f"upsample_concat expects [C,H,W] maps, got {decoder.shape}, {skip.shape}")
    if skip.shape[1] != 2 * decoder.shape[1] or skip.shape[2] != 2 * decoder.shape[2]:
        raise DimensionError(
            f"skip spatial shape {skip.shape[1:]} must be double the decoder's {decoder.shape[1:]}"
        )
    return UpsampleConcat.apply(decoder, skip)


class ChannelAffine(Function):
    def forward(self, x: np.ndarray, scale: np.ndarray, shift: np.ndarray) -> np.ndarray:
        self.x, self.scale = x, scale
        return x * scale[:, None, None] + shift[:, None, None]

    def backward(self, grad: np.ndarray):
        return (
            grad * self.scale[:, None, None],
            (grad * self.x).sum(axis=(1, 2)),
            grad.sum(axis=(1, 2)),
        )


def channel_affine(input: Tensor, scale: Tensor, shift: Tensor) -> Tensor:
    """Per-channel learned scale and shift (stands in for batch normalization)."""
    if input.ndim != 3 or scale.shape != (input.shape[0],) or shift.shape != (input.shape[0],):
        raise DimensionError(
            f"channel_affine shapes disagree: input {input.shape}, scale {scale.shape}, shift {shift.shape}"
        )
    return ChannelAffine.apply(input, scale, shift)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise sum of equally shaped tensors (residual shortcuts)."""
    if a.shape != b.shape:
        raise DimensionError(f"add shape mismatch {a.shape} vs {b.shape}")
    return Add.apply(a, b)


def flatten(input: Tensor) -> Tensor:
    """Collapse any tensor to a [D] vector."""
    return Reshape.apply(input, shape=(input.size,))
