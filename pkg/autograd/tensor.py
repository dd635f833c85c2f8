"""
Tensor and reverse-mode differentiation
A Tensor wraps a numpy array; every differentiable operation is a Function subclass
whose backward maps the output gradient to one gradient per input.
"""

import threading
from contextlib import contextmanager
from typing import Any, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.errors import DimensionError, StateError

ArrayLike = Union[np.ndarray, float, int, Sequence[float]]

_grad_mode = threading.local()


def is_grad_enabled() -> bool:
    """Whether operations on this thread currently record a backward graph."""
    return getattr(_grad_mode, "enabled", True)


@contextmanager
def no_grad() -> Iterator[None]:
    """Run operations without recording the backward graph (inference)."""
    previous = is_grad_enabled()
    _grad_mode.enabled = False
    try:
        yield
    finally:
        _grad_mode.enabled = previous


def unbroadcast(grad: np.ndarray, to_shape: Tuple[int, ...]) -> np.ndarray:
    """Sum out broadcast dimensions so grad matches to_shape."""
    if grad.shape == to_shape:
        return grad
    while grad.ndim > len(to_shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(to_shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Function:
    """
    Base class for differentiable operations.

    Subclasses implement forward on raw arrays and backward returning one
    gradient array (or None) per input tensor, in input order.
    """

    def __init__(self, *tensors: "Tensor"):
        self.tensors = tensors

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__}.forward")

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError(f"{type(self).__name__}.backward")

    @classmethod
    def apply(cls, *tensors: "Tensor", **kwargs: Any) -> "Tensor":
        """Run forward and wrap the result, linking it to this function for backprop."""
        func = cls(*tensors)
        out = func.forward(*(t.data for t in tensors), **kwargs)
        requires_grad = is_grad_enabled() and any(t.requires_grad for t in tensors)
        return Tensor(out, requires_grad=requires_grad, creator=func if requires_grad else None)


class Tensor:
    """
    n-dimensional float array with an optional gradient buffer.

    Leaves (tensors without a creator) accumulate gradients in `grad` across
    backward calls until cleared; intermediate tensors never store gradients.
    """

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        creator: Optional[Function] = None,
        dtype: Optional[np.dtype] = None,
    ):
        array = np.asarray(data, dtype=dtype)
        if not np.issubdtype(array.dtype, np.floating):
            array = array.astype(np.float64)
        self.data: np.ndarray = array
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.creator = creator

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def __float__(self) -> float:
        return self.item()

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def _topological_order(self) -> List["Tensor"]:
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            if node.creator is not None:
                for parent in node.creator.tensors:
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))
        return order

    def backward(self, grad: Optional[ArrayLike] = None) -> None:
        """
        Back-propagate from this tensor.

        Args:
            grad: Seed gradient dL/d(self); defaults to 1 for single-element tensors

        Raises:
            StateError: If this tensor does not require gradients
            DimensionError: If the seed does not match this tensor's shape
        """
        if not self.requires_grad:
            raise StateError("backward() called on a tensor that does not require gradients")
        if grad is None:
            if self.data.size != 1:
                raise DimensionError("backward() without a seed needs a single-element tensor")
            seed = np.ones_like(self.data)
        else:
            seed = np.asarray(grad, dtype=self.data.dtype)
            if seed.shape != self.shape:
                raise DimensionError(f"seed gradient shape {seed.shape} != tensor shape {self.shape}")

        order = self._topological_order()
        grads = {id(self): seed}
        for node in reversed(order):
            node_grad = grads.pop(id(node), None)
            if node_grad is None:
                continue
            if node.creator is None:
                node_grad = node_grad.astype(node.data.dtype, copy=False)
                node.grad = node_grad.copy() if node.grad is None else node.grad + node_grad
                continue
            input_grads = node.creator.backward(node_grad)
            for parent, parent_grad in zip(node.creator.tensors, input_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = parent_grad if key not in grads else grads[key] + parent_grad

    # Arithmetic

    def __add__(self, other: ArrayLike) -> "Tensor":
        return Add.apply(self, as_tensor(other, like=self))

    def __radd__(self, other: ArrayLike) -> "Tensor":
        return Add.apply(as_tensor(other, like=self), self)

    def __sub__(self, other: ArrayLike) -> "Tensor":
        return Add.apply(self, Neg.apply(as_tensor(other, like=self)))

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return Add.apply(as_tensor(other, like=self), Neg.apply(self))

    def __mul__(self, other: ArrayLike) -> "Tensor":
        return Mul.apply(self, as_tensor(other, like=self))

    def __rmul__(self, other: ArrayLike) -> "Tensor":
        return Mul.apply(as_tensor(other, like=self), self)

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        return Div.apply(self, as_tensor(other, like=self))

    def __rtruediv__(self, other: ArrayLike) -> "Tensor":
        return Div.apply(as_tensor(other, like=self), self)

    def __neg__(self) -> "Tensor":
        return Neg.apply(self)

    def sum(self) -> "Tensor":
        return Sum.apply(self)

    def log(self) -> "Tensor":
        return Log.apply(self)

    def clip(self, low: float, high: float) -> "Tensor":
        return Clip.apply(self, low=low, high=high)

    def reshape(self, *shape: int) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Reshape.apply(self, shape=shape)


def as_tensor(value: Union[Tensor, ArrayLike], like: Optional[Tensor] = None) -> Tensor:
    """Wrap a constant as a non-differentiable tensor, matching like's dtype."""
    if isinstance(value, Tensor):
        return value
    dtype = like.dtype if like is not None else None
    return Tensor(np.asarray(value, dtype=dtype), requires_grad=False)


class Add(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.shapes = (a.shape, b.shape)
        return a + b

    def backward(self, grad: np.ndarray):
        return unbroadcast(grad, self.shapes[0]), unbroadcast(grad, self.shapes[1])


class Neg(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        return -a

    def backward(self, grad: np.ndarray):
        return (-grad,)


class Mul(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.a, self.b = a, b
        return a * b

    def backward(self, grad: np.ndarray):
        return (
            unbroadcast(grad * self.b, self.a.shape),
            unbroadcast(grad * self.a, self.b.shape),
        )


class Div(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.a, self.b = a, b
        return a / b

    def backward(self, grad: np.ndarray):
        return (
            unbroadcast(grad / self.b, self.a.shape),
            unbroadcast(-grad * self.a / (self.b * self.b), self.b.shape),
        )


class Sum(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        self.shape = a.shape
        return np.asarray(a.sum(), dtype=a.dtype)

    def backward(self, grad: np.ndarray):
        return (np.broadcast_to(grad, self.shape).copy(),)


class Log(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        self.a = a
        return np.log(a)

    def backward(self, grad: np.ndarray):
        return (grad / self.a,)


class Clip(Function):
    def forward(self, a: np.ndarray, low: float, high: float) -> np.ndarray:
        self.inside = (a >= low) & (a <= high)
        return np.clip(a, low, high)

    def backward(self, grad: np.ndarray):
        return (grad * self.inside,)


class Reshape(Function):
    def forward(self, a: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
        self.shape = a.shape
        try:
            return a.reshape(shape)
        except ValueError as exc:
            raise DimensionError(f"cannot reshape {a.shape} to {shape}") from exc

    def backward(self, grad: np.ndarray):
        return (grad.reshape(self.shape),)
