"""Dense float64 tensors with tape-based reverse-mode differentiation.

Every operation that touches a tensor requiring gradients records a
``TapeNode`` holding its inputs and a closure mapping the output gradient to
input gradients. ``Tensor.backward`` walks the recorded graph once, in reverse
topological order.
"""
from __future__ import annotations

from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp as _logsumexp

from ..errors import ShapeError

ArrayLike = Union[np.ndarray, float, int, Sequence[Any]]
BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

LAYER_NORM_EPS = 1e-5


class TapeNode:
    """One recorded operation: its kind, inputs and backward closure."""

    __slots__ = ('op', 'inputs', 'backward')

    def __init__(self, op: str, inputs: Tuple['Tensor', ...],
                 backward: BackwardFn) -> None:
        self.op = op
        self.inputs = inputs
        self.backward = backward

    def __repr__(self) -> str:
        return f"<TapeNode {self.op} inputs={len(self.inputs)}>"


class Tensor:
    """A float64 array plus the bookkeeping needed for backpropagation."""

    __array_priority__ = 100

    def __init__(self, data: ArrayLike, requires_grad: bool = False,
                 name: Optional[str] = None) -> None:
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.node: Optional[TapeNode] = None
        self.name = name

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return (f"<Tensor{label} shape={self.shape} "
                f"requires_grad={self.requires_grad}>")

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError('item', self.shape)
        return float(self.data.reshape(()))

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    # Operator sugar; the actual work lives in the module-level functions.
    def __add__(self, other: Any) -> Tensor:
        return add(self, other)

    def __radd__(self, other: Any) -> Tensor:
        return add(as_tensor(other), self)

    def __sub__(self, other: Any) -> Tensor:
        return add(self, scale(as_tensor(other), -1.0))

    def __rsub__(self, other: Any) -> Tensor:
        return add(as_tensor(other), scale(self, -1.0))

    def __neg__(self) -> Tensor:
        return scale(self, -1.0)

    def __mul__(self, other: Any) -> Tensor:
        if isinstance(other, (int, float)):
            return scale(self, float(other))
        return multiply(self, other)

    def __rmul__(self, other: Any) -> Tensor:
        return self.__mul__(other)

    def __matmul__(self, other: Tensor) -> Tensor:
        return matmul(self, other)

    def __getitem__(self, index: Any) -> Tensor:
        return select(self, index)

    @property
    def T(self) -> Tensor:  # pylint: disable=invalid-name
        return transpose(self)

    def reshape(self, *shape: Any) -> Tensor:
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, tuple(shape))

    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
        return reduce_sum(self, axis=axis, keepdims=keepdims)

    def tanh(self) -> Tensor:
        return tanh(self)

    def relu(self) -> Tensor:
        return relu(self)

    def softmax(self, axis: int = -1) -> Tensor:
        return softmax(self, axis)

    def logsumexp(self, axis: Optional[int] = None) -> Tensor:
        return logsumexp(self, axis)

    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        """Propagate gradients from this tensor to every leaf requiring them.

        Args:
            grad: Seed gradient; defaults to ones (a scalar loss gives 1.0)
        """
        if not self.requires_grad:
            return
        seed = np.ones_like(self.data) if grad is None else np.asarray(grad, dtype=np.float64)
        order = _topological_order(self)
        grads = {id(self): seed}
        for tensor in reversed(order):
            upstream = grads.pop(id(tensor), None)
            if upstream is None:
                continue
            if tensor.node is None:
                if tensor.grad is None:
                    tensor.grad = np.zeros_like(tensor.data)
                tensor.grad += upstream
                continue
            for parent, local in zip(tensor.node.inputs, tensor.node.backward(upstream)):
                if local is None or not parent.requires_grad:
                    continue
                if id(parent) in grads:
                    grads[id(parent)] = grads[id(parent)] + local
                else:
                    grads[id(parent)] = local


def _topological_order(root: Tensor) -> List[Tensor]:
    """Return tensors reachable from ``root`` with inputs before outputs."""
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        tensor, expanded = stack.pop()
        if expanded:
            order.append(tensor)
            continue
        if id(tensor) in visited:
            continue
        visited.add(id(tensor))
        stack.append((tensor, True))
        if tensor.node is not None:
            for parent in tensor.node.inputs:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
    return order


def as_tensor(value: Any) -> Tensor:
    """Wrap plain numbers and arrays; tensors pass through unchanged."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _record(data: np.ndarray, op: str, inputs: Tuple[Tensor, ...],
            backward: BackwardFn) -> Tensor:
    out = Tensor(data)
    if any(t.requires_grad for t in inputs):
        out.requires_grad = True
        out.node = TapeNode(op, inputs, backward)
    return out


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as error:
        raise ShapeError(op, a.shape, b.shape) from error


def add(a: Any, b: Any) -> Tensor:
    """Elementwise sum with numpy broadcasting (bias rows, scalars)."""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('add', a, b)

    def backward(g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _record(a.data + b.data, 'add', (a, b), backward)


def multiply(a: Any, b: Any) -> Tensor:
    """Elementwise product with numpy broadcasting."""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('multiply', a, b)

    def backward(g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _record(a.data * b.data, 'multiply', (a, b), backward)


def scale(a: Tensor, factor: float) -> Tensor:
    """Multiply by a constant."""
    a = as_tensor(a)
    return _record(a.data * factor, 'scale', (a,), lambda g: (g * factor,))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of two 2-D tensors."""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError('matmul', a.shape, b.shape)

    def backward(g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return g @ b.data.T, a.data.T @ g

    return _record(a.data @ b.data, 'matmul', (a, b), backward)


def transpose(a: Tensor) -> Tensor:
    """Swap the two axes of a 2-D tensor."""
    if a.ndim != 2:
        raise ShapeError('transpose', a.shape)
    return _record(a.data.T.copy(), 'transpose', (a,), lambda g: (g.T,))


def reshape(a: Tensor, shape: Tuple[int, ...]) -> Tensor:
    """View the values under another shape of the same size."""
    try:
        data = a.data.reshape(shape)
    except ValueError as error:
        raise ShapeError('reshape', a.shape, shape) from error
    return _record(data.copy(), 'reshape', (a,), lambda g: (g.reshape(a.shape),))


def select(a: Tensor, index: Any) -> Tensor:
    """Basic or fancy indexing; gradients scatter back with accumulation."""
    try:
        data = a.data[index]
    except IndexError as error:
        raise ShapeError('select', a.shape) from error

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        return (full,)

    return _record(np.array(data, dtype=np.float64), 'select', (a,), backward)


def reduce_sum(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    """Sum over one axis, or over everything when ``axis`` is None."""
    data = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _record(np.asarray(data, dtype=np.float64), 'sum', (a,), backward)


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)
    return _record(y, 'tanh', (a,), lambda g: (g * (1.0 - y * y),))


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    return _record(a.data * mask, 'relu', (a,), lambda g: (g * mask,))


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    """Normalized exponentials along ``axis``."""
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        return (y * (g - (g * y).sum(axis=axis, keepdims=True)),)

    return _record(y, 'softmax', (a,), backward)


def logsumexp(a: Tensor, axis: Optional[int] = None) -> Tensor:
    """Stable log(sum(exp(a))) along ``axis`` (all entries when None)."""
    out = np.asarray(_logsumexp(a.data, axis=axis), dtype=np.float64)

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        if axis is None:
            return (g * np.exp(a.data - out),)
        kept_out = np.expand_dims(out, axis)
        return (np.expand_dims(g, axis) * np.exp(a.data - kept_out),)

    return _record(out, 'logsumexp', (a,), backward)


def layer_norm(a: Tensor, gain: Tensor, bias: Tensor,
               eps: float = LAYER_NORM_EPS) -> Tensor:
    """Normalize the last axis to zero mean and unit variance, then affine."""
    width = a.shape[-1]
    if gain.shape != (width,) or bias.shape != (width,):
        raise ShapeError('layer_norm', a.shape, gain.shape, bias.shape)
    mean = a.data.mean(axis=-1, keepdims=True)
    centered = a.data - mean
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + eps)
    normed = centered * inv_std

    def backward(g: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        lead = tuple(range(g.ndim - 1))
        d_gain = (g * normed).sum(axis=lead)
        d_bias = g.sum(axis=lead)
        d_normed = g * gain.data
        d_a = inv_std * (d_normed
                         - d_normed.mean(axis=-1, keepdims=True)
                         - normed * (d_normed * normed).mean(axis=-1, keepdims=True))
        return d_a, d_gain, d_bias

    return _record(normed * gain.data + bias.data, 'layer_norm', (a, gain, bias), backward)


def embedding_lookup(table: Tensor, ids: Sequence[int]) -> Tensor:
    """Gather rows of ``table``; repeated ids accumulate gradient."""
    index = np.asarray(ids, dtype=np.int64)
    if table.ndim != 2 or (index.size and (index.min() < 0 or index.max() >= table.shape[0])):
        raise ShapeError('embedding_lookup', table.shape, index.shape)

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        full = np.zeros_like(table.data)
        np.add.at(full, index, g)
        return (full,)

    return _record(table.data[index], 'embedding_lookup', (table,), backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """Join tensors along an existing axis."""
    tensors = tuple(as_tensor(t) for t in tensors)
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as error:
        raise ShapeError('concat', *(t.shape for t in tensors)) from error
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g: np.ndarray) -> Tuple[np.ndarray, ...]:
        return tuple(np.split(g, bounds, axis=axis))

    return _record(data, 'concat', tensors, backward)


def stack(tensors: Sequence[Tensor]) -> Tensor:
    """Stack equally shaped tensors along a new leading axis."""
    return concat([reshape(t, (1,) + t.shape) for t in tensors], axis=0)


def dropout(a: Tensor, rate: float, rng: Optional[np.random.Generator]) -> Tensor:
    """Inverted dropout; identity when ``rate`` is 0 or no generator is given."""
    if rate <= 0.0 or rng is None:
        return a
    keep = (rng.random(a.shape) >= rate) / (1.0 - rate)
    return _record(a.data * keep, 'dropout', (a,), lambda g: (g * keep,))
