import logging
from collections.abc import Callable, Iterable, Sequence

import numpy as np
import numpy.typing as npt

from ..errors import GraphError, ShapeError

Matrix = npt.NDArray[np.float64]
VectorJacobian = Callable[[Matrix], Sequence[Matrix | None]]

LEAKY_RELU_SLOPE = 0.01

logger = logging.getLogger("DiffCore")


def as_matrix(value) -> Matrix:
    """Coerce scalars, vectors and 2-D arrays into a float64 matrix (vectors become rows)."""
    array = np.asarray(value, dtype=np.float64)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        return array.reshape(1, -1)
    if array.ndim != 2:
        raise ShapeError("as_matrix", array.shape)
    return array


class Node:
    """A vertex of a define-by-run computation graph holding a dense matrix value."""

    __slots__ = ("op", "inputs", "value", "grad", "requires_grad", "name", "_backward")

    def __init__(
        self,
        value,
        op: str = "leaf",
        inputs: Iterable["Node"] = (),
        requires_grad: bool = False,
        name: str | None = None,
    ):
        self.value: Matrix = as_matrix(value)
        self.op = op
        self.inputs: tuple[Node, ...] = tuple(inputs)
        self.requires_grad = requires_grad or any(node.requires_grad for node in self.inputs)
        self.grad: Matrix | None = None
        self.name = name
        self._backward: Callable[[Matrix], None] | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.value.shape  # type: ignore[return-value]

    def item(self) -> float:
        if self.shape != (1, 1):
            raise GraphError(f"item() needs a 1x1 node, {self.op} has shape {self.shape}")
        return float(self.value[0, 0])

    def accumulate(self, grad: Matrix) -> None:
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64, copy=True)
        else:
            self.grad += grad

    def __add__(self, other) -> "Node":
        return add(self, lift(other))

    def __radd__(self, other) -> "Node":
        return add(lift(other), self)

    def __sub__(self, other) -> "Node":
        return sub(self, lift(other))

    def __rsub__(self, other) -> "Node":
        return sub(lift(other), self)

    def __mul__(self, other) -> "Node":
        return mul(self, lift(other))

    def __rmul__(self, other) -> "Node":
        return mul(lift(other), self)

    def __truediv__(self, other) -> "Node":
        return div(self, lift(other))

    def __matmul__(self, other) -> "Node":
        return matmul(self, lift(other))

    def __neg__(self) -> "Node":
        return mul(self, constant(-1.0))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"Node({self.op}{label}, shape={self.shape})"


def parameter(value, name: str | None = None) -> Node:
    return Node(np.array(value, dtype=np.float64, copy=True), requires_grad=True, name=name)


def constant(value) -> Node:
    return Node(value)


def lift(value) -> Node:
    return value if isinstance(value, Node) else constant(value)


def apply(op: str, inputs: Sequence[Node], value: Matrix, vjp: VectorJacobian) -> Node:
    """Create an op node; `vjp` maps the output gradient to one gradient per input."""
    out = Node(value, op=op, inputs=inputs)
    if out.requires_grad:

        def backward(grad: Matrix) -> None:
            for node, node_grad in zip(inputs, vjp(grad)):
                if node_grad is not None and node.requires_grad:
                    node.accumulate(node_grad)

        out._backward = backward
    return out


def _broadcast(op: str, a: Node, b: Node) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(op, a.shape, b.shape) from None


def _unbroadcast(grad: Matrix, shape: tuple[int, ...]) -> Matrix:
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a: Node, b: Node) -> Node:
    _broadcast("add", a, b)
    return apply(
        "add",
        (a, b),
        a.value + b.value,
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a: Node, b: Node) -> Node:
    _broadcast("sub", a, b)
    return apply(
        "sub",
        (a, b),
        a.value - b.value,
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a: Node, b: Node) -> Node:
    _broadcast("mul", a, b)
    return apply(
        "mul",
        (a, b),
        a.value * b.value,
        lambda g: (_unbroadcast(g * b.value, a.shape), _unbroadcast(g * a.value, b.shape)),
    )


def div(a: Node, b: Node) -> Node:
    _broadcast("div", a, b)
    if np.any(b.value == 0.0):
        raise GraphError("div: division by zero")
    out = a.value / b.value
    return apply(
        "div",
        (a, b),
        out,
        lambda g: (
            _unbroadcast(g / b.value, a.shape),
            _unbroadcast(-g * out / b.value, b.shape),
        ),
    )


def matmul(a: Node, b: Node) -> Node:
    if a.shape[1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)
    return apply(
        "matmul",
        (a, b),
        a.value @ b.value,
        lambda g: (g @ b.value.T, a.value.T @ g),
    )


def _sigmoid(x: Matrix) -> Matrix:
    # tanh form saturates without overflow warnings
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def sigmoid(a: Node) -> Node:
    s = _sigmoid(a.value)
    return apply("sigmoid", (a,), s, lambda g: (g * s * (1.0 - s),))


def tanh(a: Node) -> Node:
    t = np.tanh(a.value)
    return apply("tanh", (a,), t, lambda g: (g * (1.0 - t * t),))


def leaky_relu(a: Node, slope: float = LEAKY_RELU_SLOPE) -> Node:
    positive = a.value > 0
    return apply(
        "leaky-relu",
        (a,),
        np.where(positive, a.value, slope * a.value),
        lambda g: (g * np.where(positive, 1.0, slope),),
    )


def softplus(a: Node) -> Node:
    x = a.value
    value = np.log1p(np.exp(-np.abs(x))) + np.maximum(x, 0.0)
    return apply("softplus", (a,), value, lambda g: (g * _sigmoid(x),))


def exp(a: Node) -> Node:
    e = np.exp(a.value)
    return apply("exp", (a,), e, lambda g: (g * e,))


def log(a: Node) -> Node:
    if np.any(a.value <= 0.0):
        raise GraphError("log: non-positive operand")
    return apply("log", (a,), np.log(a.value), lambda g: (g / a.value,))


def absolute(a: Node) -> Node:
    return apply("abs", (a,), np.abs(a.value), lambda g: (g * np.sign(a.value),))


def square(a: Node) -> Node:
    return apply("square", (a,), a.value * a.value, lambda g: (2.0 * g * a.value,))


def clip(a: Node, low: float, high: float) -> Node:
    inside = (a.value >= low) & (a.value <= high)
    return apply("clip", (a,), np.clip(a.value, low, high), lambda g: (g * inside,))


def softmax(a: Node, axis: int = 1) -> Node:
    shifted = a.value - a.value.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=axis, keepdims=True)
    return apply(
        "softmax",
        (a,),
        s,
        lambda g: (s * (g - (g * s).sum(axis=axis, keepdims=True)),),
    )


def reduce_sum(a: Node, axis: int | None = None) -> Node:
    if axis is None:
        value = np.array([[a.value.sum()]])
    else:
        value = a.value.sum(axis=axis, keepdims=True)
    return apply("reduce-sum", (a,), value, lambda g: (np.broadcast_to(g, a.shape),))


def reduce_mean(a: Node, axis: int | None = None) -> Node:
    count = a.value.size if axis is None else a.shape[axis]
    if axis is None:
        value = np.array([[a.value.mean()]])
    else:
        value = a.value.mean(axis=axis, keepdims=True)
    return apply("reduce-mean", (a,), value, lambda g: (np.broadcast_to(g / count, a.shape),))


def transpose(a: Node) -> Node:
    return apply("transpose", (a,), a.value.T, lambda g: (g.T,))


def reshape(a: Node, shape: tuple[int, int]) -> Node:
    try:
        value = a.value.reshape(shape)
    except ValueError:
        raise ShapeError("reshape", a.shape, shape) from None
    return apply("reshape", (a,), value, lambda g: (g.reshape(a.shape),))


def concat(nodes: Sequence[Node], axis: int = 1) -> Node:
    if not nodes:
        raise GraphError("concat: no operands")
    other = 1 - axis
    if len({node.shape[other] for node in nodes}) != 1:
        raise ShapeError("concat", *(node.shape for node in nodes))
    bounds = np.cumsum([0] + [node.shape[axis] for node in nodes])

    def vjp(g: Matrix) -> list[Matrix]:
        if axis == 1:
            return [g[:, lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:])]
        return [g[lo:hi, :] for lo, hi in zip(bounds[:-1], bounds[1:])]

    return apply("concat", tuple(nodes), np.concatenate([n.value for n in nodes], axis=axis), vjp)


def topological_order(root: Node) -> list[Node]:
    order: list[Node] = []
    done: set[int] = set()
    active: set[int] = set()
    stack: list[tuple[Node, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            active.discard(id(node))
            done.add(id(node))
            order.append(node)
            continue
        if id(node) in done:
            continue
        if id(node) in active:
            raise GraphError(f"cycle detected at {node!r}")
        active.add(id(node))
        stack.append((node, True))
        for parent in node.inputs:
            if id(parent) in active:
                raise GraphError(f"cycle detected at {parent!r}")
            if id(parent) not in done:
                stack.append((parent, False))
    return order


def forward(root: Node) -> Matrix:
    """Return the root value after checking every cached value in the graph is finite."""
    for node in topological_order(root):
        if not np.all(np.isfinite(node.value)):
            raise GraphError(f"non-finite value produced by {node.op} {node.shape}")
    return root.value


def backward(root: Node) -> dict[Node, Matrix]:
    """Reverse-mode sweep from a scalar root; returns the gradient of every trainable leaf."""
    if root.shape != (1, 1):
        raise GraphError(f"backward needs a scalar root, got shape {root.shape}")
    order = topological_order(root)
    for node in order:
        node.grad = None
    root.grad = np.ones((1, 1))
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)
    grads = {}
    for node in order:
        if node.op == "leaf" and node.requires_grad:
            if node.grad is None:
                node.grad = np.zeros_like(node.value)
            grads[node] = node.grad
    return grads
