"""Define-by-run reverse-mode differentiation over numpy arrays."""
from __future__ import annotations

import threading
from contextlib import contextmanager
from typing import Callable, Iterable, Sequence

import numpy as np

DTYPE = np.float64

_state = threading.local()


class ShapeError(ValueError):
    """Raised when an operation receives incompatible operand shapes."""

    def __init__(self, op: str, *shapes, detail: str = ""):
        shown = ", ".join(str(tuple(s)) for s in shapes)
        msg = f"{op}: incompatible shapes {shown}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.op = op
        self.shapes = shapes


class NonFiniteError(FloatingPointError):
    """A loss or gradient contained NaN or infinity."""

    def __init__(self, what: str, index=None):
        msg = f"non-finite value in {what}"
        if index is not None:
            msg += f" at index {index}"
        super().__init__(msg)
        self.index = index


def grad_enabled() -> bool:
    return getattr(_state, "enabled", True)


@contextmanager
def no_grad():
    """Disable graph recording in the current thread."""
    prev = grad_enabled()
    _state.enabled = False
    try:
        yield
    finally:
        _state.enabled = prev


class Tensor:
    """A dense array that may take part in a differentiation graph.

    Leaves are created directly; non-leaf tensors are produced by the
    functions in :mod:`paracontrol.grad.ops` and remember their parents and
    a closure mapping the output gradient to one gradient per parent.
    """

    __slots__ = ("data", "grad", "requires_grad", "parents", "backward_fn", "op", "name")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=DTYPE)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self.parents: tuple[Tensor, ...] = ()
        self.backward_fn: Callable | None = None
        self.op = "leaf"
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_leaf(self) -> bool:
        return self.backward_fn is None

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> Tensor:
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        label = f" {self.name!r}" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, op={self.op}{flag})"

    # operator sugar; implementations live in ops
    def __add__(self, other):
        from paracontrol.grad import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from paracontrol.grad import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from paracontrol.grad import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from paracontrol.grad import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        from paracontrol.grad import ops
        return ops.div(self, other)

    def __neg__(self):
        from paracontrol.grad import ops
        return ops.mul(self, -1.0)

    def __matmul__(self, other):
        from paracontrol.grad import ops
        return ops.matmul(self, other)

    def __getitem__(self, idx):
        from paracontrol.grad import ops
        return ops.slice_(self, idx)

    def sum(self, axis=None, keepdims=False):
        from paracontrol.grad import ops
        return ops.sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        from paracontrol.grad import ops
        return ops.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        from paracontrol.grad import ops
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)

    def transpose(self, *axes):
        from paracontrol.grad import ops
        return ops.transpose(self, axes or None)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def make_node(data: np.ndarray, parents: Sequence[Tensor], op: str, backward_fn: Callable) -> Tensor:
    """Wrap an op result, recording it when any parent needs gradients."""
    out = Tensor.__new__(Tensor)
    out.data = data
    out.grad = None
    out.name = None
    if grad_enabled() and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out.parents = tuple(parents)
        out.backward_fn = backward_fn
        out.op = op
    else:
        out.requires_grad = False
        out.parents = ()
        out.backward_fn = None
        out.op = op if op == "leaf" else f"{op}(const)"
    return out


class GradTape:
    """Nodes reachable from a loss, parents before children."""

    def __init__(self, nodes: list[Tensor]):
        self.nodes = nodes

    @classmethod
    def from_loss(cls, loss: Tensor) -> GradTape:
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(loss, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen or not node.requires_grad:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in reversed(node.parents):
                if p.requires_grad and id(p) not in seen:
                    stack.append((p, False))
        return cls(order)

    def leaves(self) -> list[Tensor]:
        return [n for n in self.nodes if n.is_leaf]

    def __len__(self) -> int:
        return len(self.nodes)


def backward(loss: Tensor, wrt: Iterable[Tensor] | None = None) -> dict[Tensor, np.ndarray]:
    """Backpropagate from a scalar ``loss``.

    Every reachable leaf with ``requires_grad`` gets its ``.grad`` replaced.
    Returns a map from leaf to gradient; leaves named in ``wrt`` that the loss
    does not reach map to zeros (and get a zero ``.grad``).
    """
    if loss.data.size != 1:
        raise ValueError(f"backward: loss must be scalar, got shape {loss.shape}")
    result: dict[Tensor, np.ndarray] = {}
    if loss.requires_grad:
        tape = GradTape.from_loss(loss)
        grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        for node in reversed(tape.nodes):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.is_leaf:
                node.grad = g
                result[node] = g
                continue
            for parent, pg in zip(node.parents, node.backward_fn(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                prev = grads.get(key)
                grads[key] = pg if prev is None else prev + pg
    if wrt is not None:
        for leaf in wrt:
            if leaf not in result:
                leaf.grad = np.zeros_like(leaf.data)
                result[leaf] = leaf.grad
    return result
