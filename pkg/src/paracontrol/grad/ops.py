"""Differentiable primitives.

Each function computes its forward value with numpy (or a compiled kernel)
and registers a closure returning one gradient per parent.
"""
from __future__ import annotations


import numpy as np

from paracontrol import kernels
from paracontrol.grad.tensor import DTYPE, ShapeError, Tensor, as_tensor, make_node


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if g.shape == shape:
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(op, a.shape, b.shape) from None


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)
    sa, sb = a.shape, b.shape
    ra, rb = a.requires_grad, b.requires_grad
    return make_node(a.data + b.data, (a, b), "add",
                     lambda g: (_unbroadcast(g, sa) if ra else None, _unbroadcast(g, sb) if rb else None))


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)
    sa, sb = a.shape, b.shape
    ra, rb = a.requires_grad, b.requires_grad
    return make_node(a.data - b.data, (a, b), "sub",
                     lambda g: (_unbroadcast(g, sa) if ra else None, _unbroadcast(-g, sb) if rb else None))


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("elementwise-mul", a, b)
    ad, bd = a.data, b.data
    ra, rb = a.requires_grad, b.requires_grad
    return make_node(ad * bd, (a, b), "elementwise-mul",
                     lambda g: (_unbroadcast(g * bd, ad.shape) if ra else None,
                                _unbroadcast(g * ad, bd.shape) if rb else None))


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("div", a, b)
    ad, bd = a.data, b.data
    out = ad / bd
    return make_node(out, (a, b), "div",
                     lambda g: (_unbroadcast(g / bd, ad.shape), _unbroadcast(-g * out / bd, bd.shape)))


def matmul(a, b) -> Tensor:
    """Matrix product; ``a`` may carry leading batch axes, ``b`` may be 2-D or batched."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError("matmul", a.shape, b.shape)
    ad, bd = a.data, b.data
    ra, rb = a.requires_grad, b.requires_grad
    if bd.ndim == 2 and ad.ndim > 2:
        k, n = bd.shape
        out = (ad.reshape(-1, k) @ bd).reshape(ad.shape[:-1] + (n,))

        def backward(g):
            g2 = g.reshape(-1, n)
            ga = (g2 @ bd.T).reshape(ad.shape) if ra else None
            return ga, (ad.reshape(-1, k).T @ g2 if rb else None)
    else:
        if ad.shape[:-2] != bd.shape[:-2] and ad.ndim == bd.ndim:
            raise ShapeError("matmul", a.shape, b.shape, detail="batch axes differ")
        out = ad @ bd

        def backward(g):
            ga = _unbroadcast(g @ np.swapaxes(bd, -1, -2), ad.shape) if ra else None
            gb = _unbroadcast(np.swapaxes(ad, -1, -2) @ g, bd.shape) if rb else None
            return ga, gb
    return make_node(out, (a, b), "matmul", backward)


def sum_(a, axis=None, keepdims=False) -> Tensor:
    a = as_tensor(a)
    shape = a.shape
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape).copy(),)
    return make_node(np.asarray(out, dtype=DTYPE), (a,), "sum", backward)


def mean(a, axis=None, keepdims=False) -> Tensor:
    a = as_tensor(a)
    if axis is None:
        count = a.size
    else:
        axes = (axis,) if isinstance(axis, int) else axis
        count = int(np.prod([a.shape[ax] for ax in axes]))
    return mul(sum_(a, axis=axis, keepdims=keepdims), 1.0 / count)


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    old = a.shape
    try:
        out = a.data.reshape(shape)
    except ValueError:
        raise ShapeError("reshape", old, shape) from None
    return make_node(out, (a,), "reshape", lambda g: (g.reshape(old),))


def transpose(a, axes=None) -> Tensor:
    a = as_tensor(a)
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    inv = tuple(np.argsort(axes))
    return make_node(a.data.transpose(axes), (a,), "transpose", lambda g: (g.transpose(inv),))


def slice_(a, idx) -> Tensor:
    a = as_tensor(a)
    shape = a.shape
    try:
        out = a.data[idx]
    except IndexError as exc:
        raise ShapeError("slice", shape, detail=str(exc)) from None

    parts = idx if isinstance(idx, tuple) else (idx,)
    advanced = any(isinstance(p, (list, np.ndarray)) for p in parts)

    def backward(g):
        full = np.zeros(shape, dtype=DTYPE)
        if advanced:
            np.add.at(full, idx, g)
        else:
            full[idx] = g
        return (full,)
    return make_node(np.array(out, dtype=DTYPE), (a,), "slice", backward)


def concat(tensors, axis=0) -> Tensor:
    ts = [as_tensor(t) for t in tensors]
    if not ts:
        raise ShapeError("concat", detail="no inputs")
    try:
        out = np.concatenate([t.data for t in ts], axis=axis)
    except ValueError:
        raise ShapeError("concat", *[t.shape for t in ts]) from None
    splits = np.cumsum([t.shape[axis] for t in ts])[:-1]
    return make_node(out, ts, "concat", lambda g: tuple(np.split(g, splits, axis=axis)))


def stack(tensors, axis=0) -> Tensor:
    ts = [as_tensor(t) for t in tensors]
    return concat([reshape(t, t.shape[:axis] + (1,) + t.shape[axis:]) for t in ts], axis=axis)


def _rows(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x.reshape(-1, x.shape[-1]))


def softmax(a, bias=None) -> Tensor:
    """Softmax over the last axis.

    ``bias`` is a constant array added to the input before normalizing (an
    attention mask, say); it receives no gradient.
    """
    a = as_tensor(a)
    shape = a.shape
    x = a.data if bias is None else a.data + bias
    if x.shape != shape:
        raise ShapeError("softmax", shape, np.shape(bias), detail="bias must not change the shape")
    y = kernels.softmax_forward(_rows(x))
    return make_node(y.reshape(shape), (a,), "softmax",
                     lambda g: (kernels.softmax_backward(y, _rows(g)).reshape(shape),))


def log_softmax(a) -> Tensor:
    a = as_tensor(a)
    x = a.data
    shifted = x - x.max(axis=-1, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    p = np.exp(out)
    return make_node(out, (a,), "log-softmax",
                     lambda g: (g - p * g.sum(axis=-1, keepdims=True),))


def layer_norm(x, gamma, beta, eps: float = 1e-5) -> Tensor:
    x, gamma, beta = as_tensor(x), as_tensor(gamma), as_tensor(beta)
    d = x.shape[-1]
    if gamma.shape != (d,) or beta.shape != (d,):
        raise ShapeError("layer-norm", x.shape, gamma.shape, beta.shape)
    shape = x.shape
    y, xhat, rstd = kernels.layernorm_forward(_rows(x.data), gamma.data, beta.data, eps)
    gd = gamma.data

    def backward(g):
        gx, gg, gb = kernels.layernorm_backward(_rows(g), xhat, rstd, gd)
        return gx.reshape(shape), gg, gb
    return make_node(y.reshape(shape), (x, gamma, beta), "layer-norm", backward)


def embedding(weight, ids) -> Tensor:
    """Row lookup ``weight[ids]`` for an integer array ``ids``."""
    weight = as_tensor(weight)
    ids = np.asarray(ids)
    if weight.ndim != 2 or not np.issubdtype(ids.dtype, np.integer):
        raise ShapeError("embedding-lookup", weight.shape, ids.shape, detail="need 2-D table, integer ids")
    if ids.size and (ids.min() < 0 or ids.max() >= weight.shape[0]):
        raise ShapeError("embedding-lookup", weight.shape, ids.shape, detail="id out of range")
    vocab, dim = weight.shape

    def backward(g):
        flat = ids.reshape(-1)
        full = np.zeros((vocab, dim), dtype=DTYPE)
        np.add.at(full, flat, g.reshape(-1, dim))
        return (full,)
    return make_node(weight.data[ids], (weight,), "embedding-lookup", backward)


def relu(a) -> Tensor:
    a = as_tensor(a)
    mask = a.data > 0
    return make_node(a.data * mask, (a,), "relu", lambda g: (g * mask,))


def gelu(a) -> Tensor:
    """GELU, tanh approximation."""
    a = as_tensor(a)
    y, dy = kernels.gelu_forward(_rows(a.data))
    shape = a.shape
    return make_node(y.reshape(shape), (a,), "gelu", lambda g: (g * dy.reshape(shape),))


def tanh(a) -> Tensor:
    a = as_tensor(a)
    t = np.tanh(a.data)
    return make_node(t, (a,), "tanh", lambda g: (g * (1.0 - t * t),))


def exp(a) -> Tensor:
    a = as_tensor(a)
    e = np.exp(a.data)
    return make_node(e, (a,), "exp", lambda g: (g * e,))


def log(a) -> Tensor:
    a = as_tensor(a)
    x = a.data
    return make_node(np.log(x), (a,), "log", lambda g: (g / x,))


def sqrt(a) -> Tensor:
    a = as_tensor(a)
    r = np.sqrt(a.data)
    return make_node(r, (a,), "sqrt", lambda g: (g * 0.5 / r,))


def cross_entropy(logits, targets, weights=None) -> Tensor:
    """Mean negative log-likelihood of integer ``targets`` under ``logits``.

    ``weights`` (same shape as ``targets``) masks or re-weights positions;
    the result is divided by the weight total.
    """
    logits = as_tensor(logits)
    targets = np.asarray(targets)
    if logits.shape[:-1] != targets.shape:
        raise ShapeError("cross-entropy", logits.shape, targets.shape)
    vocab = logits.shape[-1]
    t = np.ascontiguousarray(targets.reshape(-1), dtype=np.int64)
    if t.size and (t.min() < 0 or t.max() >= vocab):
        raise ShapeError("cross-entropy", logits.shape, targets.shape, detail="target id out of range")
    w = np.ones(t.size) if weights is None else np.ascontiguousarray(np.asarray(weights, DTYPE).reshape(-1))
    if w.size != t.size:
        raise ShapeError("cross-entropy", targets.shape, np.shape(weights))
    total = w.sum()
    if total <= 0:
        raise ValueError("cross-entropy: weights sum to zero")
    loss, grad = kernels.cross_entropy_fwd_bwd(_rows(logits.data), t, w)
    shape = logits.shape
    return make_node(np.asarray(loss / total), (logits,), "cross-entropy",
                     lambda g: ((grad * (float(g) / total)).reshape(shape),))


def mse(pred, target) -> Tensor:
    """Mean squared error over all elements."""
    pred, target = as_tensor(pred), as_tensor(target)
    if pred.shape != target.shape:
        raise ShapeError("mse", pred.shape, target.shape)
    diff = pred.data - target.data
    n = diff.size

    def backward(g):
        gp = (2.0 / n) * float(g) * diff
        return gp, -gp
    return make_node(np.asarray((diff * diff).mean()), (pred, target), "mse", backward)


def detach(a) -> Tensor:
    return Tensor(as_tensor(a).data)


PRIMITIVES = {
    "matmul": matmul,
    "add": add,
    "elementwise-mul": mul,
    "softmax": softmax,
    "layer-norm": layer_norm,
    "embedding-lookup": embedding,
    "gelu": gelu,
    "relu": relu,
    "cross-entropy": cross_entropy,
    "mse": mse,
    "concat": concat,
    "slice": slice_,
}


def primitive_forward(kind: str, *inputs, **kwargs) -> Tensor:
    """Apply the primitive named ``kind`` (e.g. ``"layer-norm"``) to ``inputs``."""
    try:
        fn = PRIMITIVES[kind]
    except KeyError:
        raise ValueError(f"unknown primitive {kind!r}; expected one of {sorted(PRIMITIVES)}") from None
    return fn(*inputs, **kwargs)
