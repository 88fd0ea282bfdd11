"""Central-difference gradient checking."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from paracontrol.grad.tensor import NonFiniteError, Tensor, backward


def _rel_error(analytic: np.ndarray, numeric: np.ndarray, guard: float) -> np.ndarray:
    return np.abs(analytic - numeric) / (np.abs(analytic) + np.abs(numeric) + guard)


def grad_check(fn: Callable[[Tensor], Tensor], point, eps: float = 1e-5,
               coords: Sequence[int] | None = None, guard: float = 1e-6) -> float:
    """Max relative error between backprop and central differences of ``fn`` at ``point``.

    ``coords`` restricts the comparison to those flat indices. Raises
    :class:`NonFiniteError` naming the first coordinate where either gradient
    (or the function value) is not finite.
    """
    if eps <= 0:
        raise ValueError("grad_check: eps must be positive")
    x0 = np.array(point, dtype=np.float64)
    x = Tensor(x0.copy(), requires_grad=True)
    out = fn(x)
    if not np.isfinite(out.data).all():
        raise NonFiniteError("function value")
    analytic = backward(out, wrt=[x])[x].reshape(-1)
    idx = np.arange(x0.size) if coords is None else np.asarray(coords)
    numeric = np.empty(idx.size)
    flat = x0.reshape(-1)
    for n, i in enumerate(idx):
        plus, minus = flat.copy(), flat.copy()
        plus[i] += eps
        minus[i] -= eps
        fp = fn(Tensor(plus.reshape(x0.shape))).item()
        fm = fn(Tensor(minus.reshape(x0.shape))).item()
        numeric[n] = (fp - fm) / (2 * eps)
        if not (np.isfinite(numeric[n]) and np.isfinite(analytic[i])):
            raise NonFiniteError("gradient", index=int(i))
    if idx.size == 0:
        return 0.0
    return float(_rel_error(analytic[idx], numeric, guard).max())


def grad_check_params(loss_fn: Callable[[], Tensor], params: Sequence[Tensor], eps: float = 1e-5,
                      per_param: int = 8, rng: np.random.Generator | None = None,
                      guard: float = 1e-6) -> float:
    """Like :func:`grad_check`, but perturbs model parameters in place.

    Checks ``per_param`` randomly chosen coordinates of each parameter and
    restores every value afterwards.
    """
    rng = rng or np.random.default_rng(0)
    loss = loss_fn()
    grads = backward(loss, wrt=params)
    worst = 0.0
    for p in params:
        analytic = grads[p].reshape(-1)
        flat = p.data.reshape(-1)
        picks = rng.choice(flat.size, size=min(per_param, flat.size), replace=False)
        for i in picks:
            orig = flat[i]
            flat[i] = orig + eps
            fp = loss_fn().item()
            flat[i] = orig - eps
            fm = loss_fn().item()
            flat[i] = orig
            num = (fp - fm) / (2 * eps)
            if not (np.isfinite(num) and np.isfinite(analytic[i])):
                raise NonFiniteError(f"gradient of {p.name or 'param'}", index=int(i))
            worst = max(worst, float(_rel_error(analytic[i], num, guard)))
    return worst
