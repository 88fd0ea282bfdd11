"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
Inputs are expected to be C-contiguous float64 arrays; 2-D kernels work
row-wise over the last axis.
"""
import numpy as np

BACKEND = "python"


def softmax_forward(x):
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_backward(y, gy):
    dot = (gy * y).sum(axis=1, keepdims=True)
    return y * (gy - dot)


def layernorm_forward(x, gamma, beta, eps):
    mu = x.mean(axis=1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=1, keepdims=True)
    rstd = 1.0 / np.sqrt(var + eps)
    xhat = xc * rstd
    return xhat * gamma + beta, xhat, rstd[:, 0].copy()


def layernorm_backward(gy, xhat, rstd, gamma):
    n = xhat.shape[1]
    gxhat = gy * gamma
    s1 = gxhat.sum(axis=1, keepdims=True)
    s2 = (gxhat * xhat).sum(axis=1, keepdims=True)
    gx = (rstd[:, None] / n) * (n * gxhat - s1 - xhat * s2)
    return gx, (gy * xhat).sum(axis=0), gy.sum(axis=0)


def cross_entropy_fwd_bwd(logits, targets, weights):
    """Weighted sum of token NLLs and its gradient w.r.t. ``logits``."""
    m = logits.max(axis=1, keepdims=True)
    e = np.exp(logits - m)
    z = e.sum(axis=1, keepdims=True)
    rows = np.arange(logits.shape[0])
    logp = logits[rows, targets] - m[:, 0] - np.log(z[:, 0])
    loss = float(-(weights * logp).sum())
    grad = e / z
    grad[rows, targets] -= 1.0
    grad *= weights[:, None]
    return loss, grad


_GELU_C = 0.7978845608028654  # sqrt(2 / pi)


def gelu_forward(x):
    """tanh-approximated GELU of a contiguous 2-D array; returns (y, dy/dx)."""
    x2 = x * x
    t = np.tanh(_GELU_C * x * (1.0 + 0.044715 * x2))
    y = 0.5 * x * (1.0 + t)
    dy = 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * _GELU_C * (1.0 + 3 * 0.044715 * x2)
    return y, dy


def kmeans1d(values, weights, k):
    """Globally optimal weighted k-means on sorted, distinct 1-D values.

    Dynamic program over contiguous segments; the leftmost optimal start of
    the last segment is non-decreasing in the segment end, which bounds the
    inner search. Requires ``k <= len(values)``. Returns sorted centers.
    """
    n = values.shape[0]
    cw = np.concatenate(([0.0], np.cumsum(weights)))
    cs = np.concatenate(([0.0], np.cumsum(weights * values)))
    cq = np.concatenate(([0.0], np.cumsum(weights * values * values)))

    def cost(m, i):
        sw = cw[i + 1] - cw[m]
        s = cs[i + 1] - cs[m]
        return np.maximum(cq[i + 1] - cq[m] - s * s / sw, 0.0)

    prev = cost(np.zeros(n, dtype=np.int64), np.arange(n))
    back = np.zeros((k, n), dtype=np.int64)
    for j in range(1, k):
        cur = np.full(n, np.inf)
        lo = j
        for i in range(j, n):
            m = np.arange(lo, i + 1)
            cand = prev[m - 1] + cost(m, i)
            best = int(np.argmin(cand))
            cur[i] = cand[best]
            back[j, i] = lo + best
            lo = lo + best
        prev = cur
    centers = np.empty(k)
    end = n - 1
    for j in range(k - 1, -1, -1):
        start = back[j, end]
        centers[j] = (cs[end + 1] - cs[start]) / (cw[end + 1] - cw[start])
        end = start - 1
    return centers
