# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels; see ``_kernels_py`` for the contract."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, fabs, tanh

cnp.import_array()

BACKEND = "cython"


def softmax_forward(const double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1], i, j
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] y = out
    cdef double mx, s
    for i in range(n):
        mx = x[i, 0]
        for j in range(1, m):
            if x[i, j] > mx:
                mx = x[i, j]
        s = 0.0
        for j in range(m):
            y[i, j] = exp(x[i, j] - mx)
            s += y[i, j]
        for j in range(m):
            y[i, j] /= s
    return out


def softmax_backward(const double[:, ::1] y, const double[:, ::1] gy):
    cdef Py_ssize_t n = y.shape[0], m = y.shape[1], i, j
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] gx = out
    cdef double dot
    for i in range(n):
        dot = 0.0
        for j in range(m):
            dot += gy[i, j] * y[i, j]
        for j in range(m):
            gx[i, j] = y[i, j] * (gy[i, j] - dot)
    return out


def layernorm_forward(const double[:, ::1] x, const double[::1] gamma,
                      const double[::1] beta, double eps):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1], i, j
    y_arr = np.empty((n, m), dtype=np.float64)
    xhat_arr = np.empty((n, m), dtype=np.float64)
    rstd_arr = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] y = y_arr
    cdef double[:, ::1] xhat = xhat_arr
    cdef double[::1] rstd = rstd_arr
    cdef double mu, var, d, r
    for i in range(n):
        mu = 0.0
        for j in range(m):
            mu += x[i, j]
        mu /= m
        var = 0.0
        for j in range(m):
            d = x[i, j] - mu
            var += d * d
        var /= m
        r = 1.0 / sqrt(var + eps)
        rstd[i] = r
        for j in range(m):
            d = (x[i, j] - mu) * r
            xhat[i, j] = d
            y[i, j] = d * gamma[j] + beta[j]
    return y_arr, xhat_arr, rstd_arr


def layernorm_backward(const double[:, ::1] gy, const double[:, ::1] xhat,
                       const double[::1] rstd, const double[::1] gamma):
    cdef Py_ssize_t n = xhat.shape[0], m = xhat.shape[1], i, j
    gx_arr = np.empty((n, m), dtype=np.float64)
    gg_arr = np.zeros(m, dtype=np.float64)
    gb_arr = np.zeros(m, dtype=np.float64)
    cdef double[:, ::1] gx = gx_arr
    cdef double[::1] gg = gg_arr
    cdef double[::1] gb = gb_arr
    cdef double s1, s2, g, scale
    for i in range(n):
        s1 = 0.0
        s2 = 0.0
        for j in range(m):
            g = gy[i, j] * gamma[j]
            s1 += g
            s2 += g * xhat[i, j]
            gg[j] += gy[i, j] * xhat[i, j]
            gb[j] += gy[i, j]
        scale = rstd[i] / m
        for j in range(m):
            g = gy[i, j] * gamma[j]
            gx[i, j] = scale * (m * g - s1 - xhat[i, j] * s2)
    return gx_arr, gg_arr, gb_arr


def cross_entropy_fwd_bwd(const double[:, ::1] logits, const cnp.int64_t[::1] targets,
                          const double[::1] weights):
    cdef Py_ssize_t n = logits.shape[0], v = logits.shape[1], i, j
    grad_arr = np.empty((n, v), dtype=np.float64)
    cdef double[:, ::1] grad = grad_arr
    cdef double mx, z, w, loss = 0.0
    cdef cnp.int64_t t
    for i in range(n):
        mx = logits[i, 0]
        for j in range(1, v):
            if logits[i, j] > mx:
                mx = logits[i, j]
        z = 0.0
        for j in range(v):
            grad[i, j] = exp(logits[i, j] - mx)
            z += grad[i, j]
        t = targets[i]
        w = weights[i]
        loss -= w * (logits[i, t] - mx - log(z))
        for j in range(v):
            grad[i, j] = w * (grad[i, j] / z)
        grad[i, t] -= w
    return loss, grad_arr


cdef inline double _seg_cost(double[::1] cw, double[::1] cs, double[::1] cq,
                             Py_ssize_t m, Py_ssize_t i):
    cdef double sw = cw[i + 1] - cw[m]
    cdef double s = cs[i + 1] - cs[m]
    cdef double c = cq[i + 1] - cq[m] - s * s / sw
    return c if c > 0.0 else 0.0


cdef double GELU_C = 0.7978845608028654


def gelu_forward(const double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1], i, j
    y_arr = np.empty((n, m), dtype=np.float64)
    dy_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] y = y_arr
    cdef double[:, ::1] dy = dy_arr
    cdef double v, v2, t
    for i in range(n):
        for j in range(m):
            v = x[i, j]
            v2 = v * v
            t = tanh(GELU_C * v * (1.0 + 0.044715 * v2))
            y[i, j] = 0.5 * v * (1.0 + t)
            dy[i, j] = 0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * GELU_C * (1.0 + 3 * 0.044715 * v2)
    return y_arr, dy_arr


def kmeans1d(const double[::1] values, const double[::1] weights, int k):
    cdef Py_ssize_t n = values.shape[0], i, j, m, lo, best_m, start, end
    cw_arr = np.zeros(n + 1)
    cs_arr = np.zeros(n + 1)
    cq_arr = np.zeros(n + 1)
    cdef double[::1] cw = cw_arr
    cdef double[::1] cs = cs_arr
    cdef double[::1] cq = cq_arr
    for i in range(n):
        cw[i + 1] = cw[i] + weights[i]
        cs[i + 1] = cs[i] + weights[i] * values[i]
        cq[i + 1] = cq[i] + weights[i] * values[i] * values[i]
    prev_arr = np.empty(n)
    cur_arr = np.empty(n)
    back_arr = np.zeros((k, n), dtype=np.int64)
    cdef double[::1] prev = prev_arr
    cdef double[::1] cur = cur_arr
    cdef cnp.int64_t[:, ::1] back = back_arr
    cdef double best, c
    for i in range(n):
        prev[i] = _seg_cost(cw, cs, cq, 0, i)
    for j in range(1, k):
        lo = j
        for i in range(j, n):
            best = prev[lo - 1] + _seg_cost(cw, cs, cq, lo, i)
            best_m = lo
            for m in range(lo + 1, i + 1):
                c = prev[m - 1] + _seg_cost(cw, cs, cq, m, i)
                if c < best:
                    best = c
                    best_m = m
            cur[i] = best
            back[j, i] = best_m
            lo = best_m
        prev, cur = cur, prev
    centers_arr = np.empty(k)
    cdef double[::1] centers = centers_arr
    end = n - 1
    for j in range(k - 1, -1, -1):
        start = back[j, end]
        centers[j] = (cs[end + 1] - cs[start]) / (cw[end + 1] - cw[start])
        end = start - 1
    return centers_arr
