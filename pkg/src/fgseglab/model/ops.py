"""Array kernels (forward + backward) for every node kind.

All activations are NHWC.  Every forward returns ``(y, cache)`` and every
backward consumes exactly what its forward cached, so the executor stays a
thin dispatcher.  Kernels preserve the input dtype (float32 for training,
float64 for the reference gradient checks).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import as_strided

NORM_EPS = 1e-5
BN_MOMENTUM = 0.9   # fraction of the old running statistic kept per batch


# -- convolution -----------------------------------------------------------

def _conv_windows(xp: np.ndarray, out_h: int, out_w: int, k: int, d: int):
    n, _, _, c = xp.shape
    s0, s1, s2, s3 = xp.strides
    return as_strided(xp, shape=(n, out_h, out_w, k, k, c),
                      strides=(s0, s1, s2, s1 * d, s2 * d, s3))


def conv2d_forward(x, w, b, dilation=1):
    """Same-padded stride-1 convolution, arbitrary dilation."""
    k = w.shape[0]
    d = dilation
    p = d * (k - 1) // 2
    n, h, wdt, _ = x.shape
    xp = np.pad(x, ((0, 0), (p, p), (p, p), (0, 0))) if p else x
    windows = _conv_windows(xp, h, wdt, k, d)
    y = np.tensordot(windows, w, axes=([3, 4, 5], [0, 1, 2])) + b
    return y.astype(x.dtype, copy=False), (xp, x.shape, w, dilation)


def conv2d_backward(dy, cache):
    xp, x_shape, w, d = cache
    k = w.shape[0]
    p = d * (k - 1) // 2
    n, h, wdt, _ = x_shape
    windows = _conv_windows(xp, h, wdt, k, d)
    db = dy.sum(axis=(0, 1, 2))
    dw = np.tensordot(windows, dy, axes=([0, 1, 2], [0, 1, 2]))
    dxp = np.zeros_like(xp)
    for di in range(k):
        for dj in range(k):
            contrib = dy @ w[di, dj].T
            dxp[:, di * d: di * d + h, dj * d: dj * d + wdt, :] += contrib
    dx = dxp[:, p: p + h, p: p + wdt, :] if p else dxp
    return dx, dw.astype(dy.dtype, copy=False), db


# -- max pooling -----------------------------------------------------------

def maxpool_forward(x, kernel, stride):
    """Max pool; stride 2 is exact (even sizes), stride 1 pads with -inf."""
    n, h, w, c = x.shape
    if stride == 1:
        p = (kernel - 1) // 2
        xp = np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)),
                    constant_values=-np.inf)
        out_h, out_w = h, w
    else:
        p = 0
        xp = x
        out_h, out_w = h // stride, w // stride
    s0, s1, s2, s3 = xp.strides
    windows = as_strided(xp, shape=(n, out_h, out_w, kernel, kernel, c),
                         strides=(s0, s1 * stride, s2 * stride, s1, s2, s3))
    flat = windows.reshape(n, out_h, out_w, kernel * kernel, c)
    idx = flat.argmax(axis=3)
    y = np.take_along_axis(flat, idx[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    return y, (x.shape, xp.shape, idx, kernel, stride, p)


def maxpool_backward(dy, cache):
    x_shape, xp_shape, idx, kernel, stride, p = cache
    n, h, w, c = x_shape
    out_h, out_w = dy.shape[1], dy.shape[2]
    dxp = np.zeros(xp_shape, dtype=dy.dtype)
    for di in range(kernel):
        for dj in range(kernel):
            sel = idx == (di * kernel + dj)
            view = dxp[:, di: di + (out_h - 1) * stride + 1: stride,
                       dj: dj + (out_w - 1) * stride + 1: stride, :]
            view[sel] += dy[sel]
    return dxp[:, p: p + h, p: p + w, :] if p else dxp


# -- activations / dropout ---------------------------------------------------

def relu_forward(x):
    return np.maximum(x, 0), (x > 0)


def relu_backward(dy, cache):
    return dy * cache


def sigmoid_forward(x):
    y = np.empty_like(x)
    pos = x >= 0
    y[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    y[~pos] = ex / (1.0 + ex)
    return y, y


def sigmoid_backward(dy, y):
    return dy * y * (1.0 - y)


def dropout_forward(x, rate, kind, mode, rng):
    """Inverted dropout; 'spatial' drops whole channels per sample."""
    if mode != "train" or rate <= 0.0:
        return x, None
    if rng is None:
        raise ValueError("training-mode dropout needs an RNG")
    shape = (x.shape[0], 1, 1, x.shape[3]) if kind == "spatial" else x.shape
    keep = (rng.random(shape) >= rate).astype(x.dtype) / (1.0 - rate)
    return x * keep, keep


def dropout_backward(dy, keep):
    return dy if keep is None else dy * keep


# -- normalization -----------------------------------------------------------

def _norm_backward(dy, xhat, inv_std, gamma, stat_axes, m):
    # gamma/beta broadcast over (N,H,W); the statistics axes may be narrower
    # (instance norm normalizes per sample).
    dgamma = (dy * xhat).sum(axis=(0, 1, 2))
    dbeta = dy.sum(axis=(0, 1, 2))
    dxhat = dy * gamma
    dx = (inv_std / m) * (
        m * dxhat
        - dxhat.sum(axis=stat_axes, keepdims=True)
        - xhat * (dxhat * xhat).sum(axis=stat_axes, keepdims=True))
    return dx.astype(dy.dtype, copy=False), dgamma, dbeta


def instance_norm_forward(x, gamma, beta):
    axes = (1, 2)
    mu = x.mean(axis=axes, keepdims=True)
    var = x.var(axis=axes, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + NORM_EPS)
    xhat = (x - mu) * inv_std
    y = gamma * xhat + beta
    m = x.shape[1] * x.shape[2]
    return y.astype(x.dtype, copy=False), (xhat, inv_std, gamma, axes, m)


def instance_norm_backward(dy, cache):
    xhat, inv_std, gamma, axes, m = cache
    return _norm_backward(dy, xhat, inv_std, gamma, axes, m)


def batch_norm_forward(x, gamma, beta, running_mean, running_var, mode):
    """Batch statistics in train mode (and running stats updated in place),
    running statistics in eval mode.  Biased variance throughout."""
    axes = (0, 1, 2)
    if mode == "train":
        mu = x.mean(axis=axes)
        var = x.var(axis=axes)
        running_mean *= BN_MOMENTUM
        running_mean += (1.0 - BN_MOMENTUM) * mu
        running_var *= BN_MOMENTUM
        running_var += (1.0 - BN_MOMENTUM) * var
        inv_std = 1.0 / np.sqrt(var + NORM_EPS)
        xhat = (x - mu) * inv_std
        m = x.shape[0] * x.shape[1] * x.shape[2]
        y = gamma * xhat + beta
        return y.astype(x.dtype, copy=False), ("train", xhat, inv_std, gamma, axes, m)
    inv_std = 1.0 / np.sqrt(running_var + NORM_EPS)
    xhat = (x - running_mean) * inv_std
    y = gamma * xhat + beta
    return y.astype(x.dtype, copy=False), ("eval", xhat, inv_std, gamma, axes, None)


def batch_norm_backward(dy, cache):
    kind, xhat, inv_std, gamma, axes, m = cache
    if kind == "train":
        return _norm_backward(dy, xhat, inv_std, gamma, axes, m)
    dgamma = (dy * xhat).sum(axis=axes)
    dbeta = dy.sum(axis=axes)
    dx = dy * gamma * inv_std
    return dx.astype(dy.dtype, copy=False), dgamma, dbeta


# -- global average pooling ---------------------------------------------------

def gap_forward(x):
    return x.mean(axis=(1, 2), keepdims=True), x.shape


def gap_backward(dy, x_shape):
    n, h, w, c = x_shape
    return np.broadcast_to(dy / (h * w), x_shape).astype(dy.dtype, copy=False)


# -- joins ---------------------------------------------------------------------

def _sum_to_shape(grad, shape):
    """Reduce a broadcast gradient back to the operand's shape."""
    axes = tuple(i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g > 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def add_forward(a, b):
    return a + b, (a.shape, b.shape)


def add_backward(dy, cache):
    a_shape, b_shape = cache
    return _sum_to_shape(dy, a_shape), _sum_to_shape(dy, b_shape)


def multiply_forward(a, b):
    return a * b, (a, b)


def multiply_backward(dy, cache):
    a, b = cache
    return _sum_to_shape(dy * b, a.shape), _sum_to_shape(dy * a, b.shape)


def concat_forward(inputs):
    widths = [a.shape[-1] for a in inputs]
    return np.concatenate(inputs, axis=-1), widths


def concat_backward(dy, widths):
    splits = np.cumsum(widths)[:-1]
    return np.split(dy, splits, axis=-1)


# -- bilinear resize -------------------------------------------------------

@lru_cache(maxsize=None)
def _resize_matrix(in_size: int, out_size: int) -> np.ndarray:
    """Dense 1-D bilinear interpolation matrix, half-pixel-center convention."""
    m = np.zeros((out_size, in_size))
    scale = in_size / out_size
    for o in range(out_size):
        src = (o + 0.5) * scale - 0.5
        i0 = int(np.floor(src))
        t = src - i0
        i1 = min(max(i0 + 1, 0), in_size - 1)
        i0 = min(max(i0, 0), in_size - 1)
        m[o, i0] += 1.0 - t
        m[o, i1] += t
    return m


def resize_forward(x, out_size):
    n, h, w, c = x.shape
    mr = _resize_matrix(h, out_size).astype(x.dtype)
    mc = _resize_matrix(w, out_size).astype(x.dtype)
    t = np.einsum("oi,nivc->novc", mr, x)
    y = np.einsum("oj,nhjc->nhoc", mc, t)
    return y, (mr, mc)


def resize_backward(dy, cache):
    mr, mc = cache
    dt = np.einsum("oj,nhoc->nhjc", mc, dy)
    return np.einsum("oi,novc->nivc", mr, dt)
