"""Layer primitives with hand-derived backward passes.

All arrays are float64, NCHW layout for feature maps.  Each forward
returns (out, cache); the matching backward consumes the cache and the
upstream gradient.

Batch statistics (batch norm, the loss mean) reduce in two steps: a
per-sample numpy sum (a pure function of that sample's values) followed
by an exactly rounded fsum over the per-sample partials.  Because
round(2s) == 2*round(s) in binary floating point, duplicating the whole
batch leaves these statistics, and hence the loss, bit-identical.
"""

from __future__ import annotations

import math

import numpy as np

from ._reductions import exact_mean

BN_EPS = 1e-5


def _im2col(x, kh, kw, stride, pad):
    """Unfold to (N, C*kh*kw, H2*W2) via slice copies (no gather)."""
    if pad:
        x = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    n, c, hp, wp = x.shape
    h2 = (hp - kh) // stride + 1
    w2 = (wp - kw) // stride + 1
    cols = np.empty((n, c, kh, kw, h2, w2))
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j] = x[:, :, i:i + stride * h2:stride, j:j + stride * w2:stride]
    return cols.reshape(n, c * kh * kw, h2 * w2), (h2, w2)


def conv2d_forward(x, w, stride: int, pad: int):
    """3x3/1x1 convolution via im2col; no bias (batch norm follows)."""
    n, c, h, wd = x.shape
    f, _, kh, kw = w.shape
    cols, (h2, w2) = _im2col(x, kh, kw, stride, pad)
    out = np.matmul(w.reshape(f, -1)[None], cols).reshape(n, f, h2, w2)
    cache = (cols, (n, c, h, wd), w.shape, stride, pad, (h2, w2))
    return out, cache


def conv2d_backward(dout, w, cache):
    cols, (n, c, h, wd), w_shape, stride, pad, (h2, w2) = cache
    f, _, kh, kw = w_shape
    dmat = dout.reshape(n, f, h2 * w2)
    dw = np.tensordot(dmat, cols, axes=([0, 2], [0, 2])).reshape(w_shape)
    dcols = np.matmul(w.reshape(f, -1).T[None], dmat).reshape(n, c, kh, kw, h2, w2)
    dxp = np.zeros((n, c, h + 2 * pad, wd + 2 * pad))
    for i in range(kh):
        for j in range(kw):
            dxp[:, :, i:i + stride * h2:stride, j:j + stride * w2:stride] += dcols[:, :, i, j]
    dx = dxp[:, :, pad:pad + h, pad:pad + wd] if pad else dxp
    return dx, dw


def _channel_stat(per_sample, count):
    """fsum the per-sample partials of each channel; divide by count."""
    c = per_sample.shape[1]
    return np.array([math.fsum(per_sample[:, ch].tolist()) for ch in range(c)]) / count


def bn_forward_train(x, gamma, beta):
    """Batch norm with per-channel batch statistics (population variance)."""
    n, c, h, w = x.shape
    count = n * h * w
    mean = _channel_stat(x.sum(axis=(2, 3)), count)
    centered = x - mean[None, :, None, None]
    var = _channel_stat((centered ** 2).sum(axis=(2, 3)), count)
    inv_std = 1.0 / np.sqrt(var + BN_EPS)
    xhat = centered * inv_std[None, :, None, None]
    out = gamma[None, :, None, None] * xhat + beta[None, :, None, None]
    cache = (xhat, inv_std, gamma)
    return out, cache, mean, var


def bn_forward_eval(x, gamma, beta, running_mean, running_var):
    inv_std = 1.0 / np.sqrt(running_var + BN_EPS)
    xhat = (x - running_mean[None, :, None, None]) * inv_std[None, :, None, None]
    return gamma[None, :, None, None] * xhat + beta[None, :, None, None]


def bn_backward(dout, cache):
    xhat, inv_std, gamma = cache
    n, _, h, w = dout.shape
    m = n * h * w
    dbeta = dout.sum(axis=(0, 2, 3))
    dgamma = (dout * xhat).sum(axis=(0, 2, 3))
    dxhat = dout * gamma[None, :, None, None]
    dx = (inv_std[None, :, None, None] / m) * (
        m * dxhat
        - dxhat.sum(axis=(0, 2, 3))[None, :, None, None]
        - xhat * (dxhat * xhat).sum(axis=(0, 2, 3))[None, :, None, None]
    )
    return dx, dgamma, dbeta


def relu_forward(x):
    mask = x > 0
    return x * mask, mask


def relu_backward(dout, mask):
    return dout * mask


def gap_forward(x):
    """Global average pooling: (N, C, H, W) -> (N, C)."""
    n, c, h, w = x.shape
    return x.mean(axis=(2, 3)), (n, c, h, w)


def gap_backward(dout, cache):
    n, c, h, w = cache
    return np.broadcast_to(dout[:, :, None, None] / (h * w), (n, c, h, w)).copy()


def linear_forward(x, w, b):
    return x @ w + b, x


def linear_backward(dout, w, x):
    dw = x.T @ dout
    db = dout.sum(axis=0)
    dx = dout @ w.T
    return dx, dw, db


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(logits, labels0):
    """Mean cross-entropy and its logits gradient; labels are 0-based.

    The mean over samples is exactly rounded, so duplicating the whole
    batch leaves the loss unchanged.
    """
    n = logits.shape[0]
    z = logits - logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=1))
    per_sample = lse - z[np.arange(n), labels0]
    loss = exact_mean(per_sample)
    probs = np.exp(z - lse[:, None])
    dlogits = probs.copy()
    dlogits[np.arange(n), labels0] -= 1.0
    dlogits /= n
    return float(loss), dlogits
