"""Numba-compiled hot kernels: fused LSTM cell, bilinear attention,
softmax cross-entropy, and optimizer updates.

Import of this module fails cleanly when numba is unavailable; the
selection logic in kernels.py then falls back to the numpy versions.
All kernels take C-contiguous float64 arrays. No fastmath: results must
stay reproducible and close to the numpy path.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _sig(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@njit(cache=True)
def lstm_cell_fwd(x, h, c, W, U, b):
    H = c.shape[0]
    pre = np.dot(x, W) + np.dot(h, U) + b
    act = np.empty(4 * H)
    c2 = np.empty(H)
    tc2 = np.empty(H)
    h2 = np.empty(H)
    for k in range(H):
        i = _sig(pre[k])
        f = _sig(pre[H + k])
        g = math.tanh(pre[2 * H + k])
        o = _sig(pre[3 * H + k])
        act[k] = i
        act[H + k] = f
        act[2 * H + k] = g
        act[3 * H + k] = o
        cc = f * c[k] + i * g
        c2[k] = cc
        t = math.tanh(cc)
        tc2[k] = t
        h2[k] = o * t
    return h2, c2, act, tc2


@njit(cache=True)
def lstm_cell_bwd(c, W, U, act, tc2, dh2, dc2):
    # weight grads are flushed later as one GEMM over the whole sequence;
    # here only dpre and the input-side grads are produced
    H = c.shape[0]
    dpre = np.empty(4 * H)
    dc = np.empty(H)
    for k in range(H):
        i = act[k]
        f = act[H + k]
        g = act[2 * H + k]
        o = act[3 * H + k]
        t = tc2[k]
        do = dh2[k] * t
        dcell = dc2[k] + dh2[k] * o * (1.0 - t * t)
        di = dcell * g
        df = dcell * c[k]
        dg = dcell * i
        dc[k] = dcell * f
        dpre[k] = di * i * (1.0 - i)
        dpre[H + k] = df * f * (1.0 - f)
        dpre[2 * H + k] = dg * (1.0 - g * g)
        dpre[3 * H + k] = do * o * (1.0 - o)
    dx = np.dot(W, dpre)
    dh = np.dot(U, dpre)
    return dx, dh, dc, dpre


@njit(cache=True)
def attend_fwd(s, enc, A):
    sA = np.dot(s, A)
    scores = np.dot(enc, sA)
    L = scores.shape[0]
    mx = scores[0]
    for i in range(1, L):
        if scores[i] > mx:
            mx = scores[i]
    w = np.empty(L)
    tot = 0.0
    for i in range(L):
        e = math.exp(scores[i] - mx)
        w[i] = e
        tot += e
    for i in range(L):
        w[i] /= tot
    ctx = np.dot(w, enc)
    return w, ctx, sA


@njit(cache=True)
def attend_bwd(enc, A, w, sA, dw_in, dctx):
    L, He = enc.shape
    dw = dw_in + np.dot(enc, dctx)
    denc = np.empty((L, He))
    for i in range(L):
        wi = w[i]
        for j in range(He):
            denc[i, j] = wi * dctx[j]
    dot = 0.0
    for i in range(L):
        dot += dw[i] * w[i]
    dscores = np.empty(L)
    for i in range(L):
        dscores[i] = (dw[i] - dot) * w[i]
    for i in range(L):
        dsi = dscores[i]
        for j in range(He):
            denc[i, j] += dsi * sA[j]
    dsA = np.dot(dscores, enc)
    ds = np.dot(A, dsA)
    return ds, denc, dsA


@njit(cache=True)
def xent_fwd(logits, target):
    V = logits.shape[0]
    mx = logits[0]
    for i in range(1, V):
        if logits[i] > mx:
            mx = logits[i]
    probs = np.empty(V)
    tot = 0.0
    for i in range(V):
        e = math.exp(logits[i] - mx)
        probs[i] = e
        tot += e
    for i in range(V):
        probs[i] /= tot
    loss = math.log(tot) + mx - logits[target]
    return loss, probs


@njit(cache=True)
def xent_bwd(probs, target, gl):
    V = probs.shape[0]
    d = np.empty(V)
    for i in range(V):
        d[i] = gl * probs[i]
    d[target] -= gl
    return d


@njit(cache=True)
def adam_step(p, g, m, v, lr, b1, b2, eps, bc1, bc2, gscale):
    n = p.shape[0]
    for i in range(n):
        gi = g[i] * gscale
        mi = b1 * m[i] + (1.0 - b1) * gi
        vi = b2 * v[i] + (1.0 - b2) * gi * gi
        m[i] = mi
        v[i] = vi
        p[i] -= lr * (mi / bc1) / (math.sqrt(vi / bc2) + eps)


@njit(cache=True)
def sgd_step(p, g, lr, gscale):
    n = p.shape[0]
    for i in range(n):
        p[i] -= lr * g[i] * gscale
