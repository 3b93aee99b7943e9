"""Hot-path kernels with two interchangeable backends.

The numba backend compiles the fused LSTM cell, attention, cross-entropy
and optimizer loops; the numpy backend is a plain-vectorized fallback with
identical semantics. Selection happens once at import from the
HISTNORM_BACKEND environment variable ("numba", "numpy", or "auto"), and
can be switched at runtime with use_backend() (used by the benchmark and
the cross-backend tests; not thread-safe).
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np
from scipy.special import expit

BACKEND_ENV = "HISTNORM_BACKEND"


def _np_lstm_cell_fwd(x, h, c, W, U, b):
    pre = x @ W + h @ U + b
    H = c.shape[0]
    i = expit(pre[:H])
    f = expit(pre[H : 2 * H])
    g = np.tanh(pre[2 * H : 3 * H])
    o = expit(pre[3 * H :])
    c2 = f * c + i * g
    tc2 = np.tanh(c2)
    h2 = o * tc2
    act = np.concatenate((i, f, g, o))
    return h2, c2, act, tc2


def _np_lstm_cell_bwd(c, W, U, act, tc2, dh2, dc2):
    H = c.shape[0]
    i, f, g, o = act[:H], act[H : 2 * H], act[2 * H : 3 * H], act[3 * H :]
    do = dh2 * tc2
    dcell = dc2 + dh2 * o * (1.0 - tc2 * tc2)
    dpre = np.concatenate(
        (
            dcell * g * i * (1.0 - i),
            dcell * c * f * (1.0 - f),
            dcell * i * (1.0 - g * g),
            do * o * (1.0 - o),
        )
    )
    return W @ dpre, U @ dpre, dcell * f, dpre


def _np_softmax(x):
    z = np.exp(x - np.max(x))
    return z / z.sum()


def _np_attend_fwd(s, enc, A):
    sA = s @ A
    w = _np_softmax(enc @ sA)
    return w, w @ enc, sA


def _np_attend_bwd(enc, A, w, sA, dw_in, dctx):
    dw = dw_in + enc @ dctx
    denc = np.outer(w, dctx)
    dscores = (dw - dw @ w) * w
    denc += np.outer(dscores, sA)
    dsA = dscores @ enc
    return A @ dsA, denc, dsA


def _np_xent_fwd(logits, target):
    mx = np.max(logits)
    z = np.exp(logits - mx)
    tot = z.sum()
    probs = z / tot
    loss = float(np.log(tot) + mx - logits[target])
    return loss, probs


def _np_xent_bwd(probs, target, gl):
    d = gl * probs
    d[target] -= gl
    return d


def _np_adam_step(p, g, m, v, lr, b1, b2, eps, bc1, bc2, gscale):
    ge = g * gscale
    m *= b1
    m += (1.0 - b1) * ge
    v *= b2
    v += (1.0 - b2) * ge * ge
    p -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)


def _np_sgd_step(p, g, lr, gscale):
    p -= lr * gscale * g


_NUMPY = SimpleNamespace(
    name="numpy",
    lstm_cell_fwd=_np_lstm_cell_fwd,
    lstm_cell_bwd=_np_lstm_cell_bwd,
    attend_fwd=_np_attend_fwd,
    attend_bwd=_np_attend_bwd,
    xent_fwd=_np_xent_fwd,
    xent_bwd=_np_xent_bwd,
    adam_step=_np_adam_step,
    sgd_step=_np_sgd_step,
    softmax=_np_softmax,
)

_NUMBA = None
_numba_import_error: Exception | None = None


def _numba_backend():
    global _NUMBA, _numba_import_error
    if _NUMBA is None:
        try:
            from histnorm.numerics import _numba_kernels as nk
        except ImportError as e:  # numba not installed
            _numba_import_error = e
            return None
        _NUMBA = SimpleNamespace(
            name="numba",
            lstm_cell_fwd=nk.lstm_cell_fwd,
            lstm_cell_bwd=nk.lstm_cell_bwd,
            attend_fwd=nk.attend_fwd,
            attend_bwd=nk.attend_bwd,
            xent_fwd=nk.xent_fwd,
            xent_bwd=nk.xent_bwd,
            adam_step=nk.adam_step,
            sgd_step=nk.sgd_step,
            softmax=_np_softmax,
        )
    return _NUMBA


def get_backend(name: str):
    """Return a backend namespace by name without activating it."""
    if name == "numpy":
        return _NUMPY
    if name == "numba":
        nb = _numba_backend()
        if nb is None:
            raise RuntimeError(f"numba backend requested but unavailable: {_numba_import_error}")
        return nb
    raise ValueError(f"unknown backend {name!r} (expected 'numba' or 'numpy')")


def use_backend(name: str) -> str:
    """Activate a backend by name; returns the name actually in effect."""
    global active
    active = get_backend(name)
    return active.name


def backend_name() -> str:
    return active.name


def available_backends() -> list[str]:
    names = ["numpy"]
    if _numba_backend() is not None:
        names.insert(0, "numba")
    return names


def _initial_backend():
    choice = os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if choice in ("numpy", "numba"):
        return get_backend(choice)
    if choice not in ("", "auto"):
        raise ValueError(f"{BACKEND_ENV}={choice!r}: expected 'numba', 'numpy' or 'auto'")
    nb = _numba_backend()
    return nb if nb is not None else _NUMPY


active = _initial_backend()
