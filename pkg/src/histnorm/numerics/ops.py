"""Differentiable primitive ops.

Each op computes its forward value eagerly and, when a tape is recording,
appends a closure that routes output gradients to its inputs. Gradients
for fused ops (lstm_cell, attend) accumulate straight into the parameter
grad buffers through the active kernel backend.
"""

from __future__ import annotations

import numpy as np

from histnorm.numerics import kernels
from histnorm.numerics.tape import active_tape
from histnorm.numerics.tensor import Tensor, accumulate, ensure_grad


class ShapeError(ValueError):
    def __init__(self, op: str, *shapes):
        super().__init__(f"{op}: incompatible shapes {' x '.join(str(s) for s in shapes)}")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    ad, bd = a.data, b.data
    if ad.ndim == 0 or bd.ndim == 0 or ad.ndim > 2 or bd.ndim > 2 or ad.shape[-1] != bd.shape[0]:
        raise ShapeError("matmul", ad.shape, bd.shape)
    out = Tensor(ad @ bd)
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            if ad.ndim == 2 and bd.ndim == 2:
                accumulate(a, g @ bd.T, own=True)
                accumulate(b, ad.T @ g, own=True)
            elif ad.ndim == 1 and bd.ndim == 2:
                accumulate(a, bd @ g, own=True)
                accumulate(b, np.outer(ad, g), own=True)
            elif ad.ndim == 2 and bd.ndim == 1:
                accumulate(a, np.outer(g, bd), own=True)
                accumulate(b, ad.T @ g, own=True)
            else:
                accumulate(a, g * bd, own=True)
                accumulate(b, g * ad, own=True)

        tape.record(bw)
    return out


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ShapeError("add", a.data.shape, b.data.shape)
    out = Tensor(a.data + b.data)
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            accumulate(a, g)
            accumulate(b, g)

        tape.record(bw)
    return out


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ShapeError("mul", a.data.shape, b.data.shape)
    out = Tensor(a.data * b.data)
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            accumulate(a, g * b.data, own=True)
            accumulate(b, g * a.data, own=True)

        tape.record(bw)
    return out


def concat(parts: list[Tensor]) -> Tensor:
    if not parts or any(p.data.ndim != 1 for p in parts):
        raise ShapeError("concat", *[p.data.shape for p in parts])
    out = Tensor(np.concatenate([p.data for p in parts]))
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            off = 0
            for p in parts:
                n = p.data.shape[0]
                accumulate(p, g[off : off + n])
                off += n

        tape.record(bw)
    return out


def stack(rows: list[Tensor]) -> Tensor:
    """Stack equal-length 1-D tensors into a 2-D tensor (one per row)."""
    if not rows or any(r.data.ndim != 1 for r in rows):
        raise ShapeError("stack", *[r.data.shape for r in rows])
    out = Tensor(np.stack([r.data for r in rows]))
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            for i, r in enumerate(rows):
                accumulate(r, g[i])

        tape.record(bw)
    return out


def sigmoid(x: Tensor) -> Tensor:
    from scipy.special import expit

    out = Tensor(expit(x.data))
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            y = out.data
            accumulate(x, g * y * (1.0 - y), own=True)

        tape.record(bw)
    return out


def tanh(x: Tensor) -> Tensor:
    out = Tensor(np.tanh(x.data))
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            y = out.data
            accumulate(x, g * (1.0 - y * y), own=True)

        tape.record(bw)
    return out


def softmax(x: Tensor) -> Tensor:
    if x.data.ndim != 1:
        raise ShapeError("softmax", x.data.shape)
    out = Tensor(kernels.active.softmax(x.data))
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            y = out.data
            accumulate(x, (g - g @ y) * y, own=True)

        tape.record(bw)
    return out


def embedding_lookup(table: Tensor, index: int) -> Tensor:
    if table.data.ndim != 2:
        raise ShapeError("embedding_lookup", table.data.shape)
    if not 0 <= index < table.data.shape[0]:
        raise IndexError(f"embedding_lookup: index {index} out of range 0..{table.data.shape[0] - 1}")
    out = Tensor(table.data[index].copy())
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            ensure_grad(table)[index] += g

        tape.record(bw)
    return out


def cross_entropy_loss(logits: Tensor, target_index: int) -> Tensor:
    """-log softmax(logits)[target], log-sum-exp stabilized. Scalar output."""
    if logits.data.ndim != 1:
        raise ShapeError("cross_entropy_loss", logits.data.shape)
    if not 0 <= target_index < logits.data.shape[0]:
        raise IndexError(
            f"cross_entropy_loss: target {target_index} out of range 0..{logits.data.shape[0] - 1}"
        )
    loss_val, probs = kernels.active.xent_fwd(logits.data, target_index)
    out = Tensor(loss_val)
    tape = active_tape()
    if tape is not None:

        def bw():
            g = out.grad
            if g is None:
                return
            accumulate(logits, kernels.active.xent_bwd(probs, target_index, float(g)), own=True)

        tape.record(bw)
    return out


def lstm_cell(x: Tensor, h: Tensor, c: Tensor, W: Tensor, U: Tensor, b: Tensor) -> tuple[Tensor, Tensor]:
    """Fused LSTM step: gates = x@W + h@U + b, returns (h', c').

    Gate layout along the 4H axis is input, forget, cell, output.
    """
    H = c.data.shape[0]
    if (
        x.data.ndim != 1
        or W.data.shape != (x.data.shape[0], 4 * H)
        or U.data.shape != (H, 4 * H)
        or b.data.shape != (4 * H,)
        or h.data.shape != (H,)
    ):
        raise ShapeError("lstm_cell", x.data.shape, h.data.shape, c.data.shape, W.data.shape, U.data.shape, b.data.shape)
    h2d, c2d, act, tc2 = kernels.active.lstm_cell_fwd(x.data, h.data, c.data, W.data, U.data, b.data)
    h2, c2 = Tensor(h2d), Tensor(c2d)
    tape = active_tape()
    if tape is not None:
        # weight grads are rank-1 per step; batch them per tape and flush as
        # one GEMM (W, U, b must be leaves, which parameters always are)
        key = ("lstm", id(W), id(U), id(b))
        pending = tape.scratch(key)

        def flush():
            if not pending:
                return
            xs = np.stack([e[0] for e in pending])
            hs = np.stack([e[1] for e in pending])
            dpres = np.stack([e[2] for e in pending])
            ensure_grad(W)[...] += xs.T @ dpres
            ensure_grad(U)[...] += hs.T @ dpres
            ensure_grad(b)[...] += dpres.sum(axis=0)

        tape.defer(key, flush)

        def bw():
            dh2 = h2.grad
            dc2 = c2.grad
            if dh2 is None and dc2 is None:
                return
            if dh2 is None:
                dh2 = np.zeros(H)
            if dc2 is None:
                dc2 = np.zeros(H)
            dx, dh, dc, dpre = kernels.active.lstm_cell_bwd(
                c.data, W.data, U.data, act, tc2, dh2, dc2
            )
            pending.append((x.data, h.data, dpre))
            accumulate(x, dx, own=True)
            accumulate(h, dh, own=True)
            accumulate(c, dc, own=True)

        tape.record(bw)
    return h2, c2


def attend(state: Tensor, enc: Tensor, A: Tensor) -> tuple[Tensor, Tensor]:
    """Bilinear soft attention: weights = softmax(enc @ (state @ A)),
    context = weights @ enc. Returns (weights, context)."""
    if (
        state.data.ndim != 1
        or enc.data.ndim != 2
        or A.data.shape != (state.data.shape[0], enc.data.shape[1])
    ):
        raise ShapeError("attend", state.data.shape, enc.data.shape, A.data.shape)
    wd, ctxd, sA = kernels.active.attend_fwd(state.data, enc.data, A.data)
    weights, context = Tensor(wd), Tensor(ctxd)
    tape = active_tape()
    if tape is not None:
        key = ("attend", id(A))
        pending = tape.scratch(key)

        def flush():
            if not pending:
                return
            ss = np.stack([e[0] for e in pending])
            dsAs = np.stack([e[1] for e in pending])
            ensure_grad(A)[...] += ss.T @ dsAs

        tape.defer(key, flush)

        def bw():
            dw = weights.grad
            dctx = context.grad
            if dw is None and dctx is None:
                return
            if dw is None:
                dw = np.zeros_like(wd)
            if dctx is None:
                dctx = np.zeros_like(ctxd)
            ds, denc, dsA = kernels.active.attend_bwd(enc.data, A.data, wd, sA, dw, dctx)
            pending.append((state.data, dsA))
            accumulate(state, ds, own=True)
            accumulate(enc, denc, own=True)

        tape.record(bw)
    return weights, context
