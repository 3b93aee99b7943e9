"""Central finite-difference gradient checking used across the test suite.

The numeric side re-evaluates the loss from scratch per perturbed element,
so it shares nothing with the tape's reverse sweep."""

import numpy as np

from histnorm.numerics import Tape


def finite_difference_check(build_loss, params, eps=1e-5):
    """Return the worst relative error between tape gradients and central
    finite differences over all elements of all params.

    Relative error is |a - n| / max(1, |a|, |n|), which behaves like an
    absolute tolerance for near-zero gradients."""
    for p in params:
        if p.grad is not None:
            p.grad[...] = 0.0
    with Tape() as tape:
        loss = build_loss()
    tape.backward(loss)
    analytic = {id(p): p.grad.copy() for p in params}

    worst = 0.0
    for p in params:
        an = analytic[id(p)]
        flat = p.data.ravel()
        numeric = np.zeros_like(flat)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + eps
            hi = build_loss().item()
            flat[i] = old - eps
            lo = build_loss().item()
            flat[i] = old
            numeric[i] = (hi - lo) / (2.0 * eps)
        numeric = numeric.reshape(p.data.shape)
        err = np.abs(an - numeric) / np.maximum(1.0, np.maximum(np.abs(an), np.abs(numeric)))
        worst = max(worst, float(err.max()))
    return worst
