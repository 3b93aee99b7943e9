"""Minimal differentiable-computation core: float64 tensors, tape-recorded
primitive ops with reverse-mode gradients, and an optimizer. Hot kernels
are numba-compiled with a pure-numpy fallback (see kernels.py)."""

from histnorm.numerics import kernels, ops
from histnorm.numerics.optim import Optimizer, OptimizerError, optimizer_step
from histnorm.numerics.ops import ShapeError
from histnorm.numerics.tape import Tape, TapeReusedError, active_tape
from histnorm.numerics.tensor import Parameter, Tensor

__all__ = [
    "Tensor",
    "Parameter",
    "Tape",
    "TapeReusedError",
    "active_tape",
    "Optimizer",
    "OptimizerError",
    "optimizer_step",
    "ShapeError",
    "ops",
    "kernels",
]
