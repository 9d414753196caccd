"""
numerics 패키지
float64 텐서, define-by-run Tape 역전파, ADAM 옵티마이저
"""

from . import ops
from .gradcheck import gradcheck, numeric_grad
from .optim import AdamState, adam_step
from .tensor import (
    AutogradError,
    DimensionError,
    Tape,
    Tensor,
    backward,
    current_tape,
    no_grad,
    uniform_init,
)

__all__ = [
    "ops",
    "gradcheck",
    "numeric_grad",
    "AdamState",
    "adam_step",
    "AutogradError",
    "DimensionError",
    "Tape",
    "Tensor",
    "backward",
    "current_tape",
    "no_grad",
    "uniform_init",
]
