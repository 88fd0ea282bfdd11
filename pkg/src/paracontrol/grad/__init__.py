"""Minimal reverse-mode automatic differentiation."""
from paracontrol.grad import ops
from paracontrol.grad.check import grad_check, grad_check_params
from paracontrol.grad.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from paracontrol.grad.ops import primitive_forward
from paracontrol.grad.optim import SGD, Adam, AdamState, optimizer_step
from paracontrol.grad.tensor import (
    GradTape,
    NonFiniteError,
    ShapeError,
    Tensor,
    backward,
    grad_enabled,
    no_grad,
)

__all__ = [
    "Adam",
    "AdamState",
    "CheckpointError",
    "GradTape",
    "NonFiniteError",
    "SGD",
    "ShapeError",
    "Tensor",
    "backward",
    "grad_check",
    "grad_check_params",
    "grad_enabled",
    "load_checkpoint",
    "no_grad",
    "ops",
    "optimizer_step",
    "primitive_forward",
    "save_checkpoint",
]
