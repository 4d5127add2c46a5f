"""
SGD with classical momentum, L2 folded into the gradient, and the cosine schedule
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from utils.exceptions import ContractViolationError

from .tensor import Tensor

logger = logging.getLogger(__name__)


@dataclass
class SgdState:
    """Velocity buffers (one per parameter, same shape) and step hyperparameters"""

    velocities: List[np.ndarray]
    momentum: float = 0.9
    weight_decay: float = 1e-4
    lr: float = 0.05

    @classmethod
    def for_params(
        cls,
        params: Sequence[Tensor],
        momentum: float = 0.9,
        weight_decay: float = 1e-4,
        lr: float = 0.05,
    ) -> "SgdState":
        return cls([np.zeros_like(p.data) for p in params], momentum, weight_decay, lr)


def sgd_momentum_step(
    params: Sequence[Tensor], grads: Sequence[Optional[np.ndarray]], state: SgdState
) -> None:
    """
    One in-place update: v <- mu*v + (g + lambda*w); w <- w - lr*v.

    Parameters whose gradient is None were not reached by backward and are left
    untouched, velocity included.

    Raises:
        ContractViolationError: Parameter, gradient and velocity shapes disagree
    """
    if not (len(params) == len(grads) == len(state.velocities)):
        raise ContractViolationError(
            f"{len(params)} params, {len(grads)} grads, "
            f"{len(state.velocities)} velocities",
            operation="sgd_momentum_step",
        )
    for param, grad, velocity in zip(params, grads, state.velocities):
        if grad is None:
            continue
        if grad.shape != param.shape or velocity.shape != param.shape:
            raise ContractViolationError(
                f"shape mismatch for {param.name or 'parameter'}: {param.shape}, "
                f"grad {grad.shape}, "
                f"velocity {velocity.shape}",
                operation="sgd_momentum_step",
            )
        velocity *= state.momentum
        velocity += grad + state.weight_decay * param.data
        param.data -= state.lr * velocity


def zero_grad(params: Sequence[Tensor]) -> None:
    for param in params:
        param.zero_grad()


class SgdMomentum:
    """Optimizer object bundling a parameter list with its SgdState"""

    def __init__(
        self,
        params: Sequence[Tensor],
        lr: float = 0.05,
        momentum: float = 0.9,
        weight_decay: float = 1e-4,
    ):
        self.params = list(params)
        self.state = SgdState.for_params(
            self.params, momentum=momentum, weight_decay=weight_decay, lr=lr
        )

    @property
    def lr(self) -> float:
        return self.state.lr

    @lr.setter
    def lr(self, value: float) -> None:
        self.state.lr = value

    def step(self) -> None:
        sgd_momentum_step(self.params, [p.grad for p in self.params], self.state)

    def zero_grad(self) -> None:
        zero_grad(self.params)


def cosine_lr(epoch: int, total_epochs: int, base_lr: float) -> float:
    """0.5 * base_lr * (1 + cos(pi * epoch / total_epochs))"""
    if total_epochs < 1 or not 0 <= epoch <= total_epochs:
        raise ContractViolationError(
            f"epoch {epoch} outside [0, {total_epochs}]", operation="cosine_lr"
        )
    return 0.5 * base_lr * (1.0 + math.cos(math.pi * epoch / total_epochs))
