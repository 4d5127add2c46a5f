"""He-normal initialization"""

import math
from typing import Optional, Sequence

import numpy as np

from utils.exceptions import ContractViolationError

from .tensor import Tensor


def he_normal_init(
    shape: Sequence[int],
    fan_in: int,
    rng: Optional[np.random.Generator] = None,
    name: Optional[str] = None,
) -> Tensor:
    """
    Draw a trainable tensor from N(0, 2 / fan_in).

    Args:
        shape: Tensor shape, [kh, kw, c_in, c_out] for kernels
        fan_in: kh * kw * c_in for kernels
        rng: Generator to draw from (fresh default generator when omitted)
        name: Optional tensor name
    """
    if fan_in < 1:
        raise ContractViolationError(
            f"fan_in must be positive, got {fan_in}", operation="he_normal_init"
        )
    rng = rng if rng is not None else np.random.default_rng()
    std = math.sqrt(2.0 / fan_in)
    values = rng.normal(0.0, std, size=tuple(shape))
    return Tensor(values, requires_grad=True, name=name)
