"""
Module base class and the parameterized layers (convolution, batch norm)
"""

import logging
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from autograd import (
    BnParams,
    ConvParams,
    Tensor,
    batch_norm2d,
    conv2d,
    he_normal_init,
)
from utils.exceptions import CheckpointError

logger = logging.getLogger(__name__)


class Module:
    """
    Base class for network components.

    Parameters are discovered by walking instance attributes in definition
    order: sub-modules, lists of sub-modules, ConvParams and BnParams. Names are
    dotted attribute paths, e.g. ``spatial.0.conv.kernel``.
    """

    training: bool = True

    def forward(self, *args: Any) -> Any:
        raise NotImplementedError

    def __call__(self, *args: Any) -> Any:
        return self.forward(*args)

    def _children(self) -> Iterator[Tuple[str, Any]]:
        for attr, value in vars(self).items():
            if isinstance(value, list):
                for index, item in enumerate(value):
                    if isinstance(item, Module):
                        yield f"{attr}.{index}", item
            elif isinstance(value, (Module, ConvParams, BnParams)):
                yield attr, value

    def _walk(self, prefix: str = "") -> Iterator[Tuple[str, Any]]:
        for name, child in self._children():
            if isinstance(child, Module):
                yield from child._walk(f"{prefix}{name}.")
            else:
                # parameter containers contribute their fields directly
                yield prefix, child

    def named_parameters(self) -> List[Tuple[str, Tensor]]:
        result: List[Tuple[str, Tensor]] = []
        for prefix, holder in self._walk():
            if isinstance(holder, ConvParams):
                result.append((f"{prefix}kernel", holder.kernel))
                result.append((f"{prefix}bias", holder.bias))
            else:
                result.append((f"{prefix}gamma", holder.gamma))
                result.append((f"{prefix}beta", holder.beta))
        return result

    def parameters(self) -> List[Tensor]:
        return [tensor for _, tensor in self.named_parameters()]

    def named_buffers(self) -> List[Tuple[str, np.ndarray]]:
        result: List[Tuple[str, np.ndarray]] = []
        for prefix, holder in self._walk():
            if isinstance(holder, BnParams):
                result.append((f"{prefix}running_mean", holder.running_mean))
                result.append((f"{prefix}running_var", holder.running_var))
        return result

    def state_dict(self) -> Dict[str, np.ndarray]:
        """Copies of every parameter and running statistic, in definition order"""
        state = {name: tensor.data.copy() for name, tensor in self.named_parameters()}
        state.update({name: buffer.copy() for name, buffer in self.named_buffers()})
        return state

    def load_state_dict(
        self, state: Dict[str, np.ndarray], source: Optional[str] = None
    ) -> None:
        """
        Copy values into the existing arrays.

        Raises:
            CheckpointError: Missing, unexpected or wrongly shaped entries
        """
        targets: Dict[str, np.ndarray] = {
            name: tensor.data for name, tensor in self.named_parameters()
        }
        targets.update(dict(self.named_buffers()))

        missing = [name for name in targets if name not in state]
        unexpected = [name for name in state if name not in targets]
        if missing or unexpected:
            raise CheckpointError(
                f"checkpoint does not match the model (missing: {missing[:5]}, "
                f"unexpected: {unexpected[:5]})",
                filename=source,
            )
        for name, target in targets.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.size != target.size:
                raise CheckpointError(
                    f"record {name!r} holds {value.size} values, "
                    f"model expects shape {target.shape}",
                    filename=source,
                )
            target[...] = value.reshape(target.shape)

    def train(self) -> "Module":
        return self._set_mode(True)

    def eval(self) -> "Module":
        return self._set_mode(False)

    def _set_mode(self, training: bool) -> "Module":
        self.training = training
        for _, child in self._children():
            if isinstance(child, Module):
                child._set_mode(training)
            elif isinstance(child, BnParams):
                child.training = training
        return self

    def parameter_count(self) -> int:
        return sum(tensor.size for tensor in self.parameters())


class Conv2d(Module):
    """Stride-1 'same' convolution with He-normal kernel and zero bias"""

    def __init__(
        self, c_in: int, c_out: int, kernel_size: int, rng: np.random.Generator
    ):
        fan_in = kernel_size * kernel_size * c_in
        self.params = ConvParams(
            kernel=he_normal_init(
                (kernel_size, kernel_size, c_in, c_out), fan_in, rng=rng
            ),
            bias=Tensor(np.zeros(c_out), requires_grad=True),
        )

    def forward(self, x: Tensor) -> Tensor:
        return conv2d(x, self.params)


class BatchNorm2d(Module):
    def __init__(self, channels: int):
        self.params = BnParams.create(channels)

    def forward(self, x: Tensor) -> Tensor:
        return batch_norm2d(x, self.params)


class ConvBn(Module):
    """Convolution followed by batch normalization"""

    def __init__(
        self, c_in: int, c_out: int, kernel_size: int, rng: np.random.Generator
    ):
        self.conv = Conv2d(c_in, c_out, kernel_size, rng)
        self.bn = BatchNorm2d(c_out)

    def forward(self, x: Tensor) -> Tensor:
        return self.bn(self.conv(x))
