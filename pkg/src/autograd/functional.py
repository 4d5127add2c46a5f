"""
Differentiable layer primitives on [1, H, W, C] tensors.

Every primitive is a `Function` subclass with an explicit backward rule,
plus a thin public wrapper that validates its contract.
"""

import logging
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from utils.exceptions import ContractViolationError

from .tensor import Function, Tensor

logger = logging.getLogger(__name__)

KERNEL_SIZES = (1, 3, 7)
BN_EPS = 1e-5
BN_MOMENTUM = 0.1
COSINE_EPS = 1e-12


@dataclass
class ConvParams:
    """Kernel [kh, kw, c_in, c_out] and bias [c_out] of a stride-1 'same' convolution"""

    kernel: Tensor
    bias: Tensor

    def __post_init__(self) -> None:
        if self.kernel.data.ndim != 4:
            raise ContractViolationError(
                f"kernel must have 4 axes, got shape {self.kernel.shape}",
                operation="ConvParams",
            )
        kh, kw, _, c_out = self.kernel.shape
        if kh not in KERNEL_SIZES or kw not in KERNEL_SIZES:
            raise ContractViolationError(
                f"kernel size must be one of {KERNEL_SIZES}, got {kh}x{kw}",
                operation="ConvParams",
            )
        if self.bias.shape != (c_out,):
            raise ContractViolationError(
                f"bias shape {self.bias.shape} does not match c_out={c_out}",
                operation="ConvParams",
            )

    @property
    def c_in(self) -> int:
        return self.kernel.shape[2]

    @property
    def c_out(self) -> int:
        return self.kernel.shape[3]


@dataclass
class BnParams:
    """Affine parameters and running statistics of a batch-norm layer"""

    gamma: Tensor
    beta: Tensor
    running_mean: np.ndarray
    running_var: np.ndarray
    eps: float = BN_EPS
    momentum: float = BN_MOMENTUM
    training: bool = True

    @classmethod
    def create(cls, channels: int, name: str = "bn") -> "BnParams":
        return cls(
            gamma=Tensor(np.ones(channels), requires_grad=True, name=f"{name}.gamma"),
            beta=Tensor(np.zeros(channels), requires_grad=True, name=f"{name}.beta"),
            running_mean=np.zeros(channels),
            running_var=np.ones(channels),
        )

    @property
    def channels(self) -> int:
        return self.gamma.shape[0]


def unbroadcast(grad: np.ndarray, to_shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `to_shape`"""
    if grad.shape == to_shape:
        return grad
    while grad.ndim > len(to_shape):
        grad = grad.sum(axis=0)
    for dim, size in enumerate(to_shape):
        if size == 1 and grad.shape[dim] != 1:
            grad = grad.sum(axis=dim, keepdims=True)
    return grad


def _check_broadcast(a: np.ndarray, b: np.ndarray, operation: str) -> None:
    try:
        shape = np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        shape = None
    if shape != a.shape:
        raise ContractViolationError(
            f"shape {b.shape} does not broadcast against {a.shape}", operation=operation
        )


def _check_image(array: np.ndarray, operation: str) -> None:
    if array.ndim != 4:
        raise ContractViolationError(
            f"expected a [1, H, W, C] tensor, got shape {array.shape}",
            operation=operation,
        )


class Add(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_broadcast(a, b, "add")
        self.b_shape = b.shape
        return a + b

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return grad, unbroadcast(grad, self.b_shape)


class Mul(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_broadcast(a, b, "mul")
        self.a, self.b = a, b
        return a * b

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return grad * self.b, unbroadcast(grad * self.a, self.b.shape)


class Neg(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        return -a

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (-grad,)


class ReduceSum(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        self.shape = a.shape
        return np.asarray(a.sum())

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (np.broadcast_to(grad, self.shape).copy(),)


class Relu(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        self.active = a > 0
        return np.where(self.active, a, 0.0)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (grad * self.active,)


class Sigmoid(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        self.out = expit(a)
        return self.out

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (grad * self.out * (1.0 - self.out),)


class Conv2d(Function):
    """Stride-1 cross-correlation with zero 'same' padding, NHWC layout"""

    def forward(
        self, x: np.ndarray, kernel: np.ndarray, bias: np.ndarray
    ) -> np.ndarray:
        kh, kw = kernel.shape[0], kernel.shape[1]
        self.pad = (kh // 2, kw // 2)
        self.kernel = kernel
        self.x_padded = np.pad(x, ((0, 0), self.pad[:1] * 2, self.pad[1:] * 2, (0, 0)))
        windows = sliding_window_view(self.x_padded, (kh, kw), axis=(1, 2))
        # windows: [N, H, W, C_in, kh, kw]
        return np.tensordot(windows, kernel, axes=([3, 4, 5], [2, 0, 1])) + bias

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        kh, kw = self.kernel.shape[0], self.kernel.shape[1]
        windows = sliding_window_view(self.x_padded, (kh, kw), axis=(1, 2))
        grad_kernel = np.tensordot(windows, grad, axes=([0, 1, 2], [0, 1, 2]))
        grad_kernel = grad_kernel.transpose(1, 2, 0, 3)
        grad_bias = grad.sum(axis=(0, 1, 2))

        grad_padded = np.pad(grad, ((0, 0), self.pad[:1] * 2, self.pad[1:] * 2, (0, 0)))
        grad_windows = sliding_window_view(grad_padded, (kh, kw), axis=(1, 2))
        flipped = self.kernel[::-1, ::-1]
        grad_x = np.tensordot(grad_windows, flipped, axes=([3, 4, 5], [3, 0, 1]))
        return grad_x, grad_kernel, grad_bias


class BatchNorm(Function):
    """Per-channel normalization over the batch and spatial axes"""

    AXES = (0, 1, 2)

    def forward(
        self,
        x: np.ndarray,
        gamma: np.ndarray,
        beta: np.ndarray,
        *,
        params: BnParams,
    ) -> np.ndarray:
        self.training = params.training
        if params.training:
            mean = x.mean(axis=self.AXES)
            var = x.var(axis=self.AXES)
            params.running_mean *= 1.0 - params.momentum
            params.running_mean += params.momentum * mean
            params.running_var *= 1.0 - params.momentum
            params.running_var += params.momentum * var
        else:
            mean = params.running_mean
            var = params.running_var
        self.count = x.shape[0] * x.shape[1] * x.shape[2]
        self.inv_std = 1.0 / np.sqrt(var + params.eps)
        self.x_hat = (x - mean) * self.inv_std
        self.gamma = gamma
        return gamma * self.x_hat + beta

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        grad_gamma = (grad * self.x_hat).sum(axis=self.AXES)
        grad_beta = grad.sum(axis=self.AXES)
        grad_x_hat = grad * self.gamma
        if self.training:
            grad_x = (self.inv_std / self.count) * (
                self.count * grad_x_hat
                - grad_x_hat.sum(axis=self.AXES)
                - self.x_hat * (grad_x_hat * self.x_hat).sum(axis=self.AXES)
            )
        else:
            grad_x = grad_x_hat * self.inv_std
        return grad_x, grad_gamma, grad_beta


class SpatialPool(Function):
    """Global pooling over H x W, [N, H, W, C] -> [N, 1, 1, C]"""

    def forward(self, x: np.ndarray, *, kind: str) -> np.ndarray:
        self.kind = kind
        self.shape = x.shape
        n, h, w, c = x.shape
        if kind == "avg":
            return x.mean(axis=(1, 2), keepdims=True)
        flat = x.reshape(n, h * w, c)
        self.index = np.argmax(flat, axis=1)[:, None, :]
        return np.take_along_axis(flat, self.index, axis=1).reshape(n, 1, 1, c)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        n, h, w, c = self.shape
        if self.kind == "avg":
            return (np.broadcast_to(grad / (h * w), self.shape).copy(),)
        grad_flat = np.zeros((n, h * w, c))
        np.put_along_axis(grad_flat, self.index, grad.reshape(n, 1, c), axis=1)
        return (grad_flat.reshape(self.shape),)


class ChannelPool(Function):
    """Pooling across channels, [N, H, W, C] -> [N, H, W, 1]"""

    def forward(self, x: np.ndarray, *, kind: str) -> np.ndarray:
        self.kind = kind
        self.shape = x.shape
        if kind == "avg":
            return x.mean(axis=3, keepdims=True)
        self.index = np.argmax(x, axis=3)[..., None]
        return np.take_along_axis(x, self.index, axis=3)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        if self.kind == "avg":
            return (np.broadcast_to(grad / self.shape[3], self.shape).copy(),)
        grad_x = np.zeros(self.shape)
        np.put_along_axis(grad_x, self.index, grad, axis=3)
        return (grad_x,)


class Concat(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.split = a.shape[3]
        return np.concatenate([a, b], axis=3)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return grad[..., : self.split], grad[..., self.split :]


class CosineChannelwise(Function):
    """Per-pixel cosine over the channel axis, [N, H, W, K] -> [N, H, W, 1]"""

    def forward(self, a: np.ndarray, b: np.ndarray, *, eps: float) -> np.ndarray:
        self.a, self.b, self.eps = a, b, eps
        self.norm_a = np.sqrt((a * a).sum(axis=3, keepdims=True))
        self.norm_b = np.sqrt((b * b).sum(axis=3, keepdims=True))
        self.den_a = np.maximum(self.norm_a, eps)
        self.den_b = np.maximum(self.norm_b, eps)
        self.cos = (a * b).sum(axis=3, keepdims=True) / (self.den_a * self.den_b)
        return self.cos

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        scale = 1.0 / (self.den_a * self.den_b)
        # norms clamped at eps are constants
        shrink_a = np.where(self.norm_a > self.eps, self.cos / self.den_a**2, 0.0)
        shrink_b = np.where(self.norm_b > self.eps, self.cos / self.den_b**2, 0.0)
        grad_a = grad * (self.b * scale - shrink_a * self.a)
        grad_b = grad * (self.a * scale - shrink_b * self.b)
        return grad_a, grad_b


class MaskedMean(Function):
    def forward(self, values: np.ndarray, *, mask: np.ndarray) -> np.ndarray:
        self.shape = values.shape
        self.mask = mask
        self.count = int(mask.sum())
        return np.asarray(values[0, :, :, 0][mask].sum() / self.count)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        grad_values = np.zeros(self.shape)
        grad_values[0, :, :, 0][self.mask] = grad / self.count
        return (grad_values,)


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def add(a: Tensor, b: Tensor) -> Tensor:
    return Add.apply(a, b)


def mul(a: Tensor, b: Tensor) -> Tensor:
    return Mul.apply(a, b)


def neg(a: Tensor) -> Tensor:
    return Neg.apply(a)


def reduce_sum(a: Tensor) -> Tensor:
    return ReduceSum.apply(a)


def elementwise(a: Tensor, b: Tensor, kind: str) -> Tensor:
    """
    Broadcasting add or multiply; `b` may carry singleton axes against `a`.

    Raises:
        ContractViolationError: Unknown kind or non-broadcastable shapes
    """
    if kind == "add":
        return add(a, b)
    if kind == "mul":
        return mul(a, b)
    raise ContractViolationError(
        f"unknown elementwise kind {kind!r}", operation="elementwise"
    )


def activation(x: Tensor, kind: str) -> Tensor:
    if kind == "relu":
        return Relu.apply(x)
    if kind == "sigmoid":
        return Sigmoid.apply(x)
    raise ContractViolationError(f"unknown activation {kind!r}", operation="activation")


def relu(x: Tensor) -> Tensor:
    return Relu.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def conv2d(x: Tensor, params: ConvParams) -> Tensor:
    """
    Stride-1 convolution with zero 'same' padding.

    Args:
        x: Input [1, H, W, C_in]
        params: Kernel and bias

    Returns:
        Output [1, H, W, C_out]
    """
    _check_image(x.data, "conv2d")
    if x.shape[3] != params.c_in:
        raise ContractViolationError(
            f"input has {x.shape[3]} channels, kernel expects {params.c_in}",
            operation="conv2d",
        )
    return Conv2d.apply(x, params.kernel, params.bias)


def batch_norm2d(x: Tensor, params: BnParams) -> Tensor:
    """Batch statistics in training mode (updating running stats), running otherwise"""
    _check_image(x.data, "batch_norm2d")
    if x.shape[3] != params.channels:
        raise ContractViolationError(
            f"input has {x.shape[3]} channels, layer has {params.channels}",
            operation="batch_norm2d",
        )
    return BatchNorm.apply(x, params.gamma, params.beta, params=params)


def reduce_pool(x: Tensor, axis: str, kind: str) -> Tensor:
    """
    Global pooling.

    Args:
        x: Input [1, H, W, C]
        axis: "spatial" -> [1, 1, 1, C]; "channel" -> [1, H, W, 1]
        kind: "avg" or "max" (max routes gradient to the first argmax)
    """
    _check_image(x.data, "reduce_pool")
    if kind not in ("avg", "max"):
        raise ContractViolationError(
            f"unknown pooling kind {kind!r}", operation="reduce_pool"
        )
    if axis == "spatial":
        return SpatialPool.apply(x, kind=kind)
    if axis == "channel":
        return ChannelPool.apply(x, kind=kind)
    raise ContractViolationError(
        f"unknown pooling axis {axis!r}", operation="reduce_pool"
    )


def concat_channels(a: Tensor, b: Tensor) -> Tensor:
    """Channels of `a` followed by channels of `b`"""
    _check_image(a.data, "concat_channels")
    _check_image(b.data, "concat_channels")
    if a.shape[:3] != b.shape[:3]:
        raise ContractViolationError(
            f"spatial shapes differ: {a.shape[:3]} vs {b.shape[:3]}",
            operation="concat_channels",
        )
    return Concat.apply(a, b)


def cosine_channelwise(a: Tensor, b: Tensor, eps: float = COSINE_EPS) -> Tensor:
    """Per-pixel cosine over channels; norms are clamped below at `eps`"""
    if a.shape != b.shape:
        raise ContractViolationError(
            f"shapes differ: {a.shape} vs {b.shape}", operation="cosine_channelwise"
        )
    _check_image(a.data, "cosine_channelwise")
    return CosineChannelwise.apply(a, b, eps=eps)


def stop_gradient(x: Tensor) -> Tensor:
    """Identity in the forward pass, a constant for backward"""
    return Tensor(x.data.copy(), requires_grad=False, name=x.name)


def masked_mean(values: Tensor, mask: Any) -> Tensor:
    """
    Mean of a [1, H, W, 1] map over the selected pixels.

    Args:
        values: Per-pixel values
        mask: PseudoMask or boolean [H, W] array

    Raises:
        ContractViolationError: Empty mask or shape mismatch
    """
    selected = np.asarray(getattr(mask, "selected", mask), dtype=bool)
    if values.data.ndim != 4 or values.shape[0] != 1 or values.shape[3] != 1:
        raise ContractViolationError(
            f"expected [1, H, W, 1] values, got {values.shape}", operation="masked_mean"
        )
    if selected.shape != values.shape[1:3]:
        raise ContractViolationError(
            f"mask shape {selected.shape} does not match {values.shape[1:3]}",
            operation="masked_mean",
        )
    if not selected.any():
        raise ContractViolationError("mask selects no pixels", operation="masked_mean")
    return MaskedMean.apply(values, mask=selected)
