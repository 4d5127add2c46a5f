"""
Per-pixel cosine losses and the masked symmetric stop-gradient objective
"""

from typing import Callable, Dict

from autograd import Tensor, cosine_channelwise, masked_mean, stop_gradient
from utils.exceptions import ContractViolationError


def focal_cosine(z: Tensor, p: Tensor) -> Tensor:
    """-(2 - c) * c per pixel, c = cos(z, p); ranges from -1 (c = 1) to 3 (c = -1)"""
    c = cosine_channelwise(z, p)
    return -((2.0 - c) * c)


def plain_cosine_loss(z: Tensor, p: Tensor) -> Tensor:
    """-c per pixel"""
    return -cosine_channelwise(z, p)


PIXEL_LOSSES: Dict[str, Callable[[Tensor, Tensor], Tensor]] = {
    "focal": focal_cosine,
    "plain": plain_cosine_loss,
}


def total_loss(
    z1: Tensor, z2: Tensor, p1: Tensor, p2: Tensor, g: object, kind: str = "focal"
) -> Tensor:
    """
    0.5 * masked_mean(L(sg(z1), p2) + L(sg(z2), p1), g).

    Gradients reach the network only through the predictions p1 and p2.

    Args:
        z1, z2: Projections of both dates
        p1, p2: Predictions of both dates
        g: PseudoMask (or boolean H x W array) of probably-unchanged pixels
        kind: "focal" or "plain"
    """
    if kind not in PIXEL_LOSSES:
        raise ContractViolationError(f"unknown loss {kind!r}", operation="total_loss")
    shapes = {z1.shape, z2.shape, p1.shape, p2.shape}
    if len(shapes) != 1:
        raise ContractViolationError(
            f"feature maps differ in shape: {sorted(shapes)}", operation="total_loss"
        )
    pixel_loss = PIXEL_LOSSES[kind]
    per_pixel = pixel_loss(stop_gradient(z1), p2) + pixel_loss(stop_gradient(z2), p1)
    return masked_mean(per_pixel, g) * 0.5
