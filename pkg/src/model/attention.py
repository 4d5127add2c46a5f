"""
Channel and spatial attention maps
"""

import numpy as np

from autograd import Tensor, activation, concat_channels, reduce_pool

from .layers import Conv2d, Module

SPATIAL_KERNEL = 7


class ChannelAttention(Module):
    """
    sigmoid(mlp(avgpool(x)) + mlp(maxpool(x))) over the spatial axes.

    The mlp is a pair of shared 1x1 convolutions K -> hidden -> K with an inner
    ReLU. Output shape [1, 1, 1, K], values in (0, 1).
    """

    def __init__(self, channels: int, hidden: int, rng: np.random.Generator):
        self.squeeze = Conv2d(channels, hidden, 1, rng)
        self.expand = Conv2d(hidden, channels, 1, rng)

    def mlp(self, pooled: Tensor) -> Tensor:
        return self.expand(activation(self.squeeze(pooled), "relu"))

    def forward(self, x: Tensor) -> Tensor:
        avg = self.mlp(reduce_pool(x, "spatial", "avg"))
        peak = self.mlp(reduce_pool(x, "spatial", "max"))
        return activation(avg + peak, "sigmoid")


class SpatialAttention(Module):
    """sigmoid(conv7x7([avg_c(x); max_c(x)])), shape [1, H, W, 1]"""

    def __init__(self, rng: np.random.Generator):
        self.conv = Conv2d(2, 1, SPATIAL_KERNEL, rng)

    def forward(self, x: Tensor) -> Tensor:
        avg, peak = reduce_pool(x, "channel", "avg"), reduce_pool(x, "channel", "max")
        pooled = concat_channels(avg, peak)
        return activation(self.conv(pooled), "sigmoid")


def channel_attention(x: Tensor, params: ChannelAttention) -> Tensor:
    return params(x)


def spatial_attention(x: Tensor, params: SpatialAttention) -> Tensor:
    return params(x)
