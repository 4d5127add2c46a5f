"""
Residual attention blocks, fusion, projector and predictor
"""

import logging
from typing import Optional

import numpy as np

from autograd import Tensor, activation, concat_channels
from utils.exceptions import ContractViolationError

from .attention import ChannelAttention, SpatialAttention
from .layers import ConvBn, Conv2d, Module

logger = logging.getLogger(__name__)


def _check_width(x: Tensor, expected: int, block: str) -> None:
    if x.data.ndim != 4 or x.shape[3] != expected:
        raise ContractViolationError(
            f"{block} expects {expected} input channels, got shape {x.shape}",
            operation=block,
        )


class RSAB(Module):
    """
    Residual spatial attention block.

    x1 = BN(conv3x3(x)); F_ca = CA(x1) * x1; F_sa = SA(F_ca) * F_ca;
    out = ReLU(shortcut(x) + F_sa). The first block projects the shortcut with
    BN(conv1x1(x)); later blocks use the identity.
    """

    def __init__(
        self,
        c_in: int,
        n: int,
        block_index: int,
        ca_hidden: int,
        rng: np.random.Generator,
        use_attention: bool = True,
    ):
        self.c_in = c_in
        self.block_index = block_index
        self.body = ConvBn(c_in, n, 3, rng)
        self.channel_attention: Optional[ChannelAttention] = (
            ChannelAttention(n, ca_hidden, rng) if use_attention else None
        )
        self.spatial_attention: Optional[SpatialAttention] = (
            SpatialAttention(rng) if use_attention else None
        )
        self.downsample: Optional[ConvBn] = (
            ConvBn(c_in, n, 1, rng) if block_index == 1 else None
        )

    def forward(self, x: Tensor) -> Tensor:
        _check_width(x, self.c_in, f"rsab{self.block_index}")
        features = self.body(x)
        if self.channel_attention is not None and self.spatial_attention is not None:
            features = features * self.channel_attention(features)
            features = features * self.spatial_attention(features)
        shortcut = self.downsample(x) if self.downsample is not None else x
        return activation(shortcut + features, "relu")


class RCAB(Module):
    """
    Residual channel attention block.

    x2 = BN(conv1x1(x)); weighted = CA(x2) * x2. The first block returns
    `weighted`, later blocks return x + weighted.
    """

    def __init__(
        self,
        c_in: int,
        n: int,
        block_index: int,
        ca_hidden: int,
        rng: np.random.Generator,
        use_attention: bool = True,
    ):
        self.c_in = c_in
        self.block_index = block_index
        self.body = ConvBn(c_in, n, 1, rng)
        self.channel_attention: Optional[ChannelAttention] = (
            ChannelAttention(n, ca_hidden, rng) if use_attention else None
        )

    def forward(self, x: Tensor) -> Tensor:
        _check_width(x, self.c_in, f"rcab{self.block_index}")
        features = self.body(x)
        if self.channel_attention is not None:
            features = features * self.channel_attention(features)
        if self.block_index == 1:
            return features
        return x + features


class Fusion(Module):
    """[BN(conv1x1(spatial)); BN(conv3x3(spectral))] along channels"""

    def __init__(self, n: int, rng: np.random.Generator):
        self.n = n
        self.spatial = ConvBn(n, n, 1, rng)
        self.spectral = ConvBn(n, n, 3, rng)

    def forward(self, spatial: Tensor, spectral: Tensor) -> Tensor:
        _check_width(spatial, self.n, "fusion")
        _check_width(spectral, self.n, "fusion")
        return concat_channels(self.spatial(spatial), self.spectral(spectral))


class Projector(Module):
    """Three conv1x1+BN layers of width 2n, ReLU after the first two"""

    def __init__(self, width: int, rng: np.random.Generator):
        self.width = width
        self.layers = [ConvBn(width, width, 1, rng) for _ in range(3)]

    def forward(self, x: Tensor) -> Tensor:
        _check_width(x, self.width, "projector")
        for index, layer in enumerate(self.layers):
            x = layer(x)
            if index < len(self.layers) - 1:
                x = activation(x, "relu")
        return x


class Predictor(Module):
    """conv1x1(2n -> n) + BN + ReLU, then a bare conv1x1(n -> 2n)"""

    def __init__(self, width: int, rng: np.random.Generator):
        self.width = width
        self.squeeze = ConvBn(width, width // 2, 1, rng)
        self.expand = Conv2d(width // 2, width, 1, rng)

    def forward(self, z: Tensor) -> Tensor:
        _check_width(z, self.width, "predictor")
        return self.expand(activation(self.squeeze(z), "relu"))


def rsab_forward(x: Tensor, block_index: int, params: RSAB) -> Tensor:
    if params.block_index != block_index:
        raise ContractViolationError(
            f"parameters belong to block {params.block_index}, not {block_index}",
            operation="rsab_forward",
        )
    return params(x)


def rcab_forward(x: Tensor, block_index: int, params: RCAB) -> Tensor:
    if params.block_index != block_index:
        raise ContractViolationError(
            f"parameters belong to block {params.block_index}, not {block_index}",
            operation="rcab_forward",
        )
    return params(x)


def fusion_forward(spatial: Tensor, spectral: Tensor, params: Fusion) -> Tensor:
    return params(spatial, spectral)


def projector_forward(fused: Tensor, params: Projector) -> Tensor:
    return params(fused)


def predictor_forward(z: Tensor, params: Predictor) -> Tensor:
    return params(z)
