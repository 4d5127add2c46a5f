"""
Siamese change-detection network: spatial branch (RSABs), spectral branch
(RCABs), fusion, projector and predictor, shared by both acquisition dates
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from autograd import Tensor
from config.pipeline_config import ModelConfig
from data_processing.hsi_cube import HsiCube
from utils.exceptions import ContractViolationError

from .blocks import RCAB, RSAB, Fusion, Predictor, Projector
from .layers import Module

logger = logging.getLogger(__name__)

ImageInput = Union[HsiCube, Tensor, np.ndarray]


@dataclass
class SiameseOutputs:
    """Fused features F, projections Z and predictions P of both dates"""

    f1: Tensor
    f2: Tensor
    z1: Tensor
    z2: Tensor
    p1: Tensor
    p2: Tensor

    def __iter__(self) -> Iterator[Tensor]:
        return iter((self.f1, self.f2, self.z1, self.z2, self.p1, self.p2))


def to_input_tensor(image: ImageInput) -> Tensor:
    """[1, H, W, C] constant tensor from a cube, tensor or H x W x C array"""
    if isinstance(image, HsiCube):
        return image.to_tensor()
    if isinstance(image, Tensor):
        return image
    data = np.asarray(image, dtype=np.float64)
    return Tensor(data[None, ...] if data.ndim == 3 else data)


class HyperNet(Module):
    """
    Both dates run through the same parameter set.

    Args:
        config: Widths, block counts and the attention switch
        input_channels: Spectral bands C (overrides config.input_channels)
        seed: Seed of the He-normal initialization
    """

    def __init__(
        self, config: ModelConfig, input_channels: Optional[int] = None, seed: int = 0
    ):
        channels = input_channels or config.input_channels
        if not channels:
            raise ContractViolationError(
                "input channel count is required", operation="HyperNet"
            )
        self.config = config
        self.input_channels = int(channels)
        rng = np.random.default_rng(seed)
        n, hidden, attention = config.n, config.ca_hidden, config.use_attention

        def c_in(index: int) -> int:
            return self.input_channels if index == 1 else n

        self.spatial = [
            RSAB(c_in(i), n, i, hidden, rng, use_attention=attention)
            for i in range(1, config.rsab_count + 1)
        ]
        self.spectral = [
            RCAB(c_in(i), n, i, hidden, rng, use_attention=attention)
            for i in range(1, config.rcab_count + 1)
        ]
        self.fusion = Fusion(n, rng)
        self.projector = Projector(config.width, rng)
        self.predictor = Predictor(config.width, rng)
        logger.debug(
            f"Built HyperNet n={n}, C={self.input_channels}, "
            f"{self.parameter_count()} parameters"
        )

    def encode(self, x: Tensor) -> Tensor:
        """Fused spatial-spectral features [1, H, W, 2n]"""
        if x.data.ndim != 4 or x.shape[3] != self.input_channels:
            raise ContractViolationError(
                f"expected [1, H, W, {self.input_channels}] input, got {x.shape}",
                operation="hypernet_forward",
            )
        spatial = x
        for block in self.spatial:
            spatial = block(spatial)
        spectral = x
        for block in self.spectral:
            spectral = block(spectral)
        return self.fusion(spatial, spectral)

    def forward(self, x1: ImageInput, x2: ImageInput) -> SiameseOutputs:
        t1, t2 = to_input_tensor(x1), to_input_tensor(x2)
        if t1.shape != t2.shape:
            raise ContractViolationError(
                f"image shapes differ: {t1.shape} vs {t2.shape}",
                operation="hypernet_forward",
            )
        f1, f2 = self.encode(t1), self.encode(t2)
        z1, z2 = self.projector(f1), self.projector(f2)
        return SiameseOutputs(f1, f2, z1, z2, self.predictor(z1), self.predictor(z2))

    def extract_features(
        self, x1: ImageInput, x2: ImageInput
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Inference-mode fused features of both dates as [H, W, 2n] arrays"""
        was_training = self.training
        self.eval()
        try:
            t1, t2 = to_input_tensor(x1), to_input_tensor(x2)
            if t1.shape != t2.shape:
                raise ContractViolationError(
                    f"image shapes differ: {t1.shape} vs {t2.shape}",
                    operation="extract_features",
                )
            return self.encode(t1).data[0], self.encode(t2).data[0]
        finally:
            if was_training:
                self.train()


def hypernet_forward(
    x1: ImageInput, x2: ImageInput, params: HyperNet
) -> SiameseOutputs:
    return params(x1, x2)
