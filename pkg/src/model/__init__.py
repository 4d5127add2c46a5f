"""
Siamese spatial-spectral attention network and its building blocks
"""

from .layers import Module, Conv2d, BatchNorm2d, ConvBn
from .attention import (
    ChannelAttention, SpatialAttention, channel_attention, spatial_attention,
)
from .blocks import (
    RSAB, RCAB, Fusion, Projector, Predictor,
    rsab_forward, rcab_forward, fusion_forward,
    projector_forward, predictor_forward,
)
from .hypernet import HyperNet, SiameseOutputs, hypernet_forward, to_input_tensor
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    'Module', 'Conv2d', 'BatchNorm2d', 'ConvBn',
    'ChannelAttention', 'SpatialAttention', 'channel_attention', 'spatial_attention',
    'RSAB', 'RCAB', 'Fusion', 'Projector', 'Predictor',
    'rsab_forward', 'rcab_forward', 'fusion_forward',
    'projector_forward', 'predictor_forward',
    'HyperNet', 'SiameseOutputs', 'hypernet_forward', 'to_input_tensor',
    'save_checkpoint', 'load_checkpoint',
]
