"""
Dense float64 tensors with reverse-mode automatic differentiation
"""

from .tensor import Tensor, Function, Graph, as_tensor, backward
from .functional import (
    ConvParams, BnParams,
    add, mul, neg, reduce_sum, elementwise, activation, relu, sigmoid,
    conv2d, batch_norm2d, reduce_pool, concat_channels,
    cosine_channelwise, stop_gradient, masked_mean,
)
from .optim import SgdState, SgdMomentum, sgd_momentum_step, zero_grad, cosine_lr
from .init import he_normal_init

__all__ = [
    'Tensor', 'Function', 'Graph', 'as_tensor', 'backward',
    'ConvParams', 'BnParams',
    'add', 'mul', 'neg', 'reduce_sum', 'elementwise', 'activation', 'relu', 'sigmoid',
    'conv2d', 'batch_norm2d', 'reduce_pool', 'concat_channels',
    'cosine_channelwise', 'stop_gradient', 'masked_mean',
    'SgdState', 'SgdMomentum', 'sgd_momentum_step', 'zero_grad', 'cosine_lr',
    'he_normal_init',
]
