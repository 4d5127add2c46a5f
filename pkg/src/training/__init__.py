"""
Self-supervised training: losses, pseudo masks and the training loop
"""

from .losses import focal_cosine, plain_cosine_loss, total_loss, PIXEL_LOSSES
from .pseudo_mask import PseudoMask, build_pseudo_mask
from .trainer import EpochRecord, LossReport, Trainer, train

__all__ = [
    'focal_cosine', 'plain_cosine_loss', 'total_loss', 'PIXEL_LOSSES',
    'PseudoMask', 'build_pseudo_mask',
    'EpochRecord', 'LossReport', 'Trainer', 'train',
]
