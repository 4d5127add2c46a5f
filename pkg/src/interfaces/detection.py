"""
Detection Interface Module
Defines the abstract base class for pre-detection methods
"""

from abc import ABC, abstractmethod

import numpy as np


class ChangeDetectionMethod(ABC):
    """Abstract base class for classical change-score methods"""

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the registry name of the method"""

    @property
    @abstractmethod
    def description(self) -> str:
        """Return a description of what the method measures"""

    @abstractmethod
    def score(self, x1: object, x2: object) -> np.ndarray:
        """
        Score every pixel of a co-registered pair

        Args:
            x1: First-date image (HsiCube, [1, H, W, C] Tensor or H x W x C array)
            x2: Second-date image of the same shape

        Returns:
            H x W change scores, higher = more likely changed
        """
