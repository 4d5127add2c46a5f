"""
Registered pre-detection methods
"""

import numpy as np

from interfaces.detection import ChangeDetectionMethod

from .anomaly_detectors import cva_magnitude, diff_rx


class DiffRxMethod(ChangeDetectionMethod):
    @property
    def name(self) -> str:
        return "diff_rx"

    @property
    def description(self) -> str:
        return "RX anomaly score of the difference image (anomalous change detection)"

    def score(self, x1: object, x2: object) -> np.ndarray:
        return diff_rx(x1, x2)


class CvaMethod(ChangeDetectionMethod):
    @property
    def name(self) -> str:
        return "cva"

    @property
    def description(self) -> str:
        return "Change vector magnitude (binary change detection)"

    def score(self, x1: object, x2: object) -> np.ndarray:
        return cva_magnitude(x1, x2)
