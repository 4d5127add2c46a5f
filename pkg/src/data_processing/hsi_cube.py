"""
Hyperspectral cube and label map containers
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Tuple

import numpy as np

from autograd import Tensor
from utils.exceptions import ContractViolationError, DataValidationError


class Label(IntEnum):
    """Per-pixel ground truth classes"""

    UNLABELED = -1
    UNCHANGED = 0
    CHANGED = 1


@dataclass
class HsiCube:
    """
    Row-major H x W x C float64 image with an optional band-wavelength list.

    `name` is the record name used by the HCUBE container.
    """

    data: np.ndarray
    name: str = "cube"
    wavelengths: Optional[np.ndarray] = field(default=None)

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3 or min(self.data.shape) < 1:
            raise DataValidationError(
                f"expected a non-empty H x W x C array, got shape {self.data.shape}",
                field="data",
            )
        if not np.isfinite(self.data).all():
            raise DataValidationError("cube values must be finite", field="data")
        if self.wavelengths is not None:
            wavelengths = np.asarray(self.wavelengths, dtype=np.float64)
            self.wavelengths = wavelengths.reshape(-1)
            if self.wavelengths.size != self.bands:
                raise DataValidationError(
                    f"{self.wavelengths.size} wavelengths for {self.bands} bands",
                    field="wavelengths",
                )

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def bands(self) -> int:
        return int(self.data.shape[2])

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.height, self.width, self.bands

    def with_data(self, data: np.ndarray) -> "HsiCube":
        """Same name and wavelengths, new values"""
        wavelengths = None if self.wavelengths is None else self.wavelengths.copy()
        return HsiCube(data, name=self.name, wavelengths=wavelengths)

    def to_tensor(self) -> Tensor:
        """Network input [1, H, W, C], no gradient"""
        return Tensor(self.data[None, ...].copy())

    def crop(self, rows: slice, cols: slice) -> "HsiCube":
        return self.with_data(self.data[rows, cols, :].copy())


def as_image_array(value: object) -> np.ndarray:
    """Accept an HsiCube, a [1, H, W, C] Tensor or an H x W x C array"""
    if isinstance(value, HsiCube):
        return value.data
    if isinstance(value, Tensor):
        data = value.data
        if data.ndim != 4 or data.shape[0] != 1:
            raise ContractViolationError(
                f"expected a [1, H, W, C] feature map, got {data.shape}",
                operation="as_image_array",
            )
        return data[0]
    data = np.asarray(value, dtype=np.float64)
    if data.ndim != 3:
        raise ContractViolationError(
            f"expected an H x W x C array, got {data.shape}", operation="as_image_array"
        )
    return data


def validate_label_map(
    labels: np.ndarray, shape: Optional[Tuple[int, int]] = None
) -> np.ndarray:
    """Return labels as an int8 H x W array of Label values"""
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ContractViolationError(
            f"label map must be 2-D, got shape {labels.shape}", operation="label_map"
        )
    if shape is not None and labels.shape != tuple(shape):
        raise ContractViolationError(
            f"label map shape {labels.shape} does not match {tuple(shape)}",
            operation="label_map",
        )
    allowed = np.isin(labels, [int(label) for label in Label])
    if not allowed.all():
        raise ContractViolationError(
            f"unknown label values {np.unique(labels[~allowed])[:5]}",
            operation="label_map",
        )
    return labels.astype(np.int8)
