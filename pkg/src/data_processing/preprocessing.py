"""
Per-band normalization, Gaussian low-pass filtering, image shifts and tiling
"""

import logging
import math
from typing import List, Tuple

import numpy as np
from scipy.ndimage import correlate1d

from utils.exceptions import ContractViolationError

from .hsi_cube import HsiCube

logger = logging.getLogger(__name__)


def normalize_cube(cube: HsiCube) -> HsiCube:
    """Min-max scale every band to [0, 1]; constant bands become 0"""
    low = cube.data.min(axis=(0, 1))
    span = cube.data.max(axis=(0, 1)) - low
    constant = span == 0
    if constant.any():
        logger.warning(
            f"{int(constant.sum())} constant band(s) in '{cube.name}' mapped to 0"
        )
    safe_span = np.where(constant, 1.0, span)
    scaled = np.where(constant, 0.0, (cube.data - low) / safe_span)
    return cube.with_data(scaled)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled Gaussian of radius ceil(3 sigma), normalized to sum 1"""
    if sigma <= 0:
        raise ContractViolationError(
            f"sigma must be > 0, got {sigma}", operation="gaussian_lowpass"
        )
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def gaussian_lowpass(image: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian smoothing of a 2-D field with reflected edges"""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ContractViolationError(
            f"expected a 2-D field, got shape {image.shape}",
            operation="gaussian_lowpass",
        )
    kernel = gaussian_kernel(sigma)
    smoothed = correlate1d(image, kernel, axis=0, mode="reflect")
    return correlate1d(smoothed, kernel, axis=1, mode="reflect")


def shift_image(cube: HsiCube, dx: int, dy: int) -> HsiCube:
    """
    Translate by dx columns and dy rows; output (i, j) = input (i - dy, j - dx).

    Uncovered pixels replicate the nearest edge.
    """
    if abs(dx) >= cube.width or abs(dy) >= cube.height:
        raise ContractViolationError(
            f"shift ({dx}, {dy}) out of range for {cube.height}x{cube.width}",
            operation="shift_image",
        )
    rows = np.clip(np.arange(cube.height) - dy, 0, cube.height - 1)
    cols = np.clip(np.arange(cube.width) - dx, 0, cube.width - 1)
    return cube.with_data(cube.data[np.ix_(rows, cols)])


def tile_slices(height: int, width: int, tile: int) -> List[Tuple[slice, slice]]:
    """Row-major grid of tile windows; edge tiles may be smaller"""
    if tile < 1:
        raise ContractViolationError(
            f"tile must be >= 1, got {tile}", operation="tile_slices"
        )
    return [
        (slice(top, min(top + tile, height)), slice(left, min(left + tile, width)))
        for top in range(0, height, tile)
        for left in range(0, width, tile)
    ]
