"""
Pixel-wise change and anomaly scores: RX, Diff-RX, CVA and cosine distance
"""

import logging
from typing import Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from data_processing.hsi_cube import as_image_array
from utils.exceptions import ContractViolationError, raise_if_shape_mismatch

logger = logging.getLogger(__name__)

RIDGE_EPS = 1e-6
RIDGE_DELTA = 1e-12
COSINE_EPS = 1e-12


def background_statistics(pixels: np.ndarray) -> Tuple[np.ndarray, tuple]:
    """
    Mean and Cholesky factor of the regularized 1/N covariance.

    Sigma + eps * (trace(Sigma) / C + delta) * I keeps the factorization defined
    for rank-deficient pixel sets.
    """
    pixels = np.asarray(pixels, dtype=np.float64)
    if pixels.ndim != 2 or pixels.shape[0] < 2:
        raise ContractViolationError(
            f"need at least 2 pixels as an N x C array, got {pixels.shape}",
            operation="rx_score",
        )
    mean = pixels.mean(axis=0)
    centered = pixels - mean
    covariance = centered.T @ centered / pixels.shape[0]
    channels = covariance.shape[0]
    ridge = RIDGE_EPS * (np.trace(covariance) / channels + RIDGE_DELTA)
    try:
        factor = cho_factor(covariance + ridge * np.eye(channels), lower=True)
    except LinAlgError:
        raise ContractViolationError(
            "covariance is not positive definite after regularization",
            operation="rx_score",
        )
    return mean, factor


def rx_scores(pixels: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Mahalanobis distance of every query row to the pixel-set background"""
    mean, factor = background_statistics(pixels)
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if queries.shape[1] != mean.shape[0]:
        raise ContractViolationError(
            f"query has {queries.shape[1]} channels, pixels have {mean.shape[0]}",
            operation="rx_score",
        )
    centered = queries - mean
    solved = cho_solve(factor, centered.T)
    return np.maximum(np.einsum("nc,cn->n", centered, solved), 0.0)


def rx_score(pixels: np.ndarray, query: np.ndarray) -> float:
    """(x - mu)^T Sigma^-1 (x - mu) for a single C-vector"""
    query = np.asarray(query, dtype=np.float64).reshape(1, -1)
    return float(rx_scores(pixels, query)[0])


def _difference(x1: object, x2: object, operation: str) -> np.ndarray:
    a, b = as_image_array(x1), as_image_array(x2)
    raise_if_shape_mismatch(a.shape, b.shape, operation=operation)
    return b - a


def diff_rx(x1: object, x2: object) -> np.ndarray:
    """RX over the difference image x2 - x1, background from all of its pixels"""
    difference = _difference(x1, x2, "diff_rx")
    height, width, channels = difference.shape
    pixels = difference.reshape(-1, channels)
    scores = rx_scores(pixels, pixels).reshape(height, width)
    logger.debug(
        f"Diff-RX on {height}x{width}x{channels}: max score {scores.max():.3f}"
    )
    return scores


def cva_magnitude(x1: object, x2: object) -> np.ndarray:
    """Euclidean norm of the per-pixel spectral difference"""
    return np.linalg.norm(_difference(x1, x2, "cva_magnitude"), axis=2)


def cosine_distance_map(f1: object, f2: object) -> np.ndarray:
    """
    1 - cos(f1, f2) per pixel, in [0, 2], with norms clamped below at
    COSINE_EPS as in the training loss. A zero feature vector therefore scores
    1 against anything, itself included.

    Where both norms are live the value is taken as half the squared distance
    between the unit vectors, which is exactly 0 for identical features.
    """
    a, b = as_image_array(f1), as_image_array(f2)
    raise_if_shape_mismatch(a.shape, b.shape, operation="cosine_distance_map")
    norm_a = np.linalg.norm(a, axis=2, keepdims=True)
    norm_b = np.linalg.norm(b, axis=2, keepdims=True)
    den_a, den_b = np.maximum(norm_a, COSINE_EPS), np.maximum(norm_b, COSINE_EPS)
    clamped = 1.0 - np.sum(a * b, axis=2) / (den_a * den_b)[..., 0]
    unit = 0.5 * np.sum((a / den_a - b / den_b) ** 2, axis=2)
    live = ((norm_a > COSINE_EPS) & (norm_b > COSINE_EPS))[..., 0]
    return np.clip(np.where(live, unit, clamped), 0.0, 2.0)
