"""
Two-class 1-D K-means thresholding of score maps
"""

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans

from data_processing.hsi_cube import Label

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 100


@dataclass
class TwoMeansSplit:
    """Binary map plus the (unchanged, changed) centroids"""

    labels: np.ndarray
    centroids: np.ndarray

    @property
    def threshold(self) -> float:
        return float(self.centroids.mean())


def kmeans2_split(scores: np.ndarray) -> TwoMeansSplit:
    """
    Lloyd iterations from centroids at the minimum and maximum score.

    The cluster with the larger centroid is labeled changed. A constant map is
    entirely unchanged.
    """
    scores = np.asarray(scores, dtype=np.float64)
    low, high = float(scores.min()), float(scores.max())
    if low == high:
        logger.warning("Score map is constant; every pixel is labeled unchanged")
        unchanged = np.full(scores.shape, Label.UNCHANGED, dtype=np.int8)
        return TwoMeansSplit(unchanged, np.array([low, high]))

    model = KMeans(
        n_clusters=2,
        init=np.array([[low], [high]]),
        n_init=1,
        max_iter=MAX_ITERATIONS,
        tol=0.0,
        algorithm="lloyd",
    )
    assignment = model.fit_predict(scores.reshape(-1, 1))
    centroids = model.cluster_centers_.ravel()
    changed_cluster = int(np.argmax(centroids))
    changed = assignment == changed_cluster
    labels = np.where(changed, Label.CHANGED, Label.UNCHANGED).astype(np.int8)
    ordered = np.sort(centroids)
    logger.debug(
        f"2-means centroids {ordered[0]:.4g} / {ordered[1]:.4g} "
        f"after {model.n_iter_} iterations"
    )
    return TwoMeansSplit(labels.reshape(scores.shape), ordered)


def kmeans2_threshold(scores: np.ndarray) -> np.ndarray:
    """Binary change map (Label.CHANGED / Label.UNCHANGED) of a score map"""
    return kmeans2_split(scores).labels
