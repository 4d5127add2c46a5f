"""
Classical change detectors, thresholding and evaluation metrics
"""

from .anomaly_detectors import (
    background_statistics, rx_score, rx_scores, diff_rx, cva_magnitude,
    cosine_distance_map,
)
from .predetectors import DiffRxMethod, CvaMethod
from .thresholding import TwoMeansSplit, kmeans2_split, kmeans2_threshold
from .evaluation import (
    RocCurve, ConfusionCounts, ConfusionMetrics, FiveNumberSummary,
    SeparabilityStats, roc_auc, confusion_metrics, separability_stats,
    evaluate_scores, evaluate_binary, metrics_frame,
)

__all__ = [
    'background_statistics', 'rx_score', 'rx_scores', 'diff_rx', 'cva_magnitude',
    'cosine_distance_map',
    'DiffRxMethod', 'CvaMethod',
    'TwoMeansSplit', 'kmeans2_split', 'kmeans2_threshold',
    'RocCurve', 'ConfusionCounts', 'ConfusionMetrics', 'FiveNumberSummary',
    'SeparabilityStats',
    'roc_auc', 'confusion_metrics', 'separability_stats',
    'evaluate_scores', 'evaluate_binary', 'metrics_frame',
]
