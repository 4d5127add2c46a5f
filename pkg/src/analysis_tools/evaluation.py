"""
Evaluation of score maps (ROC, AUC, separability) and binary maps
(OA, Kappa, F1, Precision, Recall) against labeled ground truth
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from sklearn.metrics import (
    auc,
    cohen_kappa_score,
    confusion_matrix,
    f1_score,
    precision_score,
    recall_score,
    roc_curve,
)

from data_processing.hsi_cube import Label, validate_label_map
from utils.exceptions import ContractViolationError

logger = logging.getLogger(__name__)

QUARTILES = (25.0, 50.0, 75.0)


def _labeled(values: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values)
    labels = validate_label_map(labels, shape=values.shape)
    keep = labels != Label.UNLABELED
    return values[keep], labels[keep] == Label.CHANGED


def _require_both_classes(truth: np.ndarray, operation: str) -> None:
    if truth.size == 0 or truth.all() or not truth.any():
        raise ContractViolationError(
            "ground truth needs at least one changed and one unchanged pixel",
            operation=operation,
        )


@dataclass
class RocCurve:
    """Exact ROC over every distinct labeled score; starts at (0, 0), ends at (1, 1)"""

    false_alarm_rate: np.ndarray
    detection_probability: np.ndarray
    thresholds: np.ndarray
    auc: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "false_alarm_rate": self.false_alarm_rate,
                "detection_probability": self.detection_probability,
            }
        )


def roc_auc(scores: np.ndarray, labels: np.ndarray) -> RocCurve:
    """
    ROC curve and trapezoidal AUC; unlabeled pixels are ignored.

    Raises:
        ContractViolationError: Single-class ground truth
    """
    values, truth = _labeled(np.asarray(scores, dtype=np.float64), labels)
    _require_both_classes(truth, "roc_auc")
    fpr, tpr, thresholds = roc_curve(truth, values, drop_intermediate=False)
    return RocCurve(fpr, tpr, thresholds, float(auc(fpr, tpr)))


@dataclass
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass
class ConfusionMetrics:
    counts: ConfusionCounts
    oa: float
    kappa: float
    f1: float
    precision: float
    recall: float
    warnings: List[str] = field(default_factory=list)

    def as_dict(self) -> Dict[str, float]:
        result = {
            "oa": self.oa,
            "kappa": self.kappa,
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
        }
        counts = asdict(self.counts)
        result.update({name: float(value) for name, value in counts.items()})
        for flag in ("precision", "recall", "f1", "kappa"):
            result[f"{flag}_undefined"] = float(f"{flag}_undefined" in self.warnings)
        return result


def confusion_metrics(pred: np.ndarray, labels: np.ndarray) -> ConfusionMetrics:
    """
    OA, Kappa, F1, Precision and Recall over labeled pixels.

    Zero denominators give 0 and add a `<metric>_undefined` warning flag.

    Raises:
        ContractViolationError: No labeled pixels
    """
    predicted, truth = _labeled(np.asarray(pred), labels)
    if truth.size == 0:
        raise ContractViolationError("no labeled pixels", operation="confusion_metrics")
    predicted = predicted == Label.CHANGED
    matrix = confusion_matrix(truth, predicted, labels=[False, True])
    tn, fp, fn, tp = (int(v) for v in matrix.ravel())
    counts = ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)
    total = counts.total

    warnings: List[str] = []
    if tp + fp == 0:
        warnings.append("precision_undefined")
    if tp + fn == 0:
        warnings.append("recall_undefined")
    if 2 * tp + fp + fn == 0:
        warnings.append("f1_undefined")

    chance = ((tp + fn) * (tp + fp) + (tn + fp) * (tn + fn)) / (total * total)
    if chance >= 1.0:
        warnings.append("kappa_undefined")
        kappa = 0.0
    else:
        kappa = float(cohen_kappa_score(truth, predicted))
    for warning in warnings:
        logger.warning(f"Zero denominator: {warning.replace('_', ' ')}, reported as 0")

    return ConfusionMetrics(
        counts=counts,
        oa=(tp + tn) / total,
        kappa=kappa,
        f1=float(f1_score(truth, predicted, zero_division=0)),
        precision=float(precision_score(truth, predicted, zero_division=0)),
        recall=float(recall_score(truth, predicted, zero_division=0)),
        warnings=warnings,
    )


@dataclass
class FiveNumberSummary:
    minimum: float
    q25: float
    median: float
    q75: float
    maximum: float

    @classmethod
    def of(cls, values: np.ndarray) -> "FiveNumberSummary":
        q25, median, q75 = np.percentile(values, QUARTILES)
        return cls(
            float(values.min()),
            float(q25),
            float(median),
            float(q75),
            float(values.max()),
        )


@dataclass
class SeparabilityStats:
    """Per-class summaries of jointly min-max normalized scores"""

    change: FiveNumberSummary
    background: FiveNumberSummary

    @property
    def gap(self) -> float:
        """Change lower quartile minus background upper quartile"""
        return self.change.q25 - self.background.q75

    def as_dict(self) -> Dict[str, float]:
        result: Dict[str, float] = {}
        for name, summary in (("change", self.change), ("background", self.background)):
            fields = asdict(summary)
            result.update({f"{name}_{key}": value for key, value in fields.items()})
        return result


def separability_stats(scores: np.ndarray, labels: np.ndarray) -> SeparabilityStats:
    values, truth = _labeled(np.asarray(scores, dtype=np.float64), labels)
    _require_both_classes(truth, "separability_stats")
    low, high = values.min(), values.max()
    normalized = (values - low) / (high - low) if high > low else np.zeros_like(values)
    return SeparabilityStats(
        FiveNumberSummary.of(normalized[truth]),
        FiveNumberSummary.of(normalized[~truth]),
    )


def evaluate_scores(
    scores: np.ndarray, labels: np.ndarray
) -> Tuple[Dict[str, float], RocCurve]:
    """Anomalous-change metrics: AUC plus separability statistics"""
    curve = roc_auc(scores, labels)
    metrics = {"auc": curve.auc}
    metrics.update(separability_stats(scores, labels).as_dict())
    logger.info(f"AUC = {curve.auc:.4f}")
    return metrics, curve


def evaluate_binary(binary_map: np.ndarray, labels: np.ndarray) -> Dict[str, float]:
    """Binary-change metrics with undefined-metric flags"""
    result = confusion_metrics(binary_map, labels)
    logger.info(
        f"OA = {result.oa:.4f}, Kappa = {result.kappa:.4f}, F1 = {result.f1:.4f}"
    )
    return result.as_dict()


def metrics_frame(metrics: Dict[str, float]) -> pd.DataFrame:
    """Two-column metric,value table"""
    return pd.DataFrame({"metric": list(metrics), "value": list(metrics.values())})
