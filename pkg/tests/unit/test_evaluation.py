"""
Unit tests for ROC/AUC, confusion metrics and separability statistics
"""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from analysis_tools.evaluation import (
    RocCurve,
    confusion_metrics,
    evaluate_binary,
    evaluate_scores,
    metrics_frame,
    roc_auc,
    separability_stats,
)
from data_processing.hsi_cube import Label
from utils.exceptions import ContractViolationError

C, U, X = Label.CHANGED, Label.UNCHANGED, Label.UNLABELED


def row(values, dtype=np.float64):
    return np.asarray(values, dtype=dtype).reshape(1, -1)


def pairwise_auc(scores: np.ndarray, changed: np.ndarray) -> float:
    """P(changed score > unchanged score) + 0.5 P(equal)"""
    pos, neg = scores[changed][:, None], scores[~changed][None, :]
    return float(((pos > neg) + 0.5 * (pos == neg)).mean())


def confusion_maps(tp: int, tn: int, fp: int, fn: int):
    truth = [C] * tp + [U] * tn + [U] * fp + [C] * fn
    pred = [C] * tp + [U] * tn + [C] * fp + [U] * fn
    return row(pred, np.int8), row(truth, np.int8)


class TestRocAuc:
    """Test the exact ROC curve"""

    def test_perfect_ranking(self):
        curve = roc_auc(row([0.9, 0.8, 0.3, 0.1]), row([C, C, U, U], np.int8))
        assert curve.auc == pytest.approx(1.0)

    def test_three_of_four_pairs(self):
        curve = roc_auc(row([0.9, 0.6, 0.4, 0.1]), row([C, U, C, U], np.int8))
        assert curve.auc == pytest.approx(0.75)

    def test_curve_shape(self, rng, label_factory):
        labels = label_factory.build(10, 10)
        curve = roc_auc(rng.uniform(size=(10, 10)), labels)
        assert isinstance(curve, RocCurve)
        assert (curve.false_alarm_rate[0], curve.detection_probability[0]) == (0.0, 0.0)
        last = (curve.false_alarm_rate[-1], curve.detection_probability[-1])
        assert last == (1.0, 1.0)
        assert (np.diff(curve.false_alarm_rate) >= 0).all()
        assert (np.diff(curve.detection_probability) >= 0).all()
        assert 0.0 <= curve.auc <= 1.0

    def test_reversed_scores(self, rng, label_factory):
        labels = label_factory.build(8, 8)
        scores = rng.uniform(size=(8, 8))
        flipped = roc_auc(-scores, labels).auc
        assert flipped == pytest.approx(1.0 - roc_auc(scores, labels).auc)

    def test_invariant_under_increasing_transform(self, rng, label_factory):
        labels = label_factory.build(8, 8)
        scores = rng.uniform(size=(8, 8))
        warped = roc_auc(np.exp(3.0 * scores) + 2.0, labels).auc
        assert warped == pytest.approx(roc_auc(scores, labels).auc)

    def test_unlabeled_pixels_ignored(self):
        labeled = roc_auc(row([0.9, 0.6, 0.4, 0.1]), row([C, U, C, U], np.int8)).auc
        with_unlabeled = roc_auc(
            row([0.9, 0.6, 0.4, 0.1, 5.0]), row([C, U, C, U, X], np.int8)
        ).auc
        assert with_unlabeled == labeled

    def test_frame_columns(self):
        frame = roc_auc(row([0.9, 0.1]), row([C, U], np.int8)).to_frame()
        assert list(frame.columns) == ["false_alarm_rate", "detection_probability"]

    @pytest.mark.parametrize("labels", [[C, C, C], [U, U, U], [C, X, X], [X, X, X]])
    def test_single_class(self, labels):
        with pytest.raises(ContractViolationError):
            roc_auc(row([0.1, 0.2, 0.3]), row(labels, np.int8))

    def test_label_shape_mismatch(self):
        with pytest.raises(ContractViolationError):
            roc_auc(np.zeros((2, 2)), row([C, U, C, U], np.int8))

    @settings(max_examples=100, deadline=None)
    @given(
        pairs=st.lists(
            st.tuples(st.integers(min_value=0, max_value=6), st.booleans()),
            min_size=2,
            max_size=200,
        )
    )
    def test_matches_pairwise_oracle(self, pairs):
        scores = np.array([float(score) for score, _ in pairs])
        changed = np.array([flag for _, flag in pairs])
        assume(changed.any() and not changed.all())
        labels = np.where(changed, C, U).astype(np.int8)
        expected = pairwise_auc(scores, changed)
        auc = roc_auc(row(scores), row(labels, np.int8)).auc
        assert auc == pytest.approx(expected, abs=1e-12)


class TestConfusionMetrics:
    """Test the binary-map metrics"""

    def test_perfect_prediction(self, label_factory):
        labels = label_factory.build(6, 6)
        result = confusion_metrics(labels.copy(), labels)
        assert (result.oa, result.kappa, result.f1) == (1.0, 1.0, 1.0)
        assert result.warnings == []

    def test_all_unchanged_on_balanced_truth(self):
        pred, truth = confusion_maps(tp=0, tn=50, fp=0, fn=50)
        result = confusion_metrics(pred, truth)
        assert result.oa == pytest.approx(0.5)
        assert result.kappa == pytest.approx(0.0)
        assert result.precision == 0.0
        assert "precision_undefined" in result.warnings

    def test_hand_computed_counts(self):
        result = confusion_metrics(*confusion_maps(tp=40, tn=40, fp=10, fn=10))
        counts = result.counts
        assert (counts.tp, counts.tn, counts.fp, counts.fn) == (40, 40, 10, 10)
        assert result.oa == pytest.approx(0.8)
        assert result.precision == pytest.approx(0.8)
        assert result.recall == pytest.approx(0.8)
        assert result.f1 == pytest.approx(0.8)
        assert result.kappa == pytest.approx(0.6)

    def test_unchanged_only_scene_flags_every_ratio(self):
        result = confusion_metrics(*confusion_maps(tp=0, tn=12, fp=0, fn=0))
        assert result.oa == 1.0
        assert result.kappa == 0.0
        assert set(result.warnings) == {
            "precision_undefined",
            "recall_undefined",
            "f1_undefined",
            "kappa_undefined",
        }

    def test_unlabeled_pixels_ignored(self):
        pred = row([C, U, C, C], np.int8)
        truth = row([C, U, X, X], np.int8)
        result = confusion_metrics(pred, truth)
        assert result.counts.total == 2
        assert result.oa == 1.0

    def test_as_dict(self):
        metrics = confusion_metrics(*confusion_maps(tp=3, tn=2, fp=1, fn=0)).as_dict()
        keys = ("oa", "kappa", "f1", "precision", "recall")
        keys += ("tp", "tn", "fp", "fn", "kappa_undefined")
        for key in keys:
            assert key in metrics
        assert metrics["tp"] == 3.0
        assert metrics["recall_undefined"] == 0.0

    def test_no_labeled_pixels(self):
        with pytest.raises(ContractViolationError):
            confusion_metrics(row([C, U], np.int8), row([X, X], np.int8))


class TestSeparability:
    """Test the per-class five-number summaries"""

    def test_joint_normalization(self):
        scores = row([0.0, 1.0, 2.0, 3.0, 8.0, 9.0, 10.0])
        labels = row([U, U, U, U, C, C, C], np.int8)
        stats = separability_stats(scores, labels)
        assert stats.background.maximum == pytest.approx(0.3)
        assert stats.change.minimum == pytest.approx(0.8)
        assert stats.change.median == pytest.approx(0.9)
        assert stats.background.q25 == pytest.approx(0.075)

    def test_constant_class(self):
        stats = separability_stats(
            row([4.0, 4.0, 4.0, 1.0, 2.0]), row([C, C, C, U, U], np.int8)
        )
        change = stats.change
        quartiles = (change.q25, change.median, change.q75, change.maximum)
        assert change.minimum == 1.0
        assert all(value == 1.0 for value in quartiles)

    def test_separated_classes(self, rng):
        scores = np.concatenate([rng.uniform(0, 1, 20), rng.uniform(2, 3, 5)])
        labels = np.array([U] * 20 + [C] * 5, dtype=np.int8)
        stats = separability_stats(row(scores), row(labels, np.int8))
        assert stats.background.maximum < stats.change.minimum
        assert stats.gap > 0

    def test_as_dict_keys(self):
        keys = separability_stats(row([1.0, 0.0]), row([C, U], np.int8)).as_dict()
        assert set(keys) == {
            f"{name}_{stat}"
            for name in ("change", "background")
            for stat in ("minimum", "q25", "median", "q75", "maximum")
        }

    def test_single_class(self):
        with pytest.raises(ContractViolationError):
            separability_stats(row([1.0, 2.0]), row([U, U], np.int8))


class TestEvaluateHelpers:
    """Test the metric bundles written by the pipeline"""

    def test_evaluate_scores(self):
        metrics, curve = evaluate_scores(
            row([0.9, 0.6, 0.4, 0.1]), row([C, U, C, U], np.int8)
        )
        assert metrics["auc"] == curve.auc == pytest.approx(0.75)
        assert "change_median" in metrics and "background_q75" in metrics

    def test_evaluate_binary(self):
        metrics = evaluate_binary(*confusion_maps(tp=40, tn=40, fp=10, fn=10))
        assert metrics["kappa"] == pytest.approx(0.6)

    def test_metrics_frame(self):
        frame = metrics_frame({"auc": 0.9, "oa": 0.8})
        assert list(frame.columns) == ["metric", "value"]
        assert frame["metric"].tolist() == ["auc", "oa"]
