"""
Pipeline Service
Runs the command stages (synthesis, pre-detection, training, detection,
evaluation) against one output directory
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from analysis_service.service import get_detection_service
from analysis_tools.anomaly_detectors import cosine_distance_map, diff_rx
from analysis_tools.evaluation import evaluate_binary, evaluate_scores
from analysis_tools.thresholding import kmeans2_threshold
from config.pipeline_config import PipelineConfig
from config.settings import Settings, get_settings
from data_processing.hcube_io import read_hcube, write_hcube
from data_processing.hsi_cube import HsiCube, Label
from data_processing.mask_io import (
    read_mask,
    read_selection_pgm,
    write_mask,
    write_score_pgm,
    write_selection_pgm,
)
from data_processing.preprocessing import normalize_cube, tile_slices
from data_processing.synthetic import synth_bitemporal
from model.checkpoint import load_checkpoint, save_checkpoint
from model.hypernet import HyperNet
from training.pseudo_mask import PseudoMask, build_pseudo_mask
from training.trainer import Trainer
from utils.exceptions import (
    ContractViolationError,
    raise_if_invalid_file,
    raise_if_shape_mismatch,
)
from utils.memory_manager import MemoryManager
from visualization.export_manager import ExportManager

logger = logging.getLogger(__name__)

Window = Tuple[slice, slice]
BASELINE_METRICS = "metrics_baseline.csv"


class PipelineService:
    """
    Service for the command-line stages.

    With `config.tile` set, pre-detection, mask selection, training and feature
    extraction run per tile; score maps are stitched before thresholding and
    evaluation.
    """

    def __init__(self, config: PipelineConfig, settings: Optional[Settings] = None):
        self.config = config
        self.settings = settings or get_settings()
        self.exporter = ExportManager(config.out_dir)
        self.memory_manager = MemoryManager(max_memory_mb=self.settings.MAX_MEMORY_MB)

    # ------------------------------------------------------------------
    # paths and inputs
    # ------------------------------------------------------------------

    def _out(self, filename: str) -> Path:
        return self.config.out_dir / filename

    def _input(self, name: str, default_filename: str) -> Path:
        path = self.config.input_path(name, default_filename)
        raise_if_invalid_file(str(path))
        return path

    def checkpoint_path(self, tile_index: Optional[int] = None) -> Path:
        if tile_index is None:
            return self._out(self.settings.CHECKPOINT_FILENAME)
        stem = Path(self.settings.CHECKPOINT_FILENAME).stem
        return self._out(f"{stem}_tile{tile_index}.hcube")

    def loss_log_name(self, tile_index: Optional[int] = None) -> str:
        if tile_index is None:
            return self.settings.LOSS_LOG_FILENAME
        return f"{Path(self.settings.LOSS_LOG_FILENAME).stem}_tile{tile_index}.csv"

    def load_pair(self) -> Tuple[HsiCube, HsiCube]:
        """Read both dates and normalize every band to [0, 1]"""
        x1 = read_hcube(self._input("x1", self.settings.X1_FILENAME))
        x2 = read_hcube(self._input("x2", self.settings.X2_FILENAME))
        raise_if_shape_mismatch(
            x1.shape, x2.shape, operation="load_pair", what="image shapes"
        )
        return normalize_cube(x1), normalize_cube(x2)

    def load_truth(self, shape: Tuple[int, int]) -> np.ndarray:
        truth = read_mask(self._input("truth", self.settings.TRUTH_FILENAME))
        raise_if_shape_mismatch(
            truth.shape, shape, operation="evaluate", what="truth and map shapes"
        )
        return truth

    def windows(self, height: int, width: int) -> List[Optional[Window]]:
        """Tile windows, or a single None entry for whole-image processing"""
        if self.config.tile is None:
            return [None]
        return list(tile_slices(height, width, self.config.tile))

    @staticmethod
    def _crop_pair(
        x1: HsiCube, x2: HsiCube, window: Optional[Window]
    ) -> Tuple[HsiCube, HsiCube]:
        if window is None:
            return x1, x2
        return x1.crop(*window), x2.crop(*window)

    # ------------------------------------------------------------------
    # stages
    # ------------------------------------------------------------------

    def synth(self) -> Dict[str, Path]:
        """Write x1.hcube, x2.hcube and truth.pgm"""
        x1, x2, truth = synth_bitemporal(self.config.synth)
        return {
            "x1": write_hcube(x1, self._out(self.settings.X1_FILENAME)),
            "x2": write_hcube(x2, self._out(self.settings.X2_FILENAME)),
            "truth": write_mask(truth, self._out(self.settings.TRUTH_FILENAME)),
        }

    def predetect(self) -> Dict[str, Path]:
        """Score the raw pair with the task's classical detector, select the mask"""
        x1, x2 = self.load_pair()
        method = self.config.train.predetector or ""
        service = get_detection_service()
        scores = np.zeros((x1.height, x1.width))
        selected = np.zeros((x1.height, x1.width), dtype=bool)

        for window in self.windows(x1.height, x1.width):
            a, b = self._crop_pair(x1, x2, window)
            tile_scores = service.score_pair(a, b, method)["scores"]
            count = self.config.train.mask_size
            if window is not None and count > tile_scores.size:
                logger.warning(
                    f"mask_size {count} exceeds a {tile_scores.shape} tile, "
                    "selecting all its pixels"
                )
                count = tile_scores.size
            mask = build_pseudo_mask(tile_scores, count)
            region = window if window is not None else (slice(None), slice(None))
            scores[region] = tile_scores
            selected[region] = mask.selected

        score_cube = HsiCube(scores[..., None], name="predetect_scores")
        scores_path = self._out(self.settings.PREDETECT_SCORES_FILENAME)
        return {
            "scores": write_hcube(score_cube, scores_path),
            "mask": write_selection_pgm(
                selected, self._out(self.settings.MASK_FILENAME)
            ),
        }

    def train(self) -> Dict[str, Path]:
        """Train one model per tile (or one overall) on the stored pseudo mask"""
        x1, x2 = self.load_pair()
        selected = read_selection_pgm(self._out(self.settings.MASK_FILENAME))
        raise_if_shape_mismatch(
            selected.shape,
            (x1.height, x1.width),
            operation="train",
            what="mask and image shapes",
        )
        written: Dict[str, Path] = {}
        windows = self.windows(x1.height, x1.width)
        for index, window in enumerate(windows):
            tile_index = None if window is None else index
            a, b = self._crop_pair(x1, x2, window)
            mask = PseudoMask(selected if window is None else selected[window])
            model, report = Trainer(self.config.train, self.settings).train(a, b, mask)
            suffix = "" if tile_index is None else f"_tile{tile_index}"
            written[f"checkpoint{suffix}"] = save_checkpoint(
                model, self.checkpoint_path(tile_index)
            )
            written[f"loss{suffix}"] = self.exporter.export_loss_log(
                report, self.loss_log_name(tile_index)
            )
        return written

    def detect(self, checkpoint: Optional[Path] = None) -> Dict[str, Path]:
        """
        Feature-space detection: Diff-RX for anomalous change, cosine distance
        followed by 2-means for binary change
        """
        x1, x2 = self.load_pair()
        windows = self.windows(x1.height, x1.width)
        if checkpoint is not None and len(windows) > 1:
            raise ContractViolationError(
                "an explicit checkpoint cannot be combined with tiling",
                operation="detect",
            )
        scores = np.zeros((x1.height, x1.width))
        model_config, seed = self.config.train.model, self.config.train.seed

        for index, window in enumerate(windows):
            tile_index = None if window is None else index
            if checkpoint is not None:
                path = Path(checkpoint)
            else:
                path = self.checkpoint_path(tile_index)
            raise_if_invalid_file(str(path))
            model = HyperNet(model_config, input_channels=x1.bands, seed=seed)
            load_checkpoint(model, path)
            a, b = self._crop_pair(x1, x2, window)
            f1, f2 = model.extract_features(a, b)
            if self.config.task == "hacd":
                tile_scores = diff_rx(f1, f2)
            else:
                tile_scores = cosine_distance_map(f1, f2)
            region = window if window is not None else (slice(None), slice(None))
            scores[region] = tile_scores

        score_cube = HsiCube(scores[..., None], name="scores")
        written = {
            "scores": write_hcube(score_cube, self._out(self.settings.SCORES_FILENAME)),
            "preview": write_score_pgm(scores, self._out("scores_preview.pgm")),
        }
        if self.config.task == "hbcd":
            map_path = self._out(self.settings.MAP_FILENAME)
            written["map"] = write_mask(kmeans2_threshold(scores), map_path)
        return written

    def evaluate(self) -> Dict[str, Path]:
        """metrics.csv (and roc.csv for anomalous change) against the ground truth"""
        metrics_name = self.settings.METRICS_FILENAME
        if self.config.task == "hacd":
            scores = read_hcube(self._out(self.settings.SCORES_FILENAME)).data[..., 0]
            metrics, curve = evaluate_scores(scores, self.load_truth(scores.shape))
            return {
                "metrics": self.exporter.export_metrics(metrics, metrics_name),
                "roc": self.exporter.export_roc(curve, self.settings.ROC_FILENAME),
            }
        binary_map = read_mask(self._out(self.settings.MAP_FILENAME))
        if (binary_map == Label.UNLABELED).any():
            raise ContractViolationError(
                "binary change maps hold only changed and unchanged pixels",
                operation="evaluate",
            )
        metrics = evaluate_binary(binary_map, self.load_truth(binary_map.shape))
        return {"metrics": self.exporter.export_metrics(metrics, metrics_name)}

    def evaluate_baseline(self) -> Dict[str, Path]:
        """Evaluate the raw pre-detection map as a reference for feature space"""
        scores_path = self._out(self.settings.PREDETECT_SCORES_FILENAME)
        scores = read_hcube(scores_path).data[..., 0]
        truth = self.load_truth(scores.shape)
        if self.config.task == "hacd":
            metrics, curve = evaluate_scores(scores, truth)
            return {
                "metrics": self.exporter.export_metrics(metrics, BASELINE_METRICS),
                "roc": self.exporter.export_roc(curve, "roc_baseline.csv"),
            }
        metrics = evaluate_binary(kmeans2_threshold(scores), truth)
        return {"metrics": self.exporter.export_metrics(metrics, BASELINE_METRICS)}

    def run_pipeline(self) -> Dict[str, Path]:
        """
        synth (without configured inputs), predetect, train, detect, evaluate
        and baseline evaluation
        """
        written: Dict[str, Path] = {}
        with self.memory_manager.memory_monitor("pipeline"):
            if not (self.config.x1 and self.config.x2):
                written.update(self.synth())
            written.update(self.predetect())
            written.update(self.train())
            written.update(self.detect())
            truth = self.config.input_path("truth", self.settings.TRUTH_FILENAME)
            if not truth.exists():
                logger.warning("No ground truth available, skipping evaluation")
                return written
            written.update(self.evaluate())
            baseline = self.evaluate_baseline()
            written.update({f"baseline_{key}": path for key, path in baseline.items()})
        return written
