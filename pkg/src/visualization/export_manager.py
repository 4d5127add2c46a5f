"""
Export Manager Module
Writes metric tables, ROC curves, loss logs and effective-config dumps
"""

import logging
from pathlib import Path
from typing import Dict, Union

import pandas as pd

from analysis_tools.evaluation import RocCurve, metrics_frame
from config.pipeline_config import PipelineConfig
from training.trainer import LossReport

logger = logging.getLogger(__name__)


class ExportManager:
    """Class to handle exporting pipeline results into one output directory"""

    def __init__(self, output_path: Union[str, Path]):
        self.output_path = Path(output_path)
        self.output_path.mkdir(exist_ok=True, parents=True)

    def _write_csv(self, frame: pd.DataFrame, filename: str) -> Path:
        filepath = self.output_path / filename
        frame.to_csv(filepath, index=False, lineterminator="\n")
        logger.info(f"Wrote {len(frame)} rows to {filepath}")
        return filepath

    def export_metrics(self, metrics: Dict[str, float], filename: str) -> Path:
        """Two-column `metric,value` CSV"""
        return self._write_csv(metrics_frame(metrics), filename)

    def export_roc(self, curve: RocCurve, filename: str) -> Path:
        """Two-column `false_alarm_rate,detection_probability` CSV"""
        return self._write_csv(curve.to_frame(), filename)

    def export_loss_log(self, report: LossReport, filename: str) -> Path:
        """One `epoch,lr,loss` row per epoch"""
        return self._write_csv(report.to_frame(), filename)

    def export_effective_config(self, config: PipelineConfig, command: str) -> Path:
        """Sorted-key JSON of the merged configuration a command ran with"""
        filepath = self.output_path / f"effective_config_{command}.json"
        filepath.write_text(config.to_json() + "\n", encoding="utf-8")
        logger.debug(f"Wrote effective configuration to {filepath}")
        return filepath
