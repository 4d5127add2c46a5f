"""
Whole-image self-supervised training loop
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from autograd import Graph, SgdMomentum, backward, cosine_lr
from config.pipeline_config import TrainConfig
from config.settings import Settings, get_settings
from data_processing.hsi_cube import HsiCube
from model.hypernet import HyperNet
from utils.exceptions import ContractViolationError, NumericalFailureError
from utils.memory_manager import MemoryManager

from .losses import total_loss
from .pseudo_mask import PseudoMask

logger = logging.getLogger(__name__)

LOSS_LOG_COLUMNS = ["epoch", "lr", "loss"]


@dataclass
class EpochRecord:
    epoch: int
    lr: float
    loss: float
    seconds: float


@dataclass
class LossReport:
    """One record per completed epoch (1-based epoch numbers)"""

    records: List[EpochRecord] = field(default_factory=list)

    def append(self, record: EpochRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def losses(self) -> List[float]:
        return [record.loss for record in self.records]

    @property
    def learning_rates(self) -> List[float]:
        return [record.lr for record in self.records]

    def to_frame(self, include_timing: bool = False) -> pd.DataFrame:
        """Loss log table; timing is left out by default so logs stay reproducible"""
        columns = LOSS_LOG_COLUMNS + (["seconds"] if include_timing else [])
        rows = [[getattr(record, c) for c in columns] for record in self.records]
        return pd.DataFrame(rows, columns=columns)


class Trainer:
    """
    Trains one HyperNet on a co-registered image pair.

    Every epoch feeds both whole images forward, evaluates the masked loss,
    back-propagates and takes one SGD step at the cosine-decayed rate.
    """

    def __init__(self, config: TrainConfig, settings: Optional[Settings] = None):
        self.config = config
        self.settings = settings or get_settings()
        self.memory_manager = MemoryManager(max_memory_mb=self.settings.MAX_MEMORY_MB)

    def _check_inputs(self, x1: HsiCube, x2: HsiCube, mask: PseudoMask) -> None:
        if x1.shape != x2.shape:
            raise ContractViolationError(
                f"image shapes differ: {x1.shape} vs {x2.shape}", operation="train"
            )
        if mask.shape != (x1.height, x1.width):
            raise ContractViolationError(
                f"mask shape {mask.shape} does not match image {x1.height}x{x1.width}",
                operation="train",
            )

    def build_model(self, bands: int) -> HyperNet:
        return HyperNet(self.config.model, input_channels=bands, seed=self.config.seed)

    def train(
        self, x1: HsiCube, x2: HsiCube, mask: PseudoMask
    ) -> Tuple[HyperNet, LossReport]:
        """
        Run `config.epochs` epochs.

        Returns:
            Trained model and the per-epoch loss report

        Raises:
            NumericalFailureError: Loss became NaN or infinite
        """
        self._check_inputs(x1, x2, mask)
        cfg = self.config
        model = self.build_model(x1.bands).train()
        optimizer = SgdMomentum(
            model.parameters(),
            lr=cfg.base_lr,
            momentum=cfg.momentum,
            weight_decay=cfg.weight_decay,
        )
        t1, t2 = x1.to_tensor(), x2.to_tensor()
        report = LossReport()

        logger.info(
            f"Training {cfg.epochs} epochs on {x1.height}x{x1.width}x{x1.bands}, "
            f"{mask.selected_count} masked pixels, loss={cfg.loss}, "
            f"attention={cfg.model.use_attention}"
        )
        with self.memory_manager.memory_monitor("training"):
            epochs = tqdm(
                range(cfg.epochs),
                desc="training",
                unit="epoch",
                disable=not self.settings.SHOW_PROGRESS,
            )
            for epoch in epochs:
                started = time.perf_counter()
                optimizer.lr = cosine_lr(epoch, cfg.epochs, cfg.base_lr)
                optimizer.zero_grad()
                with Graph() as graph:
                    outputs = model(t1, t2)
                    z1, z2, p1, p2 = outputs.z1, outputs.z2, outputs.p1, outputs.p2
                    loss = total_loss(z1, z2, p1, p2, mask, kind=cfg.loss)
                value = loss.item()
                if not math.isfinite(value):
                    raise NumericalFailureError(f"loss is {value}", epoch=epoch + 1)
                backward(loss, graph)
                optimizer.step()

                seconds = time.perf_counter() - started
                record = EpochRecord(epoch + 1, optimizer.lr, value, seconds)
                report.append(record)
                epochs.set_postfix(loss=f"{value:.4f}", lr=f"{optimizer.lr:.4f}")
                if record.epoch % cfg.log_every == 0 or record.epoch in (1, cfg.epochs):
                    logger.info(
                        f"epoch {record.epoch}/{cfg.epochs} "
                        f"lr={record.lr:.5f} loss={value:.6f}"
                    )

        if not all(np.isfinite(p.data).all() for p in model.parameters()):
            raise NumericalFailureError(
                "parameters became non-finite", epoch=cfg.epochs
            )
        return model.eval(), report


def train(
    x1: HsiCube, x2: HsiCube, g: PseudoMask, cfg: TrainConfig
) -> Tuple[HyperNet, LossReport]:
    return Trainer(cfg).train(x1, x2, g)
