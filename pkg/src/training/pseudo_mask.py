"""
Pseudo-label mask of probably-unchanged pixels taken from a pre-detection map
"""

import logging
from dataclasses import dataclass

import numpy as np

from utils.exceptions import ContractViolationError, raise_if_empty_mask

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PseudoMask:
    """H x W boolean grid of pixels used by the training loss"""

    selected: np.ndarray

    def __post_init__(self) -> None:
        selected = np.asarray(self.selected, dtype=bool)
        if selected.ndim != 2:
            raise ContractViolationError(
                f"mask must be 2-D, got shape {selected.shape}", operation="PseudoMask"
            )
        raise_if_empty_mask(int(selected.sum()), operation="PseudoMask")
        object.__setattr__(self, "selected", selected)

    @property
    def selected_count(self) -> int:
        return int(self.selected.sum())

    @property
    def shape(self) -> tuple:
        return self.selected.shape

    @property
    def ratio(self) -> float:
        return self.selected_count / self.selected.size

    def crop(self, rows: slice, cols: slice) -> "PseudoMask":
        return PseudoMask(self.selected[rows, cols])


def build_pseudo_mask(score_map: np.ndarray, n: int) -> PseudoMask:
    """
    Select the `n` lowest-scoring pixels; ties resolve in row-major order.

    Raises:
        ContractViolationError: n outside [1, H*W]
    """
    scores = np.asarray(score_map, dtype=np.float64)
    if scores.ndim != 2:
        raise ContractViolationError(
            f"score map must be 2-D, got shape {scores.shape}",
            operation="build_pseudo_mask",
        )
    if isinstance(n, bool) or not 1 <= int(n) <= scores.size:
        raise ContractViolationError(
            f"N must lie in [1, {scores.size}], got {n}", operation="build_pseudo_mask"
        )
    order = np.argsort(scores.ravel(), kind="stable")[: int(n)]
    selected = np.zeros(scores.size, dtype=bool)
    selected[order] = True
    mask = PseudoMask(selected.reshape(scores.shape))
    logger.info(
        f"Pseudo mask selects {mask.selected_count} of {scores.size} pixels "
        f"({100 * mask.ratio:.2f}%)"
    )
    return mask
