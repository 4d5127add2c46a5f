"""
Model checkpoints as HCUBE multi-record files, one record per named tensor
"""

import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np

from data_processing.hcube_io import read_hcube_records, write_hcube_records
from data_processing.hsi_cube import HsiCube
from utils.exceptions import CheckpointError, HcubeFormatError

from .layers import Module

logger = logging.getLogger(__name__)


def _as_record(name: str, value: np.ndarray) -> HsiCube:
    if value.ndim == 4:
        kh, kw, c_in, c_out = value.shape
        data = value.reshape(kh, kw, c_in * c_out)
    else:
        data = value.reshape(1, 1, -1)
    return HsiCube(data, name=name)


def save_checkpoint(model: Module, path: Union[str, Path]) -> Path:
    """Write every parameter and running statistic of `model`"""
    state = model.state_dict()
    records = [_as_record(name, value) for name, value in state.items()]
    path = write_hcube_records(records, path)
    logger.info(f"Saved checkpoint with {len(state)} tensors to {path}")
    return path


def load_checkpoint(model: Module, path: Union[str, Path]) -> Module:
    """
    Restore `model` in place from a checkpoint file.

    Raises:
        CheckpointError: Missing, extra, duplicate or wrongly sized records
    """
    path = Path(path)
    try:
        records = read_hcube_records(path)
    except HcubeFormatError as e:
        raise CheckpointError(f"unreadable checkpoint ({e})", filename=path.name)
    state: Dict[str, np.ndarray] = {}
    for record in records:
        if record.name in state:
            raise CheckpointError(
                f"duplicate record {record.name!r}", filename=path.name
            )
        state[record.name] = record.data.reshape(-1)
    model.load_state_dict(state, source=path.name)
    logger.info(f"Loaded checkpoint {path} ({len(state)} tensors)")
    return model
