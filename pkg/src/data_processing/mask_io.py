"""
8-bit binary PGM (P5) persistence for label maps, selection masks and score previews
"""

import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from utils.exceptions import MaskFormatError

from .hsi_cube import Label, validate_label_map

logger = logging.getLogger(__name__)

LABEL_TO_GRAY: Dict[Label, int] = {
    Label.UNCHANGED: 0,
    Label.CHANGED: 255,
    Label.UNLABELED: 128,
}
GRAY_TO_LABEL: Dict[int, Label] = {gray: label for label, gray in LABEL_TO_GRAY.items()}
SELECTED_GRAY = 255


def _save_pgm(gray: np.ndarray, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # 2-D uint8 arrays become mode "L", which the PPM plugin writes as binary P5
    Image.fromarray(np.ascontiguousarray(gray, dtype=np.uint8)).save(path, format="PPM")
    return path


def _load_pgm(path: Union[str, Path]) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    try:
        with Image.open(path) as image:
            if image.format != "PPM" or image.mode != "L":
                raise MaskFormatError(
                    f"expected an 8-bit grayscale PGM, got {image.format} "
                    f"in mode {image.mode}",
                    filename=path.name,
                )
            return np.array(image, dtype=np.uint8)
    except UnidentifiedImageError:
        raise MaskFormatError("not a PGM image", filename=path.name)


def write_mask(labels: np.ndarray, path: Union[str, Path]) -> Path:
    """Encode 0 = unchanged, 255 = changed, 128 = unlabeled"""
    labels = validate_label_map(labels)
    gray = np.zeros(labels.shape, dtype=np.uint8)
    for label, value in LABEL_TO_GRAY.items():
        gray[labels == label] = value
    path = _save_pgm(gray, path)
    logger.info(f"Wrote {labels.shape[0]}x{labels.shape[1]} label map to {path}")
    return path


def read_mask(path: Union[str, Path]) -> np.ndarray:
    """
    Decode a label PGM into Label values.

    Raises:
        MaskFormatError: Not a PGM, or a gray value outside {0, 128, 255}
    """
    gray = _load_pgm(path)
    invalid = ~np.isin(gray, list(GRAY_TO_LABEL))
    if invalid.any():
        raise MaskFormatError(
            f"gray values {np.unique(gray[invalid]).tolist()[:5]} "
            "are not 0, 128 or 255",
            filename=Path(path).name,
        )
    labels = np.empty(gray.shape, dtype=np.int8)
    for value, label in GRAY_TO_LABEL.items():
        labels[gray == value] = label
    logger.info(f"Read {labels.shape[0]}x{labels.shape[1]} label map from {path}")
    return labels


def write_selection_pgm(selected: np.ndarray, path: Union[str, Path]) -> Path:
    """Pseudo mask as 255 = selected, 0 = not selected"""
    gray = np.where(np.asarray(selected, dtype=bool), SELECTED_GRAY, 0).astype(np.uint8)
    return _save_pgm(gray, path)


def read_selection_pgm(path: Union[str, Path]) -> np.ndarray:
    gray = _load_pgm(path)
    if not np.isin(gray, (0, SELECTED_GRAY)).all():
        raise MaskFormatError(
            "selection masks hold only 0 and 255", filename=Path(path).name
        )
    return gray == SELECTED_GRAY


def write_score_pgm(scores: np.ndarray, path: Union[str, Path]) -> Path:
    """Min-max scaled 8-bit preview of a score map (constant maps render black)"""
    scores = np.asarray(scores, dtype=np.float64)
    low, high = float(scores.min()), float(scores.max())
    if high > low:
        scaled = np.rint((scores - low) / (high - low) * 255.0)
    else:
        scaled = np.zeros_like(scores)
    return _save_pgm(scaled.astype(np.uint8), path)
