"""
Simulated bi-temporal scene: material regions, smoothed per-band noise,
a whole-pixel offset between dates and implanted anomalous blocks
"""

import logging
from typing import List, NamedTuple, Set, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import gaussian_filter1d

from config.pipeline_config import SynthConfig
from utils.exceptions import ContractViolationError

from .hsi_cube import HsiCube, Label
from .preprocessing import gaussian_lowpass, shift_image

logger = logging.getLogger(__name__)

SIGNATURE_FLOOR = 100.0
SIGNATURE_RANGE = 900.0
WAVELENGTH_RANGE_NM = (450.0, 2500.0)
PLACEMENT_ATTEMPTS_PER_BLOCK = 200


class SyntheticPair(NamedTuple):
    x1: HsiCube
    x2: HsiCube
    truth: np.ndarray


def material_map(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """Smooth random regions: argmax over one low-passed random field per material"""
    region_sigma = max(1.0, min(cfg.height, cfg.width) / 12.0)
    fields = np.stack(
        [
            gaussian_lowpass(rng.standard_normal((cfg.height, cfg.width)), region_sigma)
            for _ in range(cfg.materials)
        ]
    )
    return np.argmax(fields, axis=0)


def material_signatures(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """[materials, bands] smooth spectra"""
    raw = rng.uniform(0.0, 1.0, size=(cfg.materials, cfg.bands))
    sigma = max(1.0, cfg.bands / 16.0)
    smooth = gaussian_filter1d(raw, sigma=sigma, axis=1, mode="reflect")
    low = smooth.min(axis=1, keepdims=True)
    span = np.maximum(smooth.max(axis=1, keepdims=True) - low, 1e-12)
    gain = rng.uniform(0.3, 1.0, size=(cfg.materials, 1))
    return SIGNATURE_FLOOR + SIGNATURE_RANGE * (smooth - low) / span * gain


def band_noise(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """Independent uniform(-a, a) field per band, low-pass filtered"""
    amplitude = cfg.noise_amplitude
    return np.stack(
        [
            gaussian_lowpass(
                rng.uniform(-amplitude, amplitude, size=(cfg.height, cfg.width)),
                cfg.blur_sigma,
            )
            for _ in range(cfg.bands)
        ],
        axis=2,
    )


def place_anomalies(
    labels: np.ndarray, cfg: SynthConfig, rng: np.random.Generator
) -> List[Tuple[int, int, int, int]]:
    """
    Choose non-overlapping destination blocks and single-material source blocks.

    A source's material never occurs inside its destination block, so every
    implanted pixel changes material.

    Returns:
        (dest_row, dest_col, src_row, src_col) per block

    Raises:
        ContractViolationError: The requested blocks cannot be placed
    """
    size = cfg.anomaly_size
    if cfg.anomaly_count == 0:
        return []
    if cfg.anomaly_count * size * size > cfg.height * cfg.width:
        raise ContractViolationError(
            f"{cfg.anomaly_count} blocks of {size}x{size} exceed "
            f"the {cfg.height}x{cfg.width} image",
            operation="synth_bitemporal",
        )

    windows = sliding_window_view(labels, (size, size))
    uniform = windows.min(axis=(2, 3)) == windows.max(axis=(2, 3))
    source_rows, source_cols = np.nonzero(uniform)
    source_materials = labels[source_rows, source_cols]

    occupied = np.zeros(labels.shape, dtype=bool)
    placements: List[Tuple[int, int, int, int]] = []
    attempts = 0
    while len(placements) < cfg.anomaly_count:
        attempts += 1
        if attempts > PLACEMENT_ATTEMPTS_PER_BLOCK * cfg.anomaly_count:
            raise ContractViolationError(
                f"placed only {len(placements)} of {cfg.anomaly_count} anomaly blocks",
                operation="synth_bitemporal",
            )
        row = int(rng.integers(0, cfg.height - size + 1))
        col = int(rng.integers(0, cfg.width - size + 1))
        if occupied[row : row + size, col : col + size].any():
            continue
        block = labels[row : row + size, col : col + size]
        present: Set[int] = set(np.unique(block).tolist())
        candidates = np.nonzero(~np.isin(source_materials, list(present)))[0]
        if candidates.size == 0:
            continue
        pick = candidates[int(rng.integers(0, candidates.size))]
        occupied[row : row + size, col : col + size] = True
        placements.append((row, col, int(source_rows[pick]), int(source_cols[pick])))
    return placements


def synth_bitemporal(cfg: SynthConfig) -> SyntheticPair:
    """
    Build (x1, x2, truth) deterministically from `cfg.seed`.

    x1 is the material scene plus per-pixel jitter; x2 is x1 plus smoothed
    per-band noise, shifted by the configured offset, with anomaly blocks
    copied from elsewhere in x1.
    """
    rng = np.random.default_rng(cfg.seed)
    labels = material_map(cfg, rng)
    signatures = material_signatures(cfg, rng)
    scene = signatures[labels]
    if cfg.jitter > 0:
        scene = scene + rng.normal(0.0, cfg.jitter, size=scene.shape)

    wavelengths = np.linspace(*WAVELENGTH_RANGE_NM, cfg.bands)
    x1 = HsiCube(scene, name="x1", wavelengths=wavelengths)

    noisy = x1.with_data(x1.data + band_noise(cfg, rng))
    dx, dy = cfg.offset
    x2_data = shift_image(noisy, dx, dy).data.copy()

    truth = np.full((cfg.height, cfg.width), Label.UNCHANGED, dtype=np.int8)
    size = cfg.anomaly_size
    for row, col, src_row, src_col in place_anomalies(labels, cfg, rng):
        source = x1.data[src_row : src_row + size, src_col : src_col + size]
        x2_data[row : row + size, col : col + size] = source
        truth[row : row + size, col : col + size] = Label.CHANGED

    x2 = HsiCube(x2_data, name="x2", wavelengths=wavelengths.copy())
    logger.info(
        f"Synthesized {cfg.height}x{cfg.width}x{cfg.bands} pair with "
        f"{int((truth == Label.CHANGED).sum())} "
        f"changed pixels (seed {cfg.seed})"
    )
    return SyntheticPair(x1, x2, truth)
