"""
Hyperspectral cube I/O, label masks, preprocessing and scene synthesis
"""

from .hsi_cube import HsiCube, Label, as_image_array, validate_label_map
from .hcube_io import read_hcube, write_hcube, read_hcube_records, write_hcube_records
from .mask_io import (
    read_mask, write_mask, read_selection_pgm, write_selection_pgm, write_score_pgm,
)
from .preprocessing import (
    normalize_cube, gaussian_kernel, gaussian_lowpass, shift_image, tile_slices,
)
from .synthetic import SyntheticPair, synth_bitemporal

__all__ = [
    'HsiCube', 'Label', 'as_image_array', 'validate_label_map',
    'read_hcube', 'write_hcube', 'read_hcube_records', 'write_hcube_records',
    'read_mask', 'write_mask', 'read_selection_pgm', 'write_selection_pgm',
    'write_score_pgm',
    'normalize_cube', 'gaussian_kernel', 'gaussian_lowpass', 'shift_image',
    'tile_slices',
    'SyntheticPair', 'synth_bitemporal',
]
