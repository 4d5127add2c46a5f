"""
Utility modules for the HyperChange toolkit
"""

from .validators import InputValidator
from .exceptions import (
    BaseChangeDetectionError, ContractViolationError, DataValidationError,
    FileProcessingError, HcubeFormatError, MaskFormatError, CheckpointError,
    ConfigurationError, NumericalFailureError, ErrorHandler,
    raise_if_invalid_file,
    raise_if_shape_mismatch, raise_if_empty_mask,
)
from .memory_manager import MemoryManager

__all__ = [
    'InputValidator', 'MemoryManager',
    'BaseChangeDetectionError', 'ContractViolationError', 'DataValidationError',
    'FileProcessingError', 'HcubeFormatError', 'MaskFormatError', 'CheckpointError',
    'ConfigurationError', 'NumericalFailureError', 'ErrorHandler',
    'raise_if_invalid_file',
    'raise_if_shape_mismatch', 'raise_if_empty_mask',
]
