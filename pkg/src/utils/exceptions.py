"""
Custom Exception Classes for the HyperChange change-detection toolkit
Provides specific exception types with user-friendly messages and CLI exit codes
"""

import logging
import os
from pathlib import Path
from typing import Iterable, Optional, Sequence

logger = logging.getLogger(__name__)


class BaseChangeDetectionError(Exception):
    """Base exception class for all toolkit errors"""

    exit_code: int = 2

    def __init__(
        self,
        message: str,
        user_message: Optional[str] = None,
        error_code: Optional[str] = None,
    ):
        super().__init__(message)
        self.user_message = user_message or message
        self.error_code = error_code or "GENERAL_ERROR"

        # Log the technical error
        logger.error(f"[{self.error_code}] {message}")


class ContractViolationError(BaseChangeDetectionError):
    """Raised when an operation is called outside its preconditions"""

    def __init__(self, message: str, operation: Optional[str] = None):
        if operation:
            user_message = f"Invalid call to {operation}: {message}"
        else:
            user_message = f"Contract violation: {message}"

        super().__init__(
            message=message,
            user_message=user_message,
            error_code="CONTRACT_VIOLATION",
        )
        self.operation = operation


class DataValidationError(BaseChangeDetectionError):
    """Raised when data validation fails"""

    def __init__(self, message: str, field: Optional[str] = None):
        user_message = f"Data validation error: {message}"
        if field:
            user_message = f"Invalid data in field '{field}': {message}"

        super().__init__(
            message=message,
            user_message=user_message,
            error_code="DATA_VALIDATION_ERROR",
        )
        self.field = field


class FileProcessingError(BaseChangeDetectionError):
    """Raised when file processing fails"""

    def __init__(
        self,
        message: str,
        filename: Optional[str] = None,
        file_type: Optional[str] = None,
        error_code: str = "FILE_PROCESSING_ERROR",
    ):
        if filename:
            user_message = f"Cannot process file '{filename}': {message}"
        else:
            user_message = f"File processing error: {message}"

        super().__init__(
            message=message,
            user_message=user_message,
            error_code=error_code,
        )
        self.filename = filename
        self.file_type = file_type


class HcubeFormatError(FileProcessingError):
    """Raised when an HCUBE container is malformed"""

    def __init__(self, message: str, field: str, filename: Optional[str] = None):
        super().__init__(
            message=f"{field}: {message}",
            filename=filename,
            file_type=".hcube",
            error_code="HCUBE_FORMAT_ERROR",
        )
        self.field = field


class MaskFormatError(FileProcessingError):
    """Raised when a PGM label or selection mask cannot be parsed"""

    def __init__(self, message: str, filename: Optional[str] = None):
        super().__init__(
            message=message,
            filename=filename,
            file_type=".pgm",
            error_code="MASK_FORMAT_ERROR",
        )


class CheckpointError(FileProcessingError):
    """Raised when a checkpoint does not match the configured model"""

    def __init__(self, message: str, filename: Optional[str] = None):
        super().__init__(
            message=message,
            filename=filename,
            file_type=".hcube",
            error_code="CHECKPOINT_ERROR",
        )


class ConfigurationError(BaseChangeDetectionError):
    """Raised when configuration is invalid or missing"""

    def __init__(self, message: str, config_key: Optional[str] = None):
        if config_key:
            user_message = f"Configuration error for '{config_key}': {message}"
        else:
            user_message = f"Configuration error: {message}"

        super().__init__(
            message=message,
            user_message=user_message,
            error_code="CONFIGURATION_ERROR",
        )
        self.config_key = config_key


class NumericalFailureError(BaseChangeDetectionError):
    """Raised when training produces a non-finite loss"""

    exit_code = 3

    def __init__(self, message: str, epoch: Optional[int] = None):
        if epoch is not None:
            user_message = f"Training diverged at epoch {epoch}: {message}"
        else:
            user_message = f"Numerical failure: {message}"

        super().__init__(
            message=message,
            user_message=user_message,
            error_code="NUMERICAL_FAILURE",
        )
        self.epoch = epoch


class ErrorHandler:
    """Centralized error handling utility"""

    @staticmethod
    def exit_code_for(error: BaseException) -> int:
        """Map any exception to the process exit code of the CLI"""
        if isinstance(error, BaseChangeDetectionError):
            return error.exit_code
        if isinstance(error, (FileNotFoundError, PermissionError)):
            return 2
        return 1

    @staticmethod
    def get_user_friendly_message(error: BaseException) -> str:
        """Get user-friendly message for any error"""
        if isinstance(error, BaseChangeDetectionError):
            return error.user_message

        # Map common error types to user-friendly messages
        error_mappings = {
            "FileNotFoundError": (
                "The specified file was not found. Please check the file path."
            ),
            "PermissionError": "Permission denied. Please check file permissions.",
            "ValueError": "Invalid value provided. Please check your input.",
            "KeyError": (
                "Required information is missing. Please check your configuration."
            ),
            "MemoryError": (
                "Not enough memory. Try a smaller image or the --tile option."
            ),
        }

        error_type = type(error).__name__
        return error_mappings.get(error_type, "An unexpected error occurred.")


# Convenience functions for common error scenarios
def raise_if_invalid_file(
    filepath: str, allowed_extensions: Optional[Iterable[str]] = None
) -> None:
    """Raise FileProcessingError if file is missing or has the wrong extension"""
    if not os.path.exists(filepath):
        raise FileProcessingError(
            f"File not found: {filepath}", filename=os.path.basename(filepath)
        )

    if allowed_extensions:
        allowed = list(allowed_extensions)
        file_ext = Path(filepath).suffix.lower()
        if file_ext not in allowed:
            raise FileProcessingError(
                f"Unsupported file type '{file_ext}'. Allowed: {', '.join(allowed)}",
                filename=os.path.basename(filepath),
                file_type=file_ext,
            )


def raise_if_shape_mismatch(
    first: Sequence[int], second: Sequence[int], operation: str, what: str = "shapes"
) -> None:
    """Raise ContractViolationError if two shapes differ"""
    if tuple(first) != tuple(second):
        raise ContractViolationError(
            f"{what} differ: {tuple(first)} vs {tuple(second)}", operation=operation
        )


def raise_if_empty_mask(selected_count: int, operation: str) -> None:
    """Raise ContractViolationError if a selection mask selects nothing"""
    if selected_count < 1:
        raise ContractViolationError("mask selects no pixels", operation=operation)
