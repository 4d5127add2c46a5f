"""
Input Validation Module
Range and type checks for configuration values, returning (is_valid, message) tuples
"""

import logging
import math
from typing import Any, Iterable, Tuple

logger = logging.getLogger(__name__)


class InputValidator:
    """Validation helpers shared by the configuration dataclasses"""

    MAX_IMAGE_SIDE = 8192
    MAX_BANDS = 4096

    @staticmethod
    def validate_positive_int(value: Any, minimum: int = 1) -> Tuple[bool, str]:
        """
        Validate an integer lower bound

        Args:
            value: Candidate value
            minimum: Smallest accepted value

        Returns:
            Tuple[bool, str]: (is_valid, error_message)
        """
        if isinstance(value, bool) or not isinstance(value, int):
            return False, f"expected an integer, got {type(value).__name__}"
        if value < minimum:
            return False, f"must be >= {minimum}, got {value}"
        return True, "Valid value"

    @staticmethod
    def validate_non_negative_int(value: Any) -> Tuple[bool, str]:
        """Validate an integer that may be zero"""
        return InputValidator.validate_positive_int(value, minimum=0)

    @staticmethod
    def validate_real(
        value: Any,
        minimum: float = -math.inf,
        maximum: float = math.inf,
        strict_minimum: bool = False,
    ) -> Tuple[bool, str]:
        """
        Validate a finite real number inside a range

        Args:
            value: Candidate value
            minimum: Lower bound
            maximum: Upper bound (inclusive)
            strict_minimum: Reject value == minimum

        Returns:
            Tuple[bool, str]: (is_valid, error_message)
        """
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return False, f"expected a number, got {type(value).__name__}"
        if not math.isfinite(value):
            return False, "must be finite"
        if strict_minimum and value <= minimum:
            return False, f"must be > {minimum}, got {value}"
        if value < minimum:
            return False, f"must be >= {minimum}, got {value}"
        if value > maximum:
            return False, f"must be <= {maximum}, got {value}"
        return True, "Valid value"

    @staticmethod
    def validate_choice(value: Any, choices: Iterable[str]) -> Tuple[bool, str]:
        """Validate membership in a fixed set of names"""
        allowed = list(choices)
        if value not in allowed:
            return False, f"must be one of {', '.join(allowed)}, got {value!r}"
        return True, "Valid choice"

    @staticmethod
    def validate_image_side(value: Any) -> Tuple[bool, str]:
        """Validate an image height or width"""
        ok, message = InputValidator.validate_positive_int(value)
        if not ok:
            return ok, message
        if value > InputValidator.MAX_IMAGE_SIDE:
            return False, f"must be <= {InputValidator.MAX_IMAGE_SIDE}, got {value}"
        return True, "Valid value"

    @staticmethod
    def validate_band_count(value: Any) -> Tuple[bool, str]:
        """Validate a spectral band count"""
        ok, message = InputValidator.validate_positive_int(value)
        if not ok:
            return ok, message
        if value > InputValidator.MAX_BANDS:
            return False, f"must be <= {InputValidator.MAX_BANDS}, got {value}"
        return True, "Valid value"

    @staticmethod
    def validate_offset(value: Any) -> Tuple[bool, str]:
        """Validate a (dx, dy) pixel offset pair"""
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            return False, "expected a pair [dx, dy]"
        for item in value:
            if isinstance(item, bool) or not isinstance(item, int):
                return False, "offset entries must be integers"
        return True, "Valid offset"
