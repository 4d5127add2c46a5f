"""
Detection Service Implementation
Named registry of pre-detection methods used by the CLI and the trainer config
"""

import logging
import time
from typing import Any, Dict, List, Optional, Type

from interfaces.detection import ChangeDetectionMethod
from utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)


class DetectionService:
    """
    Service layer for classical change scoring
    Decouples method selection from the pipeline commands
    """

    def __init__(self) -> None:
        self.available_methods: Dict[str, Type[ChangeDetectionMethod]] = {}
        self._register_methods()

    def _register_methods(self) -> None:
        # Import here to avoid circular imports
        from analysis_tools.predetectors import CvaMethod, DiffRxMethod

        for method_class in (DiffRxMethod, CvaMethod):
            self.available_methods[method_class().name] = method_class

    def get_available_methods(self) -> List[Dict[str, str]]:
        """
        Get information about available methods

        Returns:
            List of dicts with method name and description
        """
        return [
            {"name": name, "description": method_class().description}
            for name, method_class in self.available_methods.items()
        ]

    def create_method(self, method_name: str) -> Optional[ChangeDetectionMethod]:
        """
        Create an instance of the requested method

        Returns:
            Method instance, or None if the name is not registered
        """
        method_class = self.available_methods.get(method_name)
        if method_class is None:
            logger.error(f"Detection method '{method_name}' not found")
            return None
        return method_class()

    def score_pair(self, x1: object, x2: object, method_name: str) -> Dict[str, Any]:
        """
        Score a co-registered pair with a registered method

        Raises:
            ConfigurationError: Unknown method name
        """
        method = self.create_method(method_name)
        if method is None:
            raise ConfigurationError(
                f"unknown pre-detector '{method_name}', "
                f"available: {', '.join(self.available_methods)}",
                config_key="train.predetector",
            )
        start_time = time.perf_counter()
        scores = method.score(x1, x2)
        elapsed_time = time.perf_counter() - start_time
        logger.info(f"{method.name} scored {scores.size} pixels in {elapsed_time:.2f}s")
        return {
            "method": method.name,
            "scores": scores,
            "stats": {"pixels": int(scores.size), "elapsed_time": elapsed_time},
        }


# Singleton instance
_service: Optional[DetectionService] = None


def get_detection_service() -> DetectionService:
    """Get or create the detection service singleton"""
    global _service
    if _service is None:
        _service = DetectionService()
    return _service
