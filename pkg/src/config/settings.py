"""
Centralized configuration management for the toolkit.
Process-level settings are loaded from environment variables with sensible defaults.
"""

import os
from pathlib import Path
from typing import Optional
from functools import lru_cache
from dotenv import load_dotenv
import logging

# Load environment variables
env_path = Path(__file__).parent.parent.parent / '.env'
load_dotenv(env_path)

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _env_flag(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("1", "true", "yes")


def _env_threads() -> Optional[int]:
    raw = os.getenv("HYPERCHANGE_THREADS")
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer HYPERCHANGE_THREADS={raw!r}")
        return None


class Settings:
    """Application configuration settings"""

    # Application Info
    APP_NAME: str = "HyperChange"
    APP_VERSION: str = "1.0.0"

    # Paths
    BASE_DIR: Path = Path(__file__).parent.parent.parent
    OUTPUT_DIR: Path = Path(os.getenv("HYPERCHANGE_OUTPUT_DIR", "outputs"))

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Performance Settings
    THREADS: Optional[int] = _env_threads()
    SHOW_PROGRESS: bool = _env_flag("HYPERCHANGE_PROGRESS", "True")
    MAX_MEMORY_MB: int = int(os.getenv("MAX_MEMORY_MB", "4096"))

    # File names written by the pipeline commands
    X1_FILENAME: str = "x1.hcube"
    X2_FILENAME: str = "x2.hcube"
    TRUTH_FILENAME: str = "truth.pgm"
    MASK_FILENAME: str = "mask.pgm"
    PREDETECT_SCORES_FILENAME: str = "predetect_scores.hcube"
    CHECKPOINT_FILENAME: str = "checkpoint.hcube"
    LOSS_LOG_FILENAME: str = "loss.csv"
    SCORES_FILENAME: str = "scores.hcube"
    MAP_FILENAME: str = "map.pgm"
    METRICS_FILENAME: str = "metrics.csv"
    ROC_FILENAME: str = "roc.csv"

    def __init__(self):
        """Initialize settings"""
        self.THREADS = _env_threads()
        self.SHOW_PROGRESS = _env_flag("HYPERCHANGE_PROGRESS", "True")
        self.LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
        self._validate_settings()

    def _validate_settings(self) -> None:
        """Validate critical settings"""
        if self.THREADS is not None and self.THREADS < 1:
            logger.warning(
                f"HYPERCHANGE_THREADS={self.THREADS} is not positive, ignoring it"
            )
            self.THREADS = None

        if self.LOG_LEVEL.upper() not in LOG_LEVELS:
            logger.warning(
                f"Unknown LOG_LEVEL {self.LOG_LEVEL!r}, falling back to INFO"
            )
            self.LOG_LEVEL = "INFO"


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()
