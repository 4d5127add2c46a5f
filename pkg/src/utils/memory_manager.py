"""
Memory Monitoring Module
Tracks resident memory around long-running commands such as training
"""

import gc
import logging
from contextlib import contextmanager
from typing import Dict, Iterator

import psutil

logger = logging.getLogger(__name__)


class MemoryManager:
    """
    Memory monitoring utility for whole-image training and detection
    """

    def __init__(self, max_memory_mb: int = 4096):
        """
        Initialize memory manager

        Args:
            max_memory_mb: Resident size in MB above which a warning is logged
        """
        self.max_memory_mb = max_memory_mb

    def get_memory_usage(self) -> Dict[str, float]:
        """Get current memory usage statistics"""
        process = psutil.Process()
        memory_info = process.memory_info()

        return {
            "rss_mb": memory_info.rss / (1024 * 1024),
            "vms_mb": memory_info.vms / (1024 * 1024),
            "percent": process.memory_percent(),
            "available_mb": psutil.virtual_memory().available / (1024 * 1024),
        }

    def check_memory_threshold(self) -> bool:
        """Check if memory usage exceeds threshold"""
        usage = self.get_memory_usage()
        return usage["rss_mb"] > self.max_memory_mb

    @contextmanager
    def memory_monitor(
        self, operation_name: str = "operation"
    ) -> Iterator["MemoryManager"]:
        """Context manager to monitor memory usage during operations"""
        initial_memory = self.get_memory_usage()
        logger.info(
            f"Starting {operation_name}, "
            f"initial memory: {initial_memory['rss_mb']:.1f}MB"
        )

        try:
            yield self
        finally:
            final_memory = self.get_memory_usage()
            memory_diff = final_memory["rss_mb"] - initial_memory["rss_mb"]

            logger.info(
                f"Completed {operation_name}, "
                f"final memory: {final_memory['rss_mb']:.1f}MB "
                f"(change: {memory_diff:+.1f}MB)"
            )

            if self.check_memory_threshold():
                logger.warning(
                    f"{operation_name} left {final_memory['rss_mb']:.1f}MB resident "
                    f"(limit {self.max_memory_mb}MB), collecting garbage"
                )
                gc.collect()
