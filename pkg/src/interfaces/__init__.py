"""
Common interface definitions package
"""

from .detection import ChangeDetectionMethod

__all__ = ['ChangeDetectionMethod']
