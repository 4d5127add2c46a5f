"""
Detection Service Package
Provides a decoupled service layer for pre-detection methods
"""

from interfaces.detection import ChangeDetectionMethod
from .service import DetectionService, get_detection_service

__all__ = ['ChangeDetectionMethod', 'DetectionService', 'get_detection_service']
