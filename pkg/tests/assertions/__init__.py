"""
Custom assertions package for testing framework
Provides domain-specific assertions for better test readability
"""

from .custom_assertions import (
    GradientAssertions,
    MapAssertions,
    FileAssertions,
    numeric_gradient,
)

__all__ = [
    'GradientAssertions',
    'MapAssertions',
    'FileAssertions',
    'numeric_gradient',
]
