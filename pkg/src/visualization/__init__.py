"""
Export of tables and configuration dumps
"""

from .export_manager import ExportManager

__all__ = ['ExportManager']
