"""
Services package for the HyperChange toolkit
Contains the pipeline orchestration used by the CLI
"""

from .pipeline_service import PipelineService

__all__ = ["PipelineService"]
