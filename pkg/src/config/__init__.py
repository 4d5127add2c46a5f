"""Configuration module for the HyperChange toolkit"""

from .settings import Settings, get_settings
from .pipeline_config import (
    ABLATIONS, LOSSES, PREDETECTORS, TASKS,
    ModelConfig, PipelineConfig, SynthConfig, TrainConfig,
    load_pipeline_config,
)

__all__ = [
    'Settings', 'get_settings',
    'ABLATIONS', 'LOSSES', 'PREDETECTORS', 'TASKS',
    'ModelConfig', 'PipelineConfig', 'SynthConfig', 'TrainConfig',
    'load_pipeline_config',
]
