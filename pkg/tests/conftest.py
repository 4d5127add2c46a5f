"""
Pytest configuration and shared fixtures for all tests
"""

import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

# Add src to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / 'src'))
sys.path.insert(0, str(project_root))

# Set test environment variables before settings are cached
os.environ['LOG_LEVEL'] = 'ERROR'  # Reduce log noise during testing
os.environ['HYPERCHANGE_PROGRESS'] = 'false'
os.environ.pop('HYPERCHANGE_THREADS', None)

from config.pipeline_config import ModelConfig, SynthConfig, TrainConfig  # noqa: E402
from data_processing.synthetic import synth_bitemporal  # noqa: E402
from tests.factories.test_factories import (  # noqa: E402
    CubeFactory,
    LabelFactory,
    TensorFactory,
)

# Suppress warnings during testing
warnings.filterwarnings("ignore", category=DeprecationWarning)


@pytest.fixture
def temp_dir(tmp_path):
    """Create a temporary directory for test files"""
    return tmp_path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def reset_singletons():
    """Reset cached singletons between tests"""
    import analysis_service.service as service_module

    service_module._service = None
    yield
    service_module._service = None


@pytest.fixture
def cube_factory():
    CubeFactory.reset_sequence()
    return CubeFactory


@pytest.fixture
def tensor_factory():
    TensorFactory.reset_sequence()
    return TensorFactory


@pytest.fixture
def label_factory():
    LabelFactory.reset_sequence()
    return LabelFactory


@pytest.fixture
def small_model_config():
    return ModelConfig(n=4, input_channels=5)


@pytest.fixture
def small_train_config():
    """A few epochs of a narrow network, enough to exercise the loop"""
    return TrainConfig(
        epochs=3, mask_size=40, model=ModelConfig(n=4), log_every=1, seed=7
    )


@pytest.fixture
def small_synth_config():
    return SynthConfig(
        height=16,
        width=16,
        bands=6,
        materials=3,
        blur_sigma=2.0,
        anomaly_count=2,
        anomaly_size=2,
        seed=3,
    )


@pytest.fixture
def synthetic_pair(small_synth_config):
    return synth_bitemporal(small_synth_config)


@pytest.fixture
def small_config_document():
    """Pipeline configuration small enough for CLI round trips"""
    return {
        "task": "hacd",
        "synth": {
            "height": 12,
            "width": 12,
            "bands": 5,
            "materials": 3,
            "blur_sigma": 2.0,
            "anomaly_count": 2,
            "anomaly_size": 2,
        },
        "train": {
            "epochs": 2,
            "mask_size": 64,
            "log_every": 1,
            "model": {"n": 3},
        },
    }


@pytest.fixture
def config_file(temp_dir, small_config_document):
    """Write the small pipeline configuration to disk"""
    path = temp_dir / "config.json"
    path.write_text(json.dumps(small_config_document), encoding="utf-8")
    return path
