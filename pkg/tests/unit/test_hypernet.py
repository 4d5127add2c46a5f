"""
Unit tests for the siamese network and its checkpoints
"""

import numpy as np
import pytest

from autograd import SgdMomentum, backward
from config.pipeline_config import ModelConfig
from data_processing.hcube_io import read_hcube_records, write_hcube_records
from data_processing.hsi_cube import HsiCube
from model.checkpoint import load_checkpoint, save_checkpoint
from model.hypernet import HyperNet, SiameseOutputs, hypernet_forward, to_input_tensor
from utils.exceptions import CheckpointError, ContractViolationError
from tests.assertions.custom_assertions import weighted_sum


@pytest.fixture
def model(small_model_config):
    return HyperNet(small_model_config, seed=0)


class TestHyperNetForward:
    """Test the shared-weight forward pass"""

    def test_output_widths(self, model, cube_factory):
        x1, x2 = cube_factory.build(8, 9, 5), cube_factory.build(8, 9, 5)
        outputs = hypernet_forward(x1, x2, model)
        assert isinstance(outputs, SiameseOutputs)
        for tensor in outputs:
            assert tensor.shape == (1, 8, 9, 8)

    def test_identical_inputs_give_identical_outputs(self, model, cube_factory):
        x = cube_factory.build(8, 8, 5)
        f1, f2, z1, z2, p1, p2 = model(x, x)
        np.testing.assert_array_equal(f1.data, f2.data)
        np.testing.assert_array_equal(z1.data, z2.data)
        np.testing.assert_array_equal(p1.data, p2.data)

    def test_swapping_inputs_swaps_outputs(self, model, cube_factory):
        x1, x2 = cube_factory.build(8, 8, 5), cube_factory.build(8, 8, 5)
        forward = model(x1, x2)
        swapped = model(x2, x1)
        np.testing.assert_array_equal(forward.f1.data, swapped.f2.data)
        np.testing.assert_array_equal(forward.z2.data, swapped.z1.data)
        np.testing.assert_array_equal(forward.p1.data, swapped.p2.data)

    @pytest.mark.parametrize("shape", [(8, 8, 4), (9, 12, 7), (16, 8, 5)])
    def test_fused_features_keep_image_size(self, shape, cube_factory):
        config = ModelConfig(n=3)
        model = HyperNet(config, input_channels=shape[2], seed=1)
        f1, f2 = model.extract_features(
            cube_factory.build(*shape), cube_factory.build(*shape)
        )
        assert f1.shape == (shape[0], shape[1], 6)
        assert f2.shape == f1.shape

    def test_accepts_arrays_and_tensors(self, model, cube_factory):
        cube = cube_factory.build(8, 8, 5)
        assert to_input_tensor(cube.data).shape == (1, 8, 8, 5)
        assert to_input_tensor(cube.to_tensor()).shape == (1, 8, 8, 5)
        outputs = model(cube.data, cube.to_tensor())
        np.testing.assert_array_equal(outputs.f1.data, outputs.f2.data)

    def test_shape_mismatch(self, model, cube_factory):
        with pytest.raises(ContractViolationError):
            model(cube_factory.build(8, 8, 5), cube_factory.build(8, 9, 5))
        with pytest.raises(ContractViolationError):
            model(cube_factory.build(8, 8, 4), cube_factory.build(8, 8, 4))

    def test_input_channels_required(self):
        with pytest.raises(ContractViolationError):
            HyperNet(ModelConfig(n=4))

    def test_extract_features_restores_mode(self, model, cube_factory):
        model.train()
        x1, x2 = cube_factory.build(8, 8, 5), cube_factory.build(8, 8, 5)
        model.extract_features(x1, x2)
        assert model.training
        assert model.fusion.spatial.bn.params.training


class TestHyperNetParameters:
    """Test initialization, naming and weight sharing"""

    def test_seeded_initialization(self, small_model_config):
        first = HyperNet(small_model_config, seed=3).state_dict()
        second = HyperNet(small_model_config, seed=3).state_dict()
        assert list(first) == list(second)
        for name in first:
            np.testing.assert_array_equal(first[name], second[name])

    def test_parameter_names(self, model):
        names = [name for name, _ in model.named_parameters()]
        assert "spatial.0.body.conv.kernel" in names
        assert "spatial.0.downsample.conv.kernel" in names
        assert "spectral.2.channel_attention.expand.bias" in names
        assert "predictor.expand.kernel" in names
        assert not any(name.startswith("spatial.1.downsample") for name in names)

    def test_plain_blocks_have_no_attention_parameters(self):
        model = HyperNet(ModelConfig(n=4, use_attention=False), input_channels=5)
        assert not any("attention" in name for name, _ in model.named_parameters())

    def test_branches_stay_shared_after_training_steps(self, model, cube_factory, rng):
        x1, x2 = cube_factory.build(8, 8, 5), cube_factory.build(8, 8, 5)
        optimizer = SgdMomentum(model.parameters(), lr=0.01)
        for _ in range(2):
            optimizer.zero_grad()
            outputs = model(x1, x2)
            backward(weighted_sum(outputs.p1, rng) + weighted_sum(outputs.p2, rng))
            optimizer.step()
        same = model(x1, x1)
        np.testing.assert_array_equal(same.p1.data, same.p2.data)


class TestCheckpoint:
    """Test saving and restoring model state"""

    def test_roundtrip(self, model, temp_dir, cube_factory):
        # moves running statistics
        model(cube_factory.build(8, 8, 5), cube_factory.build(8, 8, 5))
        path = save_checkpoint(model, temp_dir / "checkpoint.hcube")
        fresh = HyperNet(model.config, input_channels=5, seed=99)
        restored = load_checkpoint(fresh, path)
        original, loaded = model.state_dict(), restored.state_dict()
        assert list(original) == list(loaded)
        for name in original:
            np.testing.assert_array_equal(original[name], loaded[name], err_msg=name)

    def test_kernel_records_fold_channels(self, model, temp_dir):
        path = save_checkpoint(model, temp_dir / "checkpoint.hcube")
        records = read_hcube_records(path)
        by_name = {record.name: record for record in records}
        assert by_name["spatial.0.body.conv.kernel"].shape == (3, 3, 5 * 4)
        assert by_name["spatial.0.body.bn.running_var"].shape == (1, 1, 4)
        assert len(records) == len(model.state_dict())

    def test_incompatible_width(self, model, temp_dir):
        path = save_checkpoint(model, temp_dir / "checkpoint.hcube")
        with pytest.raises(CheckpointError):
            load_checkpoint(HyperNet(ModelConfig(n=5), input_channels=5), path)

    def test_incompatible_ablation(self, model, temp_dir):
        path = save_checkpoint(model, temp_dir / "checkpoint.hcube")
        with pytest.raises(CheckpointError):
            other = HyperNet(ModelConfig(n=4, use_attention=False), input_channels=5)
            load_checkpoint(other, path)

    def test_duplicate_record(self, model, temp_dir):
        path = temp_dir / "duplicate.hcube"
        record = HsiCube(np.ones((1, 1, 4)), name="fusion.spatial.bn.gamma")
        write_hcube_records([record, record], path)
        with pytest.raises(CheckpointError):
            load_checkpoint(model, path)

    def test_unreadable_file(self, model, temp_dir):
        path = temp_dir / "garbage.hcube"
        path.write_bytes(b"not a checkpoint at all")
        with pytest.raises(CheckpointError):
            load_checkpoint(model, path)
