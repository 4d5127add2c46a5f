"""
Unit tests for attention maps, residual blocks, fusion, projector and predictor
"""

import numpy as np
import pytest

from autograd import Tensor, activation, reduce_pool
from model.attention import (
    ChannelAttention,
    SpatialAttention,
    channel_attention,
    spatial_attention,
)
from model.blocks import (
    RCAB,
    RSAB,
    Fusion,
    Predictor,
    Projector,
    fusion_forward,
    predictor_forward,
    projector_forward,
    rcab_forward,
    rsab_forward,
)
from utils.exceptions import ContractViolationError
from tests.assertions.custom_assertions import GradientAssertions, MapAssertions


KINK_MARGIN = 1e-3


def zero_weights(module, prefix=""):
    """Zero every kernel, bias and BN beta under `prefix`; BN gammas stay 1"""
    for name, tensor in module.named_parameters():
        if name.startswith(prefix) and not name.endswith("gamma"):
            tensor.data[...] = 0.0


def randomize_offsets(module, rng):
    """Random conv biases and BN affine terms; kernels keep their He-normal draw"""
    for name, tensor in module.named_parameters():
        if name.endswith("gamma"):
            tensor.data[...] = rng.uniform(0.5, 1.5, tensor.shape)
        elif name.endswith(("bias", "beta")):
            tensor.data[...] = rng.uniform(-1.0, 1.0, tensor.shape)


def relu_inputs(block, x):
    """Pre-activation values of every ReLU inside an attention block"""
    features = block.body(x)
    values = []
    if block.channel_attention is not None:
        attention = block.channel_attention
        for kind in ("avg", "max"):
            pooled = reduce_pool(features, "spatial", kind)
            values.append(attention.squeeze(pooled).data)
        features = features * attention(features)
    if isinstance(block, RSAB):
        if block.spatial_attention is not None:
            features = features * block.spatial_attention(features)
        shortcut = block.downsample(x) if block.downsample is not None else x
        values.append((shortcut + features).data)
    return values


def head_relu_inputs(head, x):
    """Pre-activation values of the inner ReLUs of a projector or predictor"""
    if isinstance(head, Predictor):
        return [head.squeeze(x).data]
    values = []
    for layer in head.layers[:-1]:
        x = layer(x)
        values.append(x.data)
        x = activation(x, "relu")
    return values


def away_from_kinks(module, x, rng, inputs_of=relu_inputs, attempts=50):
    """Redraw offsets until every ReLU input clears KINK_MARGIN; returns the margin"""
    margin = 0.0
    for _ in range(attempts):
        randomize_offsets(module, rng)
        margin = min(float(np.abs(values).min()) for values in inputs_of(module, x))
        if margin > KINK_MARGIN:
            break
    return margin


@pytest.fixture
def seeded():
    return np.random.default_rng(11)


class TestChannelAttention:
    """Test the channel attention map"""

    def test_zero_input_zero_mlp(self, seeded):
        attention = ChannelAttention(4, 1, seeded)
        zero_weights(attention)
        out = channel_attention(Tensor(np.zeros((1, 3, 3, 4))), attention)
        assert out.shape == (1, 1, 1, 4)
        np.testing.assert_allclose(out.data, 0.5)

    def test_identity_mlp_on_constant_input(self, seeded):
        attention = ChannelAttention(3, 3, seeded)
        for conv in (attention.squeeze, attention.expand):
            conv.params.kernel.data[...] = np.eye(3).reshape(1, 1, 3, 3)
            conv.params.bias.data[...] = 0.0
        c = np.array([0.2, 1.0, 0.7])
        out = channel_attention(Tensor(np.tile(c, (1, 4, 4, 1))), attention)
        np.testing.assert_allclose(out.data[0, 0, 0], 1.0 / (1.0 + np.exp(-2.0 * c)))

    def test_values_in_open_unit_interval(self, seeded, tensor_factory):
        out = ChannelAttention(5, 2, seeded)(tensor_factory.build((1, 4, 4, 5)))
        MapAssertions.assert_attention_map(out.data)

    def test_invariant_under_spatial_permutation(self, seeded, rng):
        attention = ChannelAttention(3, 1, seeded)
        x = rng.standard_normal((1, 4, 5, 3))
        permuted = x.reshape(1, 20, 3)[:, rng.permutation(20)].reshape(1, 4, 5, 3)
        np.testing.assert_allclose(
            attention(Tensor(x)).data, attention(Tensor(permuted)).data, atol=1e-12
        )


class TestSpatialAttention:
    """Test the spatial attention map"""

    def test_zero_weights_give_half(self, seeded, tensor_factory):
        attention = SpatialAttention(seeded)
        zero_weights(attention)
        features = tensor_factory.build((1, 4, 4, 3))
        out = spatial_attention(features, attention)
        assert out.shape == (1, 4, 4, 1)
        np.testing.assert_allclose((features * out).data, 0.5 * features.data)

    def test_constant_input_constant_interior(self, seeded):
        x = Tensor(np.full((1, 10, 10, 2), 0.3))
        out = SpatialAttention(seeded)(x).data[0, :, :, 0]
        interior = out[3:7, 3:7]
        np.testing.assert_allclose(interior, interior[0, 0])

    def test_values_in_open_unit_interval(self, seeded, tensor_factory):
        out = SpatialAttention(seeded)(tensor_factory.build((1, 5, 5, 4)))
        MapAssertions.assert_attention_map(out.data)


class TestRSAB:
    """Test the residual spatial attention block"""

    def test_first_block_shape(self, seeded, tensor_factory):
        block = RSAB(5, 4, 1, 1, seeded)
        out = rsab_forward(tensor_factory.build((1, 6, 7, 5)), 1, block)
        assert out.shape == (1, 6, 7, 4)
        assert block.downsample is not None

    def test_zero_weights_give_zero_output(self, seeded, tensor_factory):
        block = RSAB(5, 4, 1, 1, seeded)
        zero_weights(block)
        out = block(tensor_factory.build((1, 4, 4, 5)))
        np.testing.assert_array_equal(out.data, 0.0)

    def test_zeroed_internal_path_keeps_identity_shortcut(self, seeded, tensor_factory):
        block = RSAB(4, 4, 2, 1, seeded)
        assert block.downsample is None
        zero_weights(block, prefix="body.")
        x = tensor_factory.build((1, 4, 4, 4))
        np.testing.assert_allclose(block(x).data, np.maximum(x.data, 0.0))

    def test_output_is_non_negative(self, seeded, tensor_factory):
        out = RSAB(3, 4, 1, 1, seeded)(tensor_factory.build((1, 5, 5, 3)))
        assert (out.data >= 0).all()

    def test_without_attention(self, seeded):
        block = RSAB(3, 4, 1, 1, seeded, use_attention=False)
        assert not any("attention" in name for name, _ in block.named_parameters())

    def test_wrong_width_or_index(self, seeded, tensor_factory):
        block = RSAB(4, 4, 2, 1, seeded)
        with pytest.raises(ContractViolationError):
            block(tensor_factory.build((1, 4, 4, 3)))
        with pytest.raises(ContractViolationError):
            rsab_forward(tensor_factory.build((1, 4, 4, 4)), 3, block)

    def test_gradients(self, seeded, tensor_factory, rng):
        block = RSAB(2, 3, 1, 1, seeded)
        x = tensor_factory.build((1, 4, 4, 2))
        assert away_from_kinks(block, x, seeded) > KINK_MARGIN
        w = Tensor(rng.standard_normal((1, 4, 4, 3)))
        GradientAssertions.assert_gradients_match(
            lambda: (block(x) * w).sum(), [x] + block.parameters()
        )

    def test_gradients_without_attention(self, seeded, tensor_factory, rng):
        block = RSAB(2, 3, 1, 1, seeded, use_attention=False)
        x = tensor_factory.build((1, 4, 4, 2))
        assert away_from_kinks(block, x, seeded) > KINK_MARGIN
        w = Tensor(rng.standard_normal((1, 4, 4, 3)))
        GradientAssertions.assert_gradients_match(
            lambda: (block(x) * w).sum(), [x] + block.parameters()
        )


class TestRCAB:
    """Test the residual channel attention block"""

    def test_first_block_shape(self, seeded, tensor_factory):
        block = RCAB(6, 4, 1, 1, seeded)
        out = rcab_forward(tensor_factory.build((1, 5, 5, 6)), 1, block)
        assert out.shape == (1, 5, 5, 4)

    def test_first_block_zero_weights(self, seeded, tensor_factory):
        block = RCAB(6, 4, 1, 1, seeded)
        zero_weights(block)
        out = block(tensor_factory.build((1, 3, 3, 6)))
        np.testing.assert_array_equal(out.data, 0.0)

    def test_zeroed_internal_path_returns_input(self, seeded, tensor_factory):
        block = RCAB(4, 4, 2, 1, seeded)
        zero_weights(block, prefix="body.")
        x = tensor_factory.build((1, 3, 3, 4))
        np.testing.assert_array_equal(block(x).data, x.data)

    def test_later_blocks_have_no_trailing_relu(self, seeded, tensor_factory):
        out = RCAB(4, 4, 3, 1, seeded)(tensor_factory.build((1, 4, 4, 4)))
        assert (out.data < 0).any()

    def test_gradients(self, seeded, tensor_factory, rng):
        block = RCAB(3, 3, 2, 1, seeded)
        x = tensor_factory.build((1, 3, 4, 3))
        assert away_from_kinks(block, x, seeded) > KINK_MARGIN
        w = Tensor(rng.standard_normal(x.shape))
        GradientAssertions.assert_gradients_match(
            lambda: (block(x) * w).sum(), [x] + block.parameters()
        )


class TestFusion:
    """Test spatial-spectral fusion"""

    def test_shape(self, seeded, tensor_factory):
        fusion = Fusion(3, seeded)
        spatial = tensor_factory.build((1, 4, 4, 3))
        spectral = tensor_factory.build((1, 4, 4, 3))
        out = fusion_forward(spatial, spectral, fusion)
        assert out.shape == (1, 4, 4, 6)

    def test_zero_spectral_path(self, seeded, tensor_factory):
        fusion = Fusion(3, seeded)
        zero_weights(fusion, prefix="spectral.")
        spatial = tensor_factory.build((1, 4, 4, 3))
        out = fusion(spatial, tensor_factory.build((1, 4, 4, 3)))
        np.testing.assert_array_equal(out.data[..., 3:], 0.0)
        assert np.abs(out.data[..., :3]).sum() > 0

    def test_first_channels_come_from_spatial_input(self, seeded, tensor_factory):
        fusion = Fusion(3, seeded)
        spatial = tensor_factory.build((1, 4, 4, 3))
        first = fusion(spatial, tensor_factory.build((1, 4, 4, 3))).data
        second = fusion(spatial, tensor_factory.build((1, 4, 4, 3))).data
        np.testing.assert_array_equal(first[..., :3], second[..., :3])
        assert not np.allclose(first[..., 3:], second[..., 3:])

    def test_width_mismatch(self, seeded, tensor_factory):
        with pytest.raises(ContractViolationError):
            Fusion(3, seeded)(
                tensor_factory.build((1, 4, 4, 3)), tensor_factory.build((1, 4, 4, 2))
            )

    def test_gradients(self, seeded, tensor_factory, rng):
        fusion = Fusion(3, seeded)
        randomize_offsets(fusion, seeded)
        spatial = tensor_factory.build((1, 4, 4, 3))
        spectral = tensor_factory.build((1, 4, 4, 3))
        w = Tensor(rng.standard_normal((1, 4, 4, 6)))
        GradientAssertions.assert_gradients_match(
            lambda: (fusion(spatial, spectral) * w).sum(),
            [spatial, spectral] + fusion.parameters(),
        )


class TestProjectorPredictor:
    """Test the projection and prediction heads"""

    def test_projector_shape_and_sign(self, seeded, tensor_factory):
        x = tensor_factory.build((1, 5, 5, 6))
        out = projector_forward(x, Projector(6, seeded))
        assert out.shape == (1, 5, 5, 6)
        assert (out.data < 0).any()

    def test_projector_zero_weights(self, seeded, tensor_factory):
        projector = Projector(6, seeded)
        zero_weights(projector)
        out = projector(tensor_factory.build((1, 3, 3, 6)))
        np.testing.assert_array_equal(out.data, 0.0)

    def test_predictor_bottleneck(self, seeded, tensor_factory):
        predictor = Predictor(8, seeded)
        assert predictor.squeeze.conv.params.c_out == 4
        assert predictor.expand.params.c_out == 8
        z = tensor_factory.build((1, 4, 4, 8))
        p = predictor_forward(z, predictor)
        assert p.shape == z.shape

    def test_predictor_zero_weights(self, seeded, tensor_factory):
        predictor = Predictor(8, seeded)
        zero_weights(predictor)
        out = predictor(tensor_factory.build((1, 3, 3, 8)))
        np.testing.assert_array_equal(out.data, 0.0)

    def test_width_checked(self, seeded, tensor_factory):
        with pytest.raises(ContractViolationError):
            Projector(6, seeded)(tensor_factory.build((1, 3, 3, 4)))
        with pytest.raises(ContractViolationError):
            Predictor(6, seeded)(tensor_factory.build((1, 3, 3, 4)))

    def test_projector_gradients(self, seeded, tensor_factory, rng):
        projector = Projector(4, seeded)
        x = tensor_factory.build((1, 3, 4, 4))
        margin = away_from_kinks(projector, x, seeded, inputs_of=head_relu_inputs)
        assert margin > KINK_MARGIN
        w = Tensor(rng.standard_normal(x.shape))
        GradientAssertions.assert_gradients_match(
            lambda: (projector(x) * w).sum(), [x] + projector.parameters()
        )

    def test_predictor_gradients(self, seeded, tensor_factory, rng):
        predictor = Predictor(4, seeded)
        z = tensor_factory.build((1, 3, 4, 4))
        margin = away_from_kinks(predictor, z, seeded, inputs_of=head_relu_inputs)
        assert margin > KINK_MARGIN
        w = Tensor(rng.standard_normal(z.shape))
        GradientAssertions.assert_gradients_match(
            lambda: (predictor(z) * w).sum(), [z] + predictor.parameters()
        )
