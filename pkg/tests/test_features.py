"""Feature providers: HOG numerics, the provider contract, and name resolution."""

import numpy as np
import pytest

from scaletrack.errors import ContractError, InvalidInputError
from scaletrack.features import (
    HogProvider,
    MockProvider,
    RemoteProvider,
    resolve_provider,
)
from scaletrack.features.base import (
    FeatureMap,
    ProviderDescriptor,
    as_float_image,
    provider_extract,
    provider_extract_batch,
)
from scaletrack.features.hog import HogConfig, hog_extract

rng = np.random.default_rng(2)


class TestImageNormalization:
    def test_uint8_scaled_to_unit(self):
        img = as_float_image(np.full((4, 5), 255, dtype=np.uint8))
        assert img.shape == (4, 5, 1)
        assert np.allclose(img, 1.0)

    def test_float_passes_through(self):
        x = rng.random((3, 3, 3))
        assert np.array_equal(as_float_image(x), x)

    def test_rejects_bad_input(self):
        with pytest.raises(InvalidInputError):
            as_float_image(np.zeros((2, 2, 2, 2)))
        with pytest.raises(InvalidInputError):
            as_float_image(np.array([[np.inf]]))


class TestHog:
    def test_shape_and_stride(self):
        fm = hog_extract(rng.random((40, 48, 3)), HogConfig(cell_size=4))
        assert fm.data.shape == (10, 12, 31)
        assert fm.stride == 4.0

    def test_vertical_edges_energize_horizontal_gradient_bins(self):
        # a vertical stripe produces pure +-x gradients: both signed theta = 0
        # bins (0 and nb) fire, plus the matching contrast-insensitive bin 2*nb
        img = np.zeros((32, 32))
        img[:, 12:20] = 1.0
        fm = hog_extract(img, HogConfig(cell_size=4))
        nb = 9
        per_bin = np.abs(fm.data).sum(axis=(0, 1))
        oriented = per_bin[: 3 * nb]
        hot = {int(i) for i in np.nonzero(oriented > 1e-9)[0]}
        assert hot == {0, nb, 2 * nb}

    def test_constant_image_gives_zero_map(self):
        fm = hog_extract(np.full((16, 16), 0.5), HogConfig(cell_size=4))
        assert np.allclose(fm.data, 0.0)
        assert np.all(np.isfinite(fm.data))

    def test_values_bounded_by_truncation(self):
        fm = hog_extract(rng.random((32, 32, 3)), HogConfig(cell_size=4))
        # each channel is an average of four truncated normalizations, texture
        # channels a scaled sum of 18 truncated values
        assert fm.data[:, :, :27].max() <= 2 * 0.2 + 1e-12
        assert fm.data.min() >= 0.0

    def test_shift_by_whole_cells_shifts_map(self):
        cell = 4
        base = rng.random((48, 48))
        shifted = np.roll(base, (2 * cell, cell), axis=(0, 1))
        fa = hog_extract(base, HogConfig(cell_size=cell)).data
        fb = hog_extract(shifted, HogConfig(cell_size=cell)).data
        # interior cells (away from the wrap seam and border clamping) agree
        assert np.allclose(fa[3:-5, 3:-5], fb[5:-3, 4:-4], atol=1e-12)

    def test_too_small_patch_raises(self):
        with pytest.raises(InvalidInputError):
            hog_extract(np.zeros((3, 3)), HogConfig(cell_size=4))

    def test_config_validation(self):
        with pytest.raises(InvalidInputError):
            HogConfig(cell_size=0)
        with pytest.raises(InvalidInputError):
            HogConfig(orientations=1)
        assert HogConfig(cell_size=4).channels == 31

    def test_provider_contract_roundtrip(self):
        prov = HogProvider(HogConfig(cell_size=4))
        desc = prov.descriptor()
        assert desc.layers[0].layer_id == "hog"
        maps = provider_extract(prov, rng.random((40, 40)), ["hog"])
        assert maps[0].data.shape == (10, 10, 31)

    def test_batched_extraction_matches_loop(self):
        prov = HogProvider(HogConfig(cell_size=4))
        stack = rng.random((24, 24, 1, 3))
        out = provider_extract_batch(prov, stack, "hog")
        for d in range(3):
            single = hog_extract(stack[:, :, :, d], prov.cfg).data
            assert np.array_equal(out[:, :, :, d], single)


class TestMockProvider:
    def test_stride_one_is_identity(self):
        img = rng.random((6, 7, 2))
        fm = provider_extract(MockProvider(stride=1, channels=2), img)[0]
        assert np.allclose(fm.data, img)

    def test_stride_pools_means(self):
        img = np.arange(16, dtype=float).reshape(4, 4)
        fm = provider_extract(MockProvider(stride=2, channels=1), img)[0]
        assert np.allclose(fm.data[:, :, 0], [[2.5, 4.5], [10.5, 12.5]])

    def test_counts_calls(self):
        prov = MockProvider(stride=1, channels=1)
        provider_extract(prov, rng.random((5, 5)))
        provider_extract_batch(prov, rng.random((5, 5, 1, 3)), "identity")
        assert len(prov.single_calls) == 1
        assert len(prov.batch_calls) == 1
        prov.reset_counts()
        assert prov.single_calls == [] and prov.batch_calls == []

    def test_batch_equals_per_slice_extraction(self):
        prov = MockProvider(stride=2, channels=3)
        stack = rng.random((8, 8, 2, 4))
        out = provider_extract_batch(prov, stack, "identity")
        for d in range(4):
            single = prov.extract(stack[:, :, :, d])[0].data
            assert np.array_equal(out[:, :, :, d], single)


class TestProviderContractEnforcement:
    def test_unknown_layer_is_contract_error(self):
        with pytest.raises(ContractError):
            provider_extract(MockProvider(), rng.random((4, 4)), ["nope"])

    def test_wrong_shape_is_contract_error(self):
        class Liar(MockProvider):
            def extract(self, image, layer_ids=None):
                return [FeatureMap(np.zeros((1, 1, 1)), stride=1.0)]

        with pytest.raises(ContractError):
            provider_extract(Liar(stride=1, channels=1), rng.random((4, 4)))

    def test_nonfinite_features_are_contract_error(self):
        class Nan(MockProvider):
            def extract(self, image, layer_ids=None):
                fm = super().extract(image, layer_ids)[0]
                data = fm.data.copy()
                data[0, 0, 0] = np.nan
                return [FeatureMap(data, stride=fm.stride)]

        with pytest.raises(ContractError):
            provider_extract(Nan(stride=1, channels=1), rng.random((4, 4)))

    def test_descriptor_json_roundtrip(self):
        desc = MockProvider(stride=2, channels=5).descriptor()
        back = ProviderDescriptor.from_json(desc.to_json())
        assert back == desc
        with pytest.raises(InvalidInputError):
            ProviderDescriptor.from_json("{}")


class TestRegistry:
    def test_names(self):
        assert isinstance(resolve_provider("hog", env={}), HogProvider)
        assert resolve_provider("hog:8", env={}).cfg.cell_size == 8
        mock = resolve_provider("mock:2,6", env={})
        assert isinstance(mock, MockProvider)
        assert mock.descriptor().layers[0].stride == 2
        assert mock.descriptor().layers[0].channels == 6
        remote = resolve_provider("remote:localhost:9000", env={})
        assert isinstance(remote, RemoteProvider)

    def test_environment_override_wins(self):
        prov = resolve_provider("hog", env={"SCALETRACK_PROVIDER": "mock:1,2"})
        assert isinstance(prov, MockProvider)
        # empty override is ignored
        assert isinstance(resolve_provider("hog", env={"SCALETRACK_PROVIDER": ""}), HogProvider)

    def test_bad_names_raise(self):
        for bad in ("", "nope", "mock:x", "remote:nohost"):
            with pytest.raises(InvalidInputError):
                resolve_provider(bad, env={})
