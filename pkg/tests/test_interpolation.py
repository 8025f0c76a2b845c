"""Cubic resampling, fractional-window sampling, and crop geometry."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scaletrack.errors import InvalidInputError
from scaletrack.interpolation import (
    KERNEL_SHARPNESS,
    center_rect,
    crop_and_resample,
    crop_replicate,
    cubic_kernel,
    resample,
    round_half_away,
    sample_window,
)

rng = np.random.default_rng(1)


class TestCubicKernel:
    def test_interpolating_property(self):
        # 1 at the origin, 0 at every other integer
        assert cubic_kernel(0.0) == 1.0
        assert cubic_kernel(1.0) == 0.0
        assert cubic_kernel(2.0) == 0.0
        assert cubic_kernel(-1.0) == 0.0
        assert cubic_kernel(3.5) == 0.0

    def test_partition_of_unity(self):
        for frac in np.linspace(0.0, 1.0, 41):
            taps = cubic_kernel(frac - np.array([-1, 0, 1, 2]))
            assert abs(taps.sum() - 1.0) < 1e-12

    def test_half_offset_values(self):
        # at s = 1/2 and 3/2 the a = -0.75 kernel takes its classic values
        a = KERNEL_SHARPNESS
        assert np.isclose(cubic_kernel(0.5), (a + 2) / 8 - (a + 3) / 4 + 1)
        assert np.isclose(cubic_kernel(1.5), a * (27 / 8 - 45 / 4 + 12 - 4))

    def test_even_symmetry(self):
        s = np.linspace(-2, 2, 81)
        assert np.allclose(cubic_kernel(s), cubic_kernel(-s))


class TestResample:
    def test_identity_at_same_shape(self):
        x = rng.standard_normal((9, 7, 3))
        assert np.array_equal(resample(x, (9, 7)), x)

    def test_constant_preserved(self):
        x = np.full((6, 11), 3.25)
        out = resample(x, (13, 5))
        assert np.max(np.abs(out - 3.25)) < 1e-12

    def test_linear_ramp_exact_at_double_resolution(self):
        # 2x upsampling evaluates the kernel at offsets {0, 1/2} only, where the
        # cubic family reproduces linear signals exactly away from the borders
        n = 8
        x = np.arange(n, dtype=float)[:, None] * np.ones((1, n))
        out = resample(x, (2 * n, 2 * n))
        coords = np.arange(2 * n) * (n / (2 * n))
        interior = (coords >= 1.0) & (coords <= n - 2.0)
        expected = coords[:, None] * np.ones((1, 2 * n))
        assert np.max(np.abs(out[interior] - expected[interior])) < 1e-12

    def test_channels_resampled_independently(self):
        x = rng.standard_normal((10, 10, 4))
        out = resample(x, (5, 7))
        for c in range(4):
            assert np.allclose(out[:, :, c], resample(x[:, :, c], (5, 7)))

    def test_rejects_bad_shapes(self):
        with pytest.raises(InvalidInputError):
            resample(np.zeros((4,)), (2, 2))
        with pytest.raises(InvalidInputError):
            resample(np.zeros((4, 4)), (0, 2))

    @given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 18), st.integers(1, 18))
    @settings(max_examples=60, deadline=None)
    def test_constant_signal_survives_any_resize(self, h, w, h2, w2):
        out = resample(np.full((h, w), 2.5), (h2, w2))
        assert out.shape == (h2, w2)
        assert np.max(np.abs(out - 2.5)) < 1e-9


class TestSampleWindow:
    def test_full_integer_window_is_identity(self):
        x = rng.standard_normal((8, 6))
        out = sample_window(x, (0.0, 8.0, 0.0, 6.0), (8, 6))
        assert np.max(np.abs(out - x)) < 1e-12

    def test_matches_dense_per_axis_weights(self):
        # the window sampler is exactly two per-axis weight products
        x = rng.standard_normal((10, 9, 2))
        window = (1.3, 7.9, 0.6, 8.1)
        out = sample_window(x, window, (5, 6))
        y0, y1, x0, x1 = window

        def axis_weights(n_src, n_dst, start, step):
            w = np.zeros((n_dst, n_src))
            for j in range(n_dst):
                pos = start + j * step
                base = int(np.floor(pos))
                for k in range(base - 1, base + 3):
                    w[j, min(max(k, 0), n_src - 1)] += float(cubic_kernel(pos - k))
            return w

        wy = axis_weights(10, 5, y0, (y1 - y0) / 5)
        wx = axis_weights(9, 6, x0, (x1 - x0) / 6)
        dense = np.einsum("ab,cd,bde->ace", wy, wx, x)
        assert np.max(np.abs(out - dense)) < 1e-12

    def test_subsample_windows_differ(self):
        # windows separated by less than one sample still give distinct crops
        x = rng.standard_normal((16, 16))
        a = sample_window(x, (4.0, 12.0, 4.0, 12.0), (8, 8))
        b = sample_window(x, (4.3, 12.3, 4.0, 12.0), (8, 8))
        assert not np.allclose(a, b)

    def test_border_taps_read_true_neighbors(self):
        # an interior window uses samples beyond its edge, not replication
        x = np.zeros((12, 12))
        x[2, :] = 100.0  # just outside a window starting at row 3
        inner = sample_window(x, (3.5, 9.5, 3.0, 9.0), (6, 6))
        assert np.abs(inner).max() > 0.0  # tap at floor(3.5)-1 == row 2 is read

    def test_rejects_degenerate_window(self):
        with pytest.raises(InvalidInputError):
            sample_window(np.zeros((4, 4)), (2.0, 2.0, 0.0, 4.0), (2, 2))
        with pytest.raises(InvalidInputError):
            sample_window(np.zeros((4, 4)), (0.0, 4.0, 0.0, 4.0), (0, 2))


class TestCropGeometry:
    def test_round_half_away(self):
        assert round_half_away(0.5) == 1
        assert round_half_away(-0.5) == -1
        assert round_half_away(2.5) == 3
        assert round_half_away(1.4) == 1
        assert np.array_equal(round_half_away(np.array([0.5, 1.5, -1.5])), [1, 2, -2])

    def test_center_rect_centers_and_sizes(self):
        y0, y1, x0, x1 = center_rect((10.0, 20.0), (6.0, 8.0))
        assert (y0, y1, x0, x1) == (7, 13, 16, 24)

    def test_center_rect_widens_degenerate_side(self):
        y0, y1, x0, x1 = center_rect((5.0, 5.0), (0.5, 10.0))
        assert y1 - y0 == 2

    def test_crop_replicate_inside(self):
        x = rng.standard_normal((6, 6))
        assert np.array_equal(crop_replicate(x, (1, 4, 2, 5)), x[1:4, 2:5])

    def test_crop_replicate_edges(self):
        x = np.arange(9, dtype=float).reshape(3, 3)
        out = crop_replicate(x, (-2, 1, 0, 3))
        assert np.array_equal(out[0], x[0]) and np.array_equal(out[1], x[0])
        out_r = crop_replicate(x, (0, 3, 2, 5))
        assert np.array_equal(out_r[:, 1], x[:, 2]) and np.array_equal(out_r[:, 2], x[:, 2])

    def test_crop_replicate_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            crop_replicate(np.zeros((3, 3)), (2, 2, 0, 3))

    def test_crop_and_resample_is_exact_composition(self):
        x = rng.standard_normal((14, 11, 3))
        rect = (-2, 9, 3, 12)
        lhs = crop_and_resample(x, rect, (7, 5))
        rhs = resample(crop_replicate(x, rect), (7, 5))
        assert np.array_equal(lhs, rhs)
