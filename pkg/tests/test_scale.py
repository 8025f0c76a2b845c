"""Scale model: pyramid arithmetic, the 1-D filter, and the three sample builders."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scaletrack.errors import InvalidInputError
from scaletrack.features.base import MockProvider, provider_extract
from scaletrack.features.hog import HogConfig
from scaletrack.interpolation import resample, sample_window
from scaletrack.scale import (
    ScaleSample,
    build_scale_pyramid,
    detect_scale,
    learn_scale_filter,
    make_scale_label,
    refine_scale,
    scale_filter_terms,
    shift_label_spectrum,
    update_scale_filter,
    vectorize_feature_stack,
)
from scaletrack.scale_samples import (
    baseline_scale_sample,
    build_region_batch,
    canonical_cell_grid,
    holistic_scale_sample,
    region_scale_sample,
    region_scale_sample_single,
)

rng = np.random.default_rng(11)


class TestPyramid:
    def test_symmetric_levels_and_sizes(self):
        pyr = build_scale_pyramid(100.0, 50.0, 1.02, 17)
        assert list(pyr.levels) == list(range(-8, 9))
        sizes = pyr.level_sizes()
        assert abs(sizes[0, 0] - 100 * 1.02**-8) < 1e-12
        assert abs(sizes[0, 1] - 50 * 1.02**-8) < 1e-12
        assert np.allclose(sizes[8], [100.0, 50.0])
        assert abs(sizes[-1, 0] - 100 * 1.02**8) < 1e-12

    def test_single_level_degenerates_to_identity(self):
        pyr = build_scale_pyramid(10.0, 10.0, 1.02, 1)
        assert list(pyr.levels) == [0]
        assert np.allclose(pyr.level_sizes(), [[10.0, 10.0]])

    @given(
        st.floats(4.0, 400.0),
        st.floats(4.0, 400.0),
        st.floats(1.001, 1.2),
        st.integers(1, 33).filter(lambda n: n % 2 == 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_exact_geometric_progression(self, h, w, a, count):
        pyr = build_scale_pyramid(h, w, a, count)
        sizes = pyr.level_sizes()
        mid = count // 2
        for i, lev in enumerate(pyr.levels):
            assert np.isclose(sizes[i, 0], h * a**lev, rtol=1e-12)
            assert np.isclose(sizes[i, 1], w * a**lev, rtol=1e-12)
        assert pyr.levels[mid] == 0


class TestLabel:
    def test_peaked_at_center(self):
        lab = make_scale_label(17, 1.0625)
        assert lab[8] == 1.0
        assert np.argmax(lab) == 8

    def test_single_level(self):
        assert np.allclose(make_scale_label(1, 1.0), [1.0])


class TestFilter:
    def make(self, K=6, D=17, lam=1e-2, seed=11):
        local = np.random.default_rng(seed)
        W = local.standard_normal((K, D))
        samp = ScaleSample(matrix=W)
        lab = make_scale_label(D, 1.0625)
        return samp, lab, learn_scale_filter(samp, lab, lam)

    def test_self_detection_peaks_at_native_scale(self):
        samp, _, filt = self.make()
        pyr = build_scale_pyramid(100.0, 50.0, 1.02, 17)
        resp = detect_scale(filt, samp, pyr)
        assert np.argmax(resp.values) == 8
        assert abs(resp.level) < 0.5
        assert abs(resp.factor - 1.0) < 0.02

    def test_matches_dense_circulant_ridge(self):
        K, D, lam = 6, 17, 1e-2
        samp, lab, filt = self.make(K, D, lam)
        Wt = samp.matrix * samp.taper[None, :]

        def conv_matrix(w):
            return np.array([[w[(t - s) % D] for s in range(D)] for t in range(D)])

        A = np.hstack([conv_matrix(Wt[k]) for k in range(K)])
        h_dense = np.linalg.solve(A.T @ A + lam * np.eye(K * D), A.T @ lab).reshape(K, D)
        h_mine = np.fft.ifft(filt.filter_hat, axis=1).real
        assert np.max(np.abs(h_mine - h_dense)) < 1e-8

        pyr = build_scale_pyramid(100.0, 50.0, 1.02, D)
        resp = detect_scale(filt, samp, pyr)
        assert np.max(np.abs(resp.values - A @ h_dense.ravel())) < 1e-8

    def test_detection_equals_direct_correlation(self):
        K, D = 6, 17
        samp, _, filt = self.make(K, D)
        Z = rng.standard_normal((K, D))
        zs = ScaleSample(matrix=Z)
        pyr = build_scale_pyramid(100.0, 50.0, 1.02, D)
        resp = detect_scale(filt, zs, pyr)
        h_sp = np.fft.ifft(filt.filter_hat, axis=1).real
        Zt = Z * zs.taper[None, :]
        direct = np.zeros(D)
        for t in range(D):
            for k in range(K):
                for tau in range(D):
                    direct[t] += h_sp[k, tau] * Zt[k, (t - tau) % D]
        assert np.max(np.abs(resp.values - direct)) < 1e-10

    def test_zero_sample_degenerates_gracefully(self):
        K, D = 6, 17
        _, lab, filt = self.make(K, D)
        z0 = ScaleSample(matrix=np.zeros((K, D)))
        pyr = build_scale_pyramid(100.0, 50.0, 1.02, D)
        r0 = detect_scale(filt, z0, pyr)
        assert np.allclose(r0.values, 0.0)
        assert r0.degenerate and r0.factor == 1.0
        num0, den0, _ = scale_filter_terms(z0, lab, 1e-2)
        assert np.allclose(num0, 0.0) and np.allclose(den0, 1e-2)

    def test_update_blending(self):
        K, D, lam = 6, 17, 1e-2
        samp, lab, filt = self.make(K, D, lam)
        s2 = ScaleSample(matrix=rng.standard_normal((K, D)))
        n2, d2, _ = scale_filter_terms(s2, lab, lam)
        up0 = update_scale_filter(filt, n2, d2, 0.0)
        assert np.array_equal(up0.numerator, filt.numerator)
        assert np.array_equal(up0.denominator, filt.denominator)
        up1 = update_scale_filter(filt, n2, d2, 1.0)
        assert np.array_equal(up1.numerator, n2)
        assert np.array_equal(up1.denominator, d2)
        upb = update_scale_filter(filt, n2, d2, 0.025)
        assert np.allclose(upb.numerator, 0.975 * filt.numerator + 0.025 * n2, atol=1e-15)
        assert np.all(upb.denominator >= lam - 1e-15)
        with pytest.raises(InvalidInputError):
            update_scale_filter(filt, n2, d2, 1.5)

    def test_update_idempotence(self):
        samp, lab, filt = self.make()
        num, den, _ = scale_filter_terms(samp, lab, 1e-2)
        again = update_scale_filter(filt, num, den, 0.5)
        # learning terms of the training sample: re-blending stays at the fixpoint
        assert np.max(np.abs(again.numerator - filt.numerator)) < 1e-12
        assert np.max(np.abs(again.denominator - filt.denominator)) < 1e-12

    def test_shifted_label_shifts_the_peak(self):
        D = 17
        samp, lab, _ = self.make(6, D)
        j = 3
        filt_j = learn_scale_filter(samp, np.roll(lab, j), 1e-2)
        pyr = build_scale_pyramid(100.0, 50.0, 1.02, D)
        resp = detect_scale(filt_j, samp, pyr)
        assert np.argmax(resp.values) == 8 + j

    def test_shift_label_spectrum_equals_roll(self):
        lab = make_scale_label(17, 1.0625)
        yh = np.fft.fft(lab)
        for j in (1, -3, 5):
            shifted = np.fft.ifft(shift_label_spectrum(yh, j)).real
            assert np.max(np.abs(shifted - np.roll(lab, j))) < 1e-12

    def test_shifted_spectrum_matches_shifted_terms(self):
        samp, lab, _ = self.make()
        j = 3
        filt_j = learn_scale_filter(samp, np.roll(lab, j), 1e-2)
        numj = samp.spectrum.conj() * shift_label_spectrum(np.fft.fft(lab), j)[None, :]
        assert np.max(np.abs(numj - filt_j.numerator)) < 1e-9


class TestRefineScale:
    def test_recovers_fractional_peak(self):
        t = np.arange(32)
        vals = np.cos(2 * np.pi * (t - 10.3) / 32)
        assert abs(refine_scale(vals, 10) - 10.3) < 1e-6

    def test_degenerate_cases(self):
        assert refine_scale(np.array([3.0]), 5) == 0.0
        assert refine_scale(np.ones(9), 5) == 0.0


class TestVectorize:
    def test_column_major_over_cells_then_channels(self):
        blk = np.arange(24).reshape(2, 3, 4)
        v = vectorize_feature_stack(blk)
        assert v[0] == blk[0, 0, 0]
        assert v[1] == blk[1, 0, 0]
        assert v[2] == blk[0, 1, 0]
        assert v[6] == blk[0, 0, 1]


class TestSampleBuilders:
    def setup_method(self):
        self.img = np.random.default_rng(11).random((120, 140, 3))
        self.prov = MockProvider(stride=1, channels=6)
        self.layer = self.prov.descriptor().layers[0].layer_id
        self.fmap = provider_extract(self.prov, self.img, [self.layer])[0]
        self.pyr = build_scale_pyramid(24.0, 18.0, 1.05, 9)
        self.canon = canonical_cell_grid((24.0, 18.0), stride=1)

    def test_canonical_grid_matches_small_target(self):
        assert self.canon == (24, 18)

    def test_canonical_grid_is_capped(self):
        big = canonical_cell_grid((400.0, 300.0), stride=4)
        assert big[0] * big[1] <= 1024 + 64
        assert min(big) >= 2

    def test_all_builders_agree_on_shape(self):
        hs = holistic_scale_sample(self.fmap, (60.0, 70.0), self.pyr, self.canon)
        rs = region_scale_sample(self.img, (60.0, 70.0), self.pyr, self.prov, self.canon, self.layer)
        assert hs.matrix.shape == (24 * 18 * 6, 9)
        assert rs.matrix.shape == (24 * 18 * 6, 9)

    def test_region_batch_geometry(self):
        rb = build_region_batch(self.img, (60.0, 70.0), self.pyr, self.canon)
        assert rb.stack.shape == (24, 18, 3, 9)
        assert len(rb.rects) == 9

    def test_batched_equals_per_level_loop(self):
        rs = region_scale_sample(self.img, (60.0, 70.0), self.pyr, self.prov, self.canon, self.layer)
        rs1 = region_scale_sample_single(
            self.img, (60.0, 70.0), self.pyr, self.prov, self.canon, self.layer
        )
        assert np.array_equal(rs.matrix, rs1.matrix)

    def test_holistic_is_fractional_window_composition(self):
        hs = holistic_scale_sample(self.fmap, (60.0, 70.0), self.pyr, self.canon)
        cols = []
        for lev in range(self.pyr.count):
            sh, sw = self.pyr.level_sizes()[lev]
            win = (60.0 - sh / 2, 60.0 + sh / 2, 70.0 - sw / 2, 70.0 + sw / 2)
            cols.append(vectorize_feature_stack(sample_window(self.fmap.data, win, self.canon)))
        assert np.max(np.abs(hs.matrix - np.stack(cols, axis=1))) < 1e-12

    def test_feature_space_and_image_space_pyramids_agree(self):
        # with a linear stride-1 provider the two constructions see the same
        # content; the region path quantizes crops to whole pixels, so integral
        # levels agree tightly and the rest to sub-pixel accuracy
        hs = holistic_scale_sample(self.fmap, (60.0, 70.0), self.pyr, self.canon)
        rs = region_scale_sample(self.img, (60.0, 70.0), self.pyr, self.prov, self.canon, self.layer)
        na = np.linalg.norm(hs.matrix, axis=0) * np.linalg.norm(rs.matrix, axis=0)
        cos = np.sum(hs.matrix * rs.matrix, axis=0) / na
        assert np.all(cos > 0.95)
        center = self.pyr.count // 2
        assert np.max(np.abs(hs.matrix[:, center] - rs.matrix[:, center])) < 1e-9

    def test_zoomed_frame_peaks_at_matching_level(self):
        # rescaling the frame by a**b moves the best-matching column to level -b
        hs = holistic_scale_sample(self.fmap, (60.0, 70.0), self.pyr, self.canon)
        center = self.pyr.count // 2
        base_col = hs.matrix[:, center]
        for b in (2, -3):
            zoom = self.pyr.factor**b
            zoomed = resample(self.img, (round(120 * zoom), round(140 * zoom)))
            fmap_z = provider_extract(self.prov, zoomed, [self.layer])[0]
            hz = holistic_scale_sample(fmap_z, (60.0 * zoom, 70.0 * zoom), self.pyr, self.canon)
            sims = hz.matrix.T @ base_col / (
                np.linalg.norm(hz.matrix, axis=0) * np.linalg.norm(base_col) + 1e-12
            )
            assert np.argmax(sims) == center + b

    def test_baseline_builder_shape(self):
        gray = np.random.default_rng(12).random((100, 100))
        pyr = build_scale_pyramid(32.0, 32.0, 1.05, 7)
        bl = baseline_scale_sample(gray, (50.0, 50.0), pyr, (32, 32), HogConfig(cell_size=4))
        assert bl.matrix.shape == (8 * 8 * 31, 7)

    def test_center_outside_frame_raises(self):
        with pytest.raises(InvalidInputError):
            holistic_scale_sample(self.fmap, (500.0, 70.0), self.pyr, self.canon)
