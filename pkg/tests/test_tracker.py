"""Tracker pipeline: configuration, init contracts, provider accounting, determinism."""

import numpy as np
import pytest

from scaletrack.errors import InvalidInputError
from scaletrack.features.base import MockProvider
from scaletrack.synthetic import synth_sequence
from scaletrack.tracking import METHODS, Tracker, TrackerConfig, track_sequence


@pytest.fixture(scope="module")
def static_seq():
    return synth_sequence("static", frame_size=(120, 160), object_size=(40.0, 44.0), length=8, seed=3)


def mock_config(method="hrsem"):
    return TrackerConfig(method=method, provider="mock", scale_count=9, projected_channels=6)


class TestConfig:
    def test_defaults_are_valid(self):
        cfg = TrackerConfig()
        cfg.validate()
        assert cfg.method in METHODS
        assert cfg.scale_factor == 1.02
        assert cfg.scale_count == 17
        assert cfg.learning_rate == 0.025

    def test_dict_round_trip(self):
        cfg = TrackerConfig.from_dict({"method": "rrsem", "scale_count": 9})
        assert cfg.method == "rrsem" and cfg.scale_count == 9
        assert TrackerConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_key_raises_with_its_name(self):
        with pytest.raises(InvalidInputError) as err:
            TrackerConfig.from_dict({"methd": "hrsem"})
        assert "methd" in str(err.value)

    def test_invalid_values_raise(self):
        with pytest.raises(InvalidInputError):
            TrackerConfig(method="nope").validate()
        with pytest.raises(InvalidInputError):
            TrackerConfig(scale_factor=0.9).validate()
        with pytest.raises(InvalidInputError):
            TrackerConfig(learning_rate=2.0).validate()
        with pytest.raises(InvalidInputError):
            TrackerConfig(scale_count=0).validate()

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"method": "dsst", "cell_size": 8}')
        cfg = TrackerConfig.from_file(path)
        assert cfg.method == "dsst" and cfg.cell_size == 8


class TestInit:
    def test_preserves_box(self, static_seq):
        tr = Tracker(static_seq.frame(0), static_seq.boxes[0], mock_config(), provider=MockProvider(4, 8))
        assert np.allclose(tr.box, static_seq.boxes[0])

    def test_rejects_degenerate_box(self, static_seq):
        with pytest.raises(InvalidInputError):
            Tracker(static_seq.frame(0), (10, 10, 1, 1), mock_config(), provider=MockProvider(4, 8))

    def test_rejects_box_outside_frame(self, static_seq):
        with pytest.raises(InvalidInputError):
            Tracker(static_seq.frame(0), (150, 10, 40, 40), mock_config(), provider=MockProvider(4, 8))

    def test_deterministic(self, static_seq):
        frame0, box0 = static_seq.frame(0), static_seq.boxes[0]
        a = Tracker(frame0, box0, mock_config(), provider=MockProvider(4, 8))
        b = Tracker(frame0, box0, mock_config(), provider=MockProvider(4, 8))
        assert np.array_equal(a.filter.filter_hat, b.filter.filter_hat)
        assert np.array_equal(a.scale_filter.numerator, b.scale_filter.numerator)


class TestStep:
    def test_identical_frame_stays_put(self, static_seq):
        frame0, box0 = static_seq.frame(0), static_seq.boxes[0]
        tr = Tracker(frame0, box0, mock_config(), provider=MockProvider(4, 8))
        box1, info = tr.step(frame0)
        assert np.max(np.abs(box1 - box0)) < 1.0
        assert set(info) >= {"score", "scale_factor", "low_confidence"}

    def test_single_scale_level_keeps_size_constant(self, static_seq):
        cfg = TrackerConfig(method="hrsem", provider="mock", scale_count=1, projected_channels=4)
        tr = Tracker(static_seq.frame(0), static_seq.boxes[0], cfg, provider=MockProvider(4, 8))
        box, info = tr.step(static_seq.frame(1))
        assert info["scale_factor"] == 1.0
        assert abs(box[2] - static_seq.boxes[0][2]) < 1e-9


class TestProviderAccounting:
    def n_full_frame(self, calls, shape):
        return sum(1 for s in calls if s[:2] == shape)

    def test_holistic_method_extracts_full_frame_once_per_step(self, static_seq):
        frame0, box0 = static_seq.frame(0), static_seq.boxes[0]
        mock = MockProvider(stride=4, channels=8)
        tr = Tracker(frame0, box0, mock_config("hrsem"), provider=mock)
        mock.reset_counts()
        n_steps = 4
        for i in range(1, 1 + n_steps):
            tr.step(static_seq.frame(i))
        assert self.n_full_frame(mock.single_calls, frame0.shape[:2]) == n_steps
        assert len(mock.single_calls) == n_steps
        assert len(mock.batch_calls) == 0

    def test_region_method_extracts_one_batch_per_step(self, static_seq):
        frame0, box0 = static_seq.frame(0), static_seq.boxes[0]
        mock = MockProvider(stride=4, channels=8)
        tr = Tracker(frame0, box0, mock_config("rrsem"), provider=mock)
        mock.reset_counts()
        n_steps = 4
        for i in range(1, 1 + n_steps):
            tr.step(static_seq.frame(i))
        assert len(mock.batch_calls) == n_steps
        assert all(s[3] == 9 for s in mock.batch_calls)
        assert len(mock.single_calls) == n_steps  # the translation search patch

    def test_baseline_method_reextracts_every_level(self, static_seq, monkeypatch):
        import scaletrack.scale_samples as samples

        frame0, box0 = static_seq.frame(0), static_seq.boxes[0]
        calls = []
        real = samples.hog_extract
        monkeypatch.setattr(samples, "hog_extract", lambda patch, cfg: calls.append(1) or real(patch, cfg))
        mock = MockProvider(stride=4, channels=8)
        cfg = TrackerConfig(method="dsst", provider="mock", scale_count=9, projected_channels=6)
        tr = Tracker(frame0, box0, cfg, provider=mock)
        mock.reset_counts()
        calls.clear()
        n_steps = 2
        for i in range(1, 1 + n_steps):
            tr.step(static_seq.frame(i))
        # the deliberately unbatched baseline: one per-level extraction for each
        # of the 9 pyramid levels on every scale pass, never a batched call
        assert len(mock.batch_calls) == 0
        assert len(calls) > 0 and len(calls) % 9 == 0
        assert len(mock.single_calls) == n_steps  # translation search only


class TestTrackSequence:
    def test_first_box_is_init_and_runs_are_identical(self, static_seq):
        res1 = track_sequence(static_seq, static_seq.boxes[0], mock_config(), provider=MockProvider(4, 8))
        res2 = track_sequence(static_seq, static_seq.boxes[0], mock_config(), provider=MockProvider(4, 8))
        assert np.array_equal(res1.boxes[0], static_seq.boxes[0])
        assert np.array_equal(res1.boxes, res2.boxes)
        assert np.array_equal(res1.scale_factors, res2.scale_factors)

    def test_single_frame_sequence(self, static_seq):
        res = track_sequence([static_seq.frame(0)], static_seq.boxes[0], mock_config(), provider=MockProvider(4, 8))
        assert res.boxes.shape == (1, 4)
        assert np.array_equal(res.boxes[0], static_seq.boxes[0])
        assert np.isnan(res.scores[0])

    def test_result_bookkeeping(self, static_seq):
        res = track_sequence(static_seq, static_seq.boxes[0], mock_config(), provider=MockProvider(4, 8))
        n = len(static_seq)
        assert res.boxes.shape == (n, 4)
        assert len(res.scores) == n and len(res.scale_factors) == n
        assert len(res.low_confidence) == n and len(res.frame_times) == n
        assert res.fps > 0

    def test_empty_sequence_raises(self, static_seq):
        with pytest.raises(InvalidInputError):
            track_sequence([], static_seq.boxes[0], mock_config())


class TestTrackingQuality:
    def test_static_scene_box_stays_fixed(self):
        seq = synth_sequence("static", frame_size=(120, 160), object_size=(40.0, 44.0), length=10, seed=5)
        for method in ("hrsem", "rrsem"):
            res = track_sequence(seq, seq.boxes[0], TrackerConfig(method=method))
            drift = np.max(np.abs(res.boxes - seq.boxes[0][None, :]))
            assert drift < 1.0, f"{method} drifted {drift:.2f}px on a static scene"
