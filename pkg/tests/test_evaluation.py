"""Sequence loading, overlap/error metrics, curves, and report aggregation."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from scaletrack.errors import IngestionError, InvalidInputError
from scaletrack.evaluation import (
    EvalReport,
    center_error,
    curve_csv,
    evaluate,
    find_frames,
    iou,
    load_ground_truth,
    load_sequence,
    precision_curve,
    score_sequence,
    success_curve,
)
from scaletrack.synthetic import synth_sequence, write_sequence


class TestLoading:
    def test_round_trip(self, tmp_path):
        seq = synth_sequence("zoom", frame_size=(120, 150), object_size=(36.0, 36.0), length=5, seed=0)
        write_sequence(seq, tmp_path / "seq")
        back = load_sequence(tmp_path / "seq")
        assert len(back) == len(seq)
        assert np.allclose(back.boxes, seq.boxes, atol=2e-4)
        assert all(np.array_equal(back.frame(i), seq.frame(i)) for i in range(len(seq)))
        assert back.attributes == seq.attributes

    def test_ground_truth_separators(self, tmp_path):
        rows = np.array([[10.5, 20.0, 30.0, 40.0], [11.0, 21.0, 30.0, 40.0]])
        for sep in (",", "\t", ";"):
            path = tmp_path / "gt.txt"
            path.write_text("\n".join(sep.join(f"{v:.4f}" for v in r) for r in rows))
            loaded = load_ground_truth(path)
            # stored 1-indexed, loaded 0-indexed
            assert np.allclose(loaded[:, :2], rows[:, :2] - 1.0)
            assert np.allclose(loaded[:, 2:], rows[:, 2:])

    def test_frame_box_count_mismatch(self, tmp_path):
        seq = synth_sequence("static", length=3, seed=1)
        write_sequence(seq, tmp_path / "seq")
        (tmp_path / "seq" / "groundtruth_rect.txt").write_text("1,1,10,10\n")
        with pytest.raises(IngestionError):
            load_sequence(tmp_path / "seq")

    def test_missing_directory(self, tmp_path):
        with pytest.raises(IngestionError):
            load_sequence(tmp_path / "nothing")

    def test_find_frames_requires_images(self, tmp_path):
        (tmp_path / "img").mkdir()
        with pytest.raises(IngestionError):
            find_frames(tmp_path)


class TestMetrics:
    def test_iou_reference_points(self):
        assert iou([0, 0, 10, 10.0], [0, 0, 10, 10.0]) == 1.0
        assert iou([0, 0, 10, 10.0], [20, 20, 10, 10.0]) == 0.0
        assert np.isclose(iou([0, 0, 10, 10.0], [5, 0, 10, 10.0]), 50 / 150)

    def test_center_error_is_euclidean(self):
        assert np.isclose(center_error([0, 0, 2, 2.0], [3, 4, 2, 2.0]), 5.0)
        assert center_error([1, 1, 4, 4.0], [1, 1, 4, 4.0]) == 0.0

    def test_iou_symmetry_and_bounds(self):
        local = np.random.default_rng(5)
        for _ in range(50):
            a = [*local.uniform(0, 50, 2), *local.uniform(1, 30, 2)]
            b = [*local.uniform(0, 50, 2), *local.uniform(1, 30, 2)]
            v = iou(a, b)
            assert 0.0 <= v <= 1.0
            assert np.isclose(v, iou(b, a))


class TestCurves:
    def test_known_precision_point(self):
        prec = precision_curve(np.array([5.0, 15.0, 25.0, 35.0]))
        assert prec.shape == (51,)
        assert prec[20] == 0.5

    def test_known_success_point(self):
        succ = success_curve(np.array([1.0, 0.6, 0.4, 0.0]))
        assert succ.shape == (101,)
        assert succ[50] == 0.5

    def test_success_threshold_is_strict(self):
        # an overlap exactly at the threshold does not count as a success
        assert success_curve(np.array([0.5]))[50] == 0.0

    def test_precision_threshold_is_inclusive(self):
        assert precision_curve(np.array([20.0]))[20] == 1.0

    @given(
        hnp.arrays(
            dtype=np.float64,
            shape=st.integers(1, 64),
            elements=st.floats(0, 60, allow_nan=False),
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_precision_curves_monotone_nondecreasing(self, errors):
        prec = precision_curve(errors)
        assert np.all(np.diff(prec) >= 0)
        assert 0.0 <= prec.min() and prec.max() <= 1.0

    @given(
        hnp.arrays(
            dtype=np.float64,
            shape=st.integers(1, 64),
            elements=st.floats(0, 1, allow_nan=False),
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_success_curves_monotone_nonincreasing(self, overlaps):
        succ = success_curve(overlaps)
        assert np.all(np.diff(succ) <= 0)
        assert succ[0] <= 1.0 and succ[-1] >= 0.0


class TestReports:
    def make_report(self):
        seq = synth_sequence("zoom", frame_size=(160, 200), object_size=(40.0, 40.0), length=6, seed=0)
        pred = seq.boxes.copy()
        pred[:, 0] += 3.0
        return evaluate([pred], [seq]), seq

    def test_shifted_prediction_scores(self):
        rep, seq = self.make_report()
        assert [s.name for s in rep.per_sequence] == [seq.name]
        assert np.isclose(rep.per_sequence[0].errors.mean(), 3.0)
        assert np.isclose(rep.per_sequence[0].precision_at_20, 1.0)
        assert 0.0 <= rep.auc <= 1.0
        assert "SV" in rep.attribute_reports

    def test_report_serialization(self):
        rep, seq = self.make_report()
        doc = rep.to_dict()
        assert doc["sequences"][0]["name"] == seq.name
        assert len(doc["precision_curve"]) == 51
        assert len(doc["success_curve"]) == 101
        parsed = json.loads(rep.to_json())
        assert parsed["precision_at_20"] == doc["precision_at_20"]

    def test_frame_weighted_aggregation(self):
        a = synth_sequence("static", frame_size=(120, 160), object_size=(30.0, 30.0), length=8, seed=1)
        b = synth_sequence("static", frame_size=(120, 160), object_size=(30.0, 30.0), length=2, seed=2)
        perfect = a.boxes.copy()
        bad = b.boxes + np.array([100.0, 0.0, 0.0, 0.0])
        rep = evaluate([perfect, bad], [a, b])
        # aggregate precision is weighted by frame count: 8 perfect, 2 hopeless
        assert np.isclose(rep.precision_at_20, 0.8)

    def test_input_order_does_not_matter(self):
        a = synth_sequence("static", frame_size=(120, 160), object_size=(30.0, 30.0), length=4, seed=1, name="bb")
        b = synth_sequence("drift", frame_size=(120, 160), object_size=(30.0, 30.0), length=4, seed=2, name="aa")
        r1 = evaluate([a.boxes, b.boxes], [a, b])
        r2 = evaluate([b.boxes, a.boxes], [b, a])
        assert r1.to_json() == r2.to_json()

    def test_mismatched_lengths_raise(self):
        seq = synth_sequence("static", length=4, seed=0)
        with pytest.raises(InvalidInputError):
            score_sequence(seq.boxes[:2], seq)
        with pytest.raises(InvalidInputError):
            evaluate([seq.boxes], [])


class TestCurveCsv:
    def test_format(self):
        text = curve_csv(np.array([0.0, 1.0]), np.array([0.5, 0.25]))
        lines = text.strip().split("\n")
        assert lines[0] == "threshold,value"
        assert lines[1] == "0,0.5"
        assert lines[2] == "1,0.25"
