import tempfile
from pathlib import Path

import numpy as np

from scaletrack.errors import IngestionError, InvalidInputError
from scaletrack.evaluation import (
    EvalReport,
    Sequence,
    center_error,
    evaluate,
    iou,
    load_sequence,
    precision_curve,
    success_curve,
)
from scaletrack.synthetic import SYNTH_KINDS, synth_sequence, write_sequence

ok = lambda name, cond: print(("PASS " if cond else "FAIL ") + name) or (cond or (_ for _ in ()).throw(AssertionError(name)))

# --- synthetic arithmetic ------------------------------------------------------
z = synth_sequence("zoom", frame_size=(460, 500), object_size=(50.0, 50.0), rate=1.02, length=10, seed=0)
ok("zoom final size = 50*1.02^9", np.allclose(z.boxes[-1][2:], 50.0 * 1.02**9))
ok("zoom centers fixed", np.allclose(z.boxes[:, :2] + z.boxes[:, 2:] / 2, z.boxes[0, :2] + z.boxes[0, 2:] / 2))

d = synth_sequence("drift", frame_size=(160, 260), object_size=(40.0, 40.0), drift=(2.0, 0.0), length=10, seed=0)
ok("drift displacement = (18, 0)", np.allclose(d.boxes[-1][:2] - d.boxes[0][:2], [18.0, 0.0]))
ok("drift size constant", np.allclose(d.boxes[:, 2:], 40.0))

s = synth_sequence("static", length=5, seed=3)
ok("static identical boxes", np.all(s.boxes == s.boxes[0]))
ok("static identical frames", all(np.array_equal(f, s.frames[0]) for f in s.frames))

s2 = synth_sequence("static", length=5, seed=3)
ok("determinism across calls", all(np.array_equal(a, b) for a, b in zip(s.frames, s2.frames)))

try:
    synth_sequence("zoom", frame_size=(100, 100), object_size=(90.0, 90.0), rate=1.02, length=30)
    ok("object-too-large raises", False)
except InvalidInputError:
    ok("object-too-large raises", True)

try:
    synth_sequence("spin")
    ok("unknown kind raises", False)
except InvalidInputError:
    ok("unknown kind raises", True)

ok("kinds tuple", SYNTH_KINDS == ("static", "zoom", "drift", "zoom+drift"))
ok("attributes", z.attributes == ("SV",) and d.attributes == ("FM",))

# --- write / load round trip ---------------------------------------------------
with tempfile.TemporaryDirectory() as td:
    out = Path(td) / "seq"
    write_sequence(z, out)
    back = load_sequence(out)
    ok("round trip frame count", len(back) == len(z))
    ok("round trip boxes (to 1e-4)", np.allclose(back.boxes, z.boxes, atol=2e-4))
    ok("round trip frames bit-identical", all(np.array_equal(back.frame(i), z.frame(i)) for i in range(len(z))))
    ok("round trip attributes", back.attributes == z.attributes)

    # parse variants: whitespace/tab separated ground truth
    (out / "groundtruth_rect.txt").write_text("\n".join("\t".join(f"{v:.4f}" for v in row) for row in z.boxes + [1, 1, 0, 0]))
    back2 = load_sequence(out)
    ok("tab-separated ground truth parses", np.allclose(back2.boxes, z.boxes, atol=2e-4))

    # mismatched row count -> error
    (out / "groundtruth_rect.txt").write_text("1,1,10,10\n")
    try:
        load_sequence(out)
        ok("frame/box count mismatch raises", False)
    except IngestionError:
        ok("frame/box count mismatch raises", True)

# --- metrics -------------------------------------------------------------------
ok("iou identical = 1", iou([0, 0, 10, 10.0], [0, 0, 10, 10.0]) == 1.0)
ok("iou disjoint = 0", iou([0, 0, 10, 10.0], [20, 20, 10, 10.0]) == 0.0)
ok("iou half-shift", np.isclose(iou([0, 0, 10, 10.0], [5, 0, 10, 10.0]), 50 / 150))
ok("center error 3-4-5", np.isclose(center_error([0, 0, 2, 2.0], [3, 4, 2, 2.0]), 5.0))

prec = precision_curve(np.array([5.0, 15.0, 25.0, 35.0]))
ok("precision@20 = 0.5", np.isclose(prec[20], 0.5))
succ = success_curve(np.array([1.0, 0.6, 0.4, 0.0]))
ok("success@0.5 = 0.5", np.isclose(succ[50], 0.5))
ok("precision non-decreasing", np.all(np.diff(prec) >= 0))
ok("success non-increasing", np.all(np.diff(succ) <= 0))
ok("curves in [0,1]", prec.min() >= 0 and prec.max() <= 1 and succ.min() >= 0 and succ.max() <= 1)

# --- evaluate() end to end -----------------------------------------------------
pred = z.boxes.copy()
pred[:, 0] += 3.0
rep = evaluate([pred], [z])
ok("evaluate returns report", isinstance(rep, EvalReport))
ok("report covers sequence", [s.name for s in rep.per_sequence] == [z.name])
ok("mean center error = 3", np.isclose(rep.per_sequence[0].errors.mean(), 3.0))
ok("precision@20 = 1 for 3px error", np.isclose(rep.per_sequence[0].precision_at_20, 1.0))
ok("auc in [0,1]", 0.0 <= rep.auc <= 1.0)
ok("SV attribute cut present", "SV" in rep.attribute_reports)

print("ALL EVAL/SYNTH CHECKS PASSED")
