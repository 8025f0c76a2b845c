import time

import numpy as np

from scaletrack.synthetic import synth_sequence
from scaletrack.tracking import TrackerConfig, track_sequence

ok = lambda name, cond: print(("PASS " if cond else "FAIL ") + name) or (cond or (_ for _ in ()).throw(AssertionError(name)))

# --- zoom: 2%/frame, 60 frames (criterion 5 geometry) -------------------------
seq = synth_sequence("zoom", frame_size=(460, 500), object_size=(128.0, 128.0), rate=1.02, length=60, seed=1)
print(f"zoom sequence: {len(seq)} frames, init {seq.boxes[0]}, final size {seq.boxes[-1][2]:.1f}")

for method in ("hrsem", "rrsem", "dsst"):
    cfg = TrackerConfig(method=method)
    t0 = time.perf_counter()
    res = track_sequence(seq, seq.boxes[0], cfg)
    dt = time.perf_counter() - t0
    est_area = res.boxes[:, 2] * res.boxes[:, 3]
    gt_area = seq.boxes[:, 2] * seq.boxes[:, 3]
    ratio = est_area / gt_area
    final_scale = np.sqrt(ratio[-1])
    print(
        f"  zoom {method}: {dt:.1f}s ({len(seq)/dt:.1f} fps) "
        f"area ratio range [{ratio.min():.3f}, {ratio.max():.3f}] final side drift {abs(final_scale-1)*100:.2f}%"
    )
    if method in ("hrsem", "rrsem"):
        ok(f"zoom {method}: per-frame area within ±10%", np.all(ratio >= 0.9) and np.all(ratio <= 1.1))
        ok(f"zoom {method}: cumulative drift < 10% at frame 60", abs(final_scale - 1) < 0.10)
        ok(f"zoom {method}: runtime < 60 s", dt < 60)

# --- drift: 2 px/frame, 50 frames (criterion 6 geometry) ------------------------
seqd = synth_sequence("drift", frame_size=(160, 260), object_size=(40.0, 44.0), drift=(2.0, 0.0), length=50, seed=2)
for method in ("hrsem", "rrsem"):
    cfg = TrackerConfig(method=method)
    res = track_sequence(seqd, seqd.boxes[0], cfg)
    pred_c = res.boxes[:, :2] + res.boxes[:, 2:] / 2
    gt_c = seqd.boxes[:, :2] + seqd.boxes[:, 2:] / 2
    errors = np.hypot(*(pred_c - gt_c).T)
    side_ratio = np.sqrt(res.boxes[:, 2] * res.boxes[:, 3] / (seqd.boxes[:, 2] * seqd.boxes[:, 3]))
    print(f"  drift {method}: mean err {errors.mean():.2f}px max {errors.max():.2f}px, scale drift {abs(side_ratio-1).max()*100:.2f}%")
    ok(f"drift {method}: mean center error < 3 px", errors.mean() < 3.0)
    ok(f"drift {method}: scale drift < 5%", np.all(np.abs(side_ratio - 1) < 0.05))

print("ALL ZOOM/DRIFT CHECKS PASSED")
