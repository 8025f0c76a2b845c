import numpy as np

from scaletrack.errors import InvalidInputError
from scaletrack.features.base import MockProvider
from scaletrack.synthetic import synth_sequence
from scaletrack.tracking import Tracker, TrackerConfig, track_sequence

ok = lambda name, cond: print(("PASS " if cond else "FAIL ") + name) or (cond or (_ for _ in ()).throw(AssertionError(name)))

seq = synth_sequence("static", frame_size=(120, 160), object_size=(40.0, 44.0), length=8, seed=3)
init_box = seq.boxes[0]

# --- config plumbing ---------------------------------------------------------
cfg = TrackerConfig.from_dict({"method": "hrsem", "scale_count": 9})
ok("config from_dict", cfg.scale_count == 9 and cfg.scale_factor == 1.02)
try:
    TrackerConfig.from_dict({"methd": "hrsem"})
    ok("config unknown key raises", False)
except InvalidInputError as exc:
    ok("config unknown key raises", "methd" in str(exc))
try:
    TrackerConfig(method="nope").validate()
    ok("config bad method raises", False)
except InvalidInputError:
    ok("config bad method raises", True)

# --- init contracts -----------------------------------------------------------
frame0 = seq.frame(0)
mock = MockProvider(stride=4, channels=8)
cfg_m = TrackerConfig(method="hrsem", provider="mock", scale_count=9, projected_channels=6)
tr = Tracker(frame0, init_box, cfg_m, provider=mock)
ok("init box preserved", np.allclose(tr.box, init_box))
try:
    Tracker(frame0, (10, 10, 1, 1), cfg_m, provider=MockProvider(4, 8))
    ok("degenerate box raises", False)
except InvalidInputError:
    ok("degenerate box raises", True)
try:
    Tracker(frame0, (150, 10, 40, 40), cfg_m, provider=MockProvider(4, 8))
    ok("out-of-frame box raises", False)
except InvalidInputError:
    ok("out-of-frame box raises", True)

# D=1 degenerates to constant scale
cfg_d1 = TrackerConfig(method="hrsem", provider="mock", scale_count=1, projected_channels=4)
tr_d1 = Tracker(frame0, init_box, cfg_d1, provider=MockProvider(4, 8))
b, info = tr_d1.step(seq.frame(1))
ok("D=1 constant scale", info["scale_factor"] == 1.0 and abs(b[2] - init_box[2]) < 1e-9)

# two inits bit-identical
t_a = Tracker(frame0, init_box, cfg_m, provider=MockProvider(4, 8))
t_b = Tracker(frame0, init_box, cfg_m, provider=MockProvider(4, 8))
ok(
    "init determinism",
    np.array_equal(t_a.filter.filter_hat, t_b.filter.filter_hat)
    and np.array_equal(t_a.scale_filter.numerator, t_b.scale_filter.numerator),
)

# single step on the identical frame: box within 1 px of init
tr2 = Tracker(frame0, init_box, cfg_m, provider=MockProvider(4, 8))
box1, _ = tr2.step(frame0)
ok("identical-frame step stays put", np.max(np.abs(box1 - init_box)) < 1.0)

# --- provider-call accounting --------------------------------------------------
fh, fw = frame0.shape[:2]
mock_h = MockProvider(stride=4, channels=8)
cfg_h = TrackerConfig(method="hrsem", provider="mock", scale_count=9, projected_channels=6)
tr_h = Tracker(frame0, init_box, cfg_h, provider=mock_h)
mock_h.reset_counts()
n_steps = 4
for i in range(1, 1 + n_steps):
    tr_h.step(seq.frame(i))
full_frame_calls = [s for s in mock_h.single_calls if s[:2] == (fh, fw)]
ok(
    "hrsem: exactly one full-frame extraction per frame, no batches",
    len(full_frame_calls) == n_steps
    and len(mock_h.single_calls) == n_steps
    and len(mock_h.batch_calls) == 0,
)

mock_r = MockProvider(stride=4, channels=8)
cfg_r = TrackerConfig(method="rrsem", provider="mock", scale_count=9, projected_channels=6)
tr_r = Tracker(frame0, init_box, cfg_r, provider=mock_r)
mock_r.reset_counts()
for i in range(1, 1 + n_steps):
    tr_r.step(seq.frame(i))
ok(
    "rrsem: one batched scale extraction + one search extraction per frame",
    len(mock_r.batch_calls) == n_steps
    and all(s[3] == 9 for s in mock_r.batch_calls)
    and len(mock_r.single_calls) == n_steps,
)

# --- track_sequence basics ------------------------------------------------------
res1 = track_sequence(seq, init_box, cfg_m, provider=MockProvider(4, 8))
res2 = track_sequence(seq, init_box, cfg_m, provider=MockProvider(4, 8))
ok("first box equals init", np.array_equal(res1.boxes[0], init_box))
ok("track determinism", np.array_equal(res1.boxes, res2.boxes))
one = track_sequence([frame0], init_box, cfg_m, provider=MockProvider(4, 8))
ok("1-frame sequence", one.boxes.shape == (1, 4) and np.array_equal(one.boxes[0], init_box))

# --- static tracking quality (hog provider) -------------------------------------
seq_static = synth_sequence("static", frame_size=(120, 160), object_size=(40.0, 44.0), length=30, seed=5)
for method in ("hrsem", "rrsem"):
    cfg_s = TrackerConfig(method=method)
    res = track_sequence(seq_static, seq_static.boxes[0], cfg_s)
    drift = np.max(np.abs(res.boxes - seq_static.boxes[0][None, :]))
    ratio = res.boxes[:, 2] * res.boxes[:, 3] / (seq_static.boxes[0, 2] * seq_static.boxes[0, 3])
    side_ratio = np.sqrt(ratio)
    print(f"  static {method}: max box drift {drift:.3f}px, side ratio range [{side_ratio.min():.4f}, {side_ratio.max():.4f}]")
    ok(f"static {method}: box constant within 1 px", drift < 1.0)
    ok(f"static {method}: size ratio within [0.99, 1.01]", np.all(side_ratio >= 0.99) and np.all(side_ratio <= 1.01))

print("ALL TRACKER BASICS PASSED")
