import sys

import numpy as np

from scaletrack.synthetic import render_frame, _smooth_noise
from scaletrack.tracking import Tracker, TrackerConfig

RES = 192
FRAME = (460, 500)
CENTER = (230.0, 250.0)
SIZE = 128.0
RATE = 1.02
N = 60


def make_frames():
    rng = np.random.default_rng(5)
    background = np.clip(0.08 + 0.06 * (_smooth_noise(rng, FRAME, (7, 9)) - 0.5), 0, 1)
    yy, xx = np.mgrid[0:RES, 0:RES]
    r = np.hypot(yy - RES / 2, xx - RES / 2)
    rings = 0.62 + 0.38 * np.cos(2 * np.pi * r / 48.0)
    blobs = 0.25 * (_smooth_noise(rng, (RES, RES), (5, 5)) - 0.5) * 2
    texture = np.clip(rings + blobs, 0.08, 1.0)
    frames = []
    sizes = []
    for t in range(N):
        s = SIZE * RATE**t
        frames.append(render_frame(background, texture, CENTER, (s, s)))
        sizes.append(s)
    return frames, np.array(sizes)


frames, sizes = make_frames()
method = sys.argv[1] if len(sys.argv) > 1 else "hrsem"
cfg = TrackerConfig(method=method)
trk = Tracker(frames[0], np.array([CENTER[1] - SIZE / 2, CENTER[0] - SIZE / 2, SIZE, SIZE]), cfg)
worst = 0.0
for t in range(1, N):
    box, info = trk.step(frames[t])
    est_area = box[2] * box[3]
    gt_area = sizes[t] ** 2
    ratio = est_area / gt_area
    worst = max(worst, abs(ratio - 1))
    if t % 5 == 0 or abs(ratio - 1) > 0.10:
        print(
            f"t={t:2d} est_w={box[2]:6.1f} gt_w={sizes[t]:6.1f} area_ratio={ratio:.3f} "
            f"lvl_factor={info['scale_factor']:.4f} lc={info['low_confidence']}"
        )
print(f"[{method}] worst |area ratio - 1| = {worst:.3f}")
