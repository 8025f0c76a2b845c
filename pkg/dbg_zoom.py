import numpy as np

from scaletrack.synthetic import synth_sequence
from scaletrack.tracking import Tracker, TrackerConfig
from scaletrack.scale import detect_scale

seq = synth_sequence("zoom", frame_size=(200, 240), object_size=(40.0, 40.0), rate=1.02, length=60, seed=1)
cfg = TrackerConfig(method="hrsem")
trk = Tracker(seq.frame(0), seq.boxes[0], cfg)

for t in range(1, 16):
    frame = seq.frame(t)
    fmap = trk._full_map(frame)
    center, size = trk.state.center, trk.state.size
    sample = trk._scale_sample(frame, fmap, center, size)
    resp = detect_scale(trk.scale_filter, sample, trk._pyramid(size), cfg.newton_iterations)
    vals = resp.values
    top = np.argsort(vals)[::-1][:3]
    box, info = trk.step(frame)
    gt = seq.boxes[t]
    print(
        f"t={t:2d} level={resp.level:+.2f} argmax_idx={top.tolist()} "
        f"vals@[c-1,c,c+1]=[{vals[7]:.4f},{vals[8]:.4f},{vals[9]:.4f}] "
        f"est_w={box[2]:6.2f} gt_w={gt[2]:6.2f} lowconf={info['low_confidence']}"
    )
