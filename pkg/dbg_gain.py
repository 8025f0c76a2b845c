import numpy as np

from scaletrack.features.base import provider_extract
from scaletrack.features.registry import resolve_provider
from scaletrack.scale import build_scale_pyramid, detect_scale, learn_scale_filter, make_scale_label
from scaletrack.scale_samples import canonical_cell_grid, holistic_scale_sample
from scaletrack.synthetic import synth_sequence

seq = synth_sequence("zoom", frame_size=(300, 320), object_size=(80.0, 80.0), rate=1.02, length=10, seed=1)
prov = resolve_provider("hog", cell_size=4)
layer = prov.descriptor().layers[0].layer_id
center = (150.0, 160.0)
size = (80.0, 80.0)
pyr = build_scale_pyramid(size[0], size[1], 1.02, 17)
canon = canonical_cell_grid(size, 4)
label = make_scale_label(17, 1.0625)

f0 = provider_extract(prov, seq.frame(0).astype(float) / 255.0, [layer])[0]
s0 = holistic_scale_sample(f0, center, pyr, canon)
filt = learn_scale_filter(s0, label, 1e-2)
print("den (fftshifted):", " ".join(f"{v:.3g}" for v in np.fft.fftshift(filt.denominator)))

for t in range(0, 9):
    fm = provider_extract(prov, seq.frame(t).astype(float) / 255.0, [layer])[0]
    st = holistic_scale_sample(fm, center, pyr, canon)
    resp = detect_scale(filt, st, pyr)
    vals = resp.values  # index i = level i-8
    print(
        f"true +{t}: refined {resp.level:+.2f} argmax {np.argmax(vals)-8:+d} "
        f"vals[-2..+6]: " + " ".join(f"{v:+.3f}" for v in vals[6:15])
    )
