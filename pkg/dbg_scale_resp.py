import numpy as np

from scaletrack.features.base import provider_extract
from scaletrack.features.registry import resolve_provider
from scaletrack.scale import build_scale_pyramid, detect_scale, learn_scale_filter, make_scale_label
from scaletrack.scale_samples import canonical_cell_grid, holistic_scale_sample
from scaletrack.synthetic import synth_sequence

seq = synth_sequence("zoom", frame_size=(200, 240), object_size=(40.0, 40.0), rate=1.02, length=30, seed=1)
prov = resolve_provider("hog", cell_size=4)
layer = prov.descriptor().layers[0].layer_id

center = (100.0, 120.0)
size = (40.0, 40.0)
pyr = build_scale_pyramid(size[0], size[1], 1.02, 17)
canon = canonical_cell_grid(size, 4)
label = make_scale_label(17, 1.0625)

f0 = provider_extract(prov, seq.frame(0).astype(float) / 255.0, [layer])[0]
s0 = holistic_scale_sample(f0, center, pyr, canon)
filt = learn_scale_filter(s0, label, 1e-2)

print("den spectrum (fftshifted):", np.round(np.fft.fftshift(filt.denominator), 2))
print("den min/max ratio:", filt.denominator.min() / filt.denominator.max())

base = s0.matrix[:, 8]
for t in (0, 1, 3, 5):
    fm = provider_extract(prov, seq.frame(t).astype(float) / 255.0, [layer])[0]
    st = holistic_scale_sample(fm, center, pyr, canon)
    resp = detect_scale(filt, st, pyr)
    # matched filter: plain correlation of tapered sample with tapered training sample
    mf = np.fft.ifft(np.sum(s0.spectrum.conj() * st.spectrum, axis=0)).real
    mf_arg = np.argmax(mf)
    # raw column cosine vs the b=0 training column
    sims = st.matrix.T @ base / (np.linalg.norm(st.matrix, axis=0) * np.linalg.norm(base) + 1e-12)
    print(
        f"t={t}: ridge level={resp.level:+.2f} (argmax {np.argmax(resp.values)-8:+d}) "
        f"matched argmax {((mf_arg+8)%17)-8:+d} col-cos argmax {np.argmax(sims)-8:+d} "
        f"true {t:+d}"
    )
    if t == 5:
        print("  ridge vals (shifted):", np.round(np.roll(resp.values, 8 - 0)[0:17], 3))
        print("  col cosines:", np.round(sims, 4))
