import numpy as np

from scaletrack.features.base import provider_extract
from scaletrack.features.registry import resolve_provider
from scaletrack.scale import build_scale_pyramid, detect_scale, learn_scale_filter, make_scale_label
from scaletrack.scale_samples import canonical_cell_grid, holistic_scale_sample
from scaletrack.synthetic import render_frame, _smooth_noise

rng = np.random.default_rng(5)
FRAME = (300, 320)
CENTER = (150.0, 160.0)
SIZE = 96.0


def multi_octave_texture(rng, res, octaves):
    """Sum of smooth-noise octaves with 1/f-ish amplitudes."""
    tex = np.zeros((res, res))
    amp = 0.5
    grid = 6
    total = 0.0
    for _ in range(octaves):
        tex += amp * (_smooth_noise(rng, (res, res), (min(grid, res), min(grid, res))) - 0.5)
        total += amp
        amp *= 0.7
        grid *= 2
    return np.clip(0.55 + 0.8 * tex / total, 0.0, 1.0)


def gain_probe(octaves):
    rng = np.random.default_rng(5)
    background = np.clip(0.3 + 0.3 * (_smooth_noise(rng, FRAME, (7, 9)) - 0.5), 0, 1)
    texture = multi_octave_texture(rng, 192, octaves)
    prov = resolve_provider("hog", cell_size=4)
    layer = prov.descriptor().layers[0].layer_id

    def frame_at(scale):
        s = SIZE * scale
        img = render_frame(background, texture, CENTER, (s, s))
        return img.astype(float) / 255.0

    pyr = build_scale_pyramid(SIZE, SIZE, 1.02, 17)
    canon = canonical_cell_grid((SIZE, SIZE), 4)
    label = make_scale_label(17, 1.0625)
    f0 = provider_extract(prov, frame_at(1.0), [layer])[0]
    s0 = holistic_scale_sample(f0, CENTER, pyr, canon)
    filt = learn_scale_filter(s0, label, 1e-2)

    # column self-correlation across +-3 levels (how fast appearance decorrelates)
    c0 = s0.matrix[:, 8]
    c3 = s0.matrix[:, 11]
    cos3 = float(c0 @ c3 / (np.linalg.norm(c0) * np.linalg.norm(c3)))

    levels = []
    for d in (1, 2, 3, 5):
        fm = provider_extract(prov, frame_at(1.02**d), [layer])[0]
        st = holistic_scale_sample(fm, CENTER, pyr, canon)
        resp = detect_scale(filt, st, pyr)
        levels.append(resp.level)
    print(
        f"octaves={octaves}: col-cos(+3lv)={cos3:.3f} "
        + " ".join(f"D{d}->{l:+.2f}" for d, l in zip((1, 2, 3, 5), levels))
    )


for octs in (1, 2, 3, 4, 5):
    gain_probe(octs)
