import numpy as np

from scaletrack.features.base import provider_extract
from scaletrack.features.registry import resolve_provider
from scaletrack.scale import build_scale_pyramid, detect_scale, learn_scale_filter, make_scale_label
from scaletrack.scale_samples import canonical_cell_grid, holistic_scale_sample
from scaletrack.synthetic import render_frame, _smooth_noise

FRAME = (300, 320)
CENTER = (150.0, 160.0)
RES = 192


def probe(name, size, bg_level, obj_fn):
    rng = np.random.default_rng(5)
    background = np.clip(
        bg_level + 0.06 * (_smooth_noise(rng, FRAME, (7, 9)) - 0.5), 0, 1
    )
    texture = obj_fn(rng)
    prov = resolve_provider("hog", cell_size=4)
    layer = prov.descriptor().layers[0].layer_id

    def frame_at(scale):
        s = size * scale
        return render_frame(background, texture, CENTER, (s, s)).astype(float) / 255.0

    pyr = build_scale_pyramid(size, size, 1.02, 17)
    canon = canonical_cell_grid((size, size), 4)
    label = make_scale_label(17, 1.0625)
    f0 = provider_extract(prov, frame_at(1.0), [layer])[0]
    h0 = holistic_scale_sample(f0, CENTER, pyr, canon)
    hf = learn_scale_filter(h0, label, 1e-2)

    levels = []
    match_cos = []
    for d in (1, 2, 3, 4):
        fm = provider_extract(prov, frame_at(1.02**d), [layer])[0]
        ht = holistic_scale_sample(fm, CENTER, pyr, canon)
        levels.append(detect_scale(hf, ht, pyr).level)
        a = ht.matrix[:, 8 + d]
        b = h0.matrix[:, 8]
        match_cos.append(float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b))))
    print(
        f"{name.ljust(14)} " + " ".join(f"D{d}->{l:+.2f}" for d, l in zip((1, 2, 3, 4), levels))
        + "  matched-cos: " + " ".join(f"{c:.3f}" for c in match_cos)
    )


def obj_bright_smooth(rng):
    base = 0.75 + 0.2 * (_smooth_noise(rng, (RES, RES), (4, 4)) - 0.5) * 2
    return np.clip(base, 0.45, 1.0)


def obj_rim(rng):
    t = obj_bright_smooth(rng)
    m = int(RES * 0.06)
    t[:m, :] = t[-m:, :] = t[:, :m] = t[:, -m:] = 1.0
    return t


def obj_rings_hi(rng):
    yy, xx = np.mgrid[0:RES, 0:RES]
    r = np.hypot(yy - RES / 2, xx - RES / 2)
    return np.clip(0.62 + 0.38 * np.cos(2 * np.pi * r / 48.0), 0.1, 1.0)


probe("bright 96", 96.0, 0.08, obj_bright_smooth)
probe("rim 96", 96.0, 0.08, obj_rim)
probe("rings-hi 96", 96.0, 0.08, obj_rings_hi)
probe("bright 128", 128.0, 0.08, obj_bright_smooth)
probe("rim 128", 128.0, 0.08, obj_rim)
probe("rings-hi 128", 128.0, 0.08, obj_rings_hi)
