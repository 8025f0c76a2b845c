import numpy as np

from scaletrack.features.base import provider_extract
from scaletrack.features.registry import resolve_provider
from scaletrack.scale import build_scale_pyramid, detect_scale, learn_scale_filter, make_scale_label
from scaletrack.scale_samples import canonical_cell_grid, holistic_scale_sample, region_scale_sample
from scaletrack.synthetic import render_frame, _smooth_noise

FRAME = (300, 320)
CENTER = (150.0, 160.0)
SIZE = 96.0
RES = 192


def tex_smooth(rng):
    return np.clip(0.55 + 0.4 * (_smooth_noise(rng, (RES, RES), (8, 8)) - 0.5) * 2, 0, 1)


def tex_border(rng):
    t = np.clip(0.5 + 0.3 * (_smooth_noise(rng, (RES, RES), (6, 6)) - 0.5) * 2, 0, 1)
    m = int(RES * 0.08)
    t[:m, :] = t[-m:, :] = 0.95
    t[:, :m] = t[:, -m:] = 0.95
    t[m : 2 * m, m : RES - m] = 0.1
    t[RES - 2 * m : RES - m, m : RES - m] = 0.1
    t[m : RES - m, m : 2 * m] = 0.1
    t[m : RES - m, RES - 2 * m : RES - m] = 0.1
    return t


def tex_rings(rng):
    yy, xx = np.mgrid[0:RES, 0:RES]
    r = np.hypot(yy - RES / 2, xx - RES / 2)
    # smooth concentric rings, wavelength ~40 texture px (~20 px rendered)
    return 0.55 + 0.42 * np.cos(2 * np.pi * r / 40.0)


def tex_rings_blobs(rng):
    yy, xx = np.mgrid[0:RES, 0:RES]
    r = np.hypot(yy - RES / 2, xx - RES / 2)
    rings = 0.5 + 0.35 * np.cos(2 * np.pi * r / 40.0)
    blobs = 0.3 * (_smooth_noise(rng, (RES, RES), (5, 5)) - 0.5) * 2
    return np.clip(rings + blobs, 0, 1)


def probe(name, tex_fn):
    rng = np.random.default_rng(5)
    background = np.clip(0.25 + 0.2 * (_smooth_noise(rng, FRAME, (7, 9)) - 0.5), 0, 1)
    texture = tex_fn(rng)
    prov = resolve_provider("hog", cell_size=4)
    layer = prov.descriptor().layers[0].layer_id

    def frame_at(scale):
        s = SIZE * scale
        return render_frame(background, texture, CENTER, (s, s)).astype(float) / 255.0

    pyr = build_scale_pyramid(SIZE, SIZE, 1.02, 17)
    canon = canonical_cell_grid((SIZE, SIZE), 4)
    in_px = (canon[0] * 4, canon[1] * 4)
    label = make_scale_label(17, 1.0625)

    img0 = frame_at(1.0)
    f0 = provider_extract(prov, img0, [layer])[0]
    h0 = holistic_scale_sample(f0, CENTER, pyr, canon)
    hf = learn_scale_filter(h0, label, 1e-2)
    r0 = region_scale_sample(img0, CENTER, pyr, prov, in_px, layer)
    rf = learn_scale_filter(r0, label, 1e-2)

    out = [name.ljust(12)]
    for d in (1, 2, 3):
        img = frame_at(1.02**d)
        fm = provider_extract(prov, img, [layer])[0]
        hl = detect_scale(hf, holistic_scale_sample(fm, CENTER, pyr, canon), pyr).level
        rl = detect_scale(rf, region_scale_sample(img, CENTER, pyr, prov, in_px, layer), pyr).level
        out.append(f"D{d}: h{hl:+.2f} r{rl:+.2f}")
    print("  ".join(out))


probe("smooth", tex_smooth)
probe("border", tex_border)
probe("rings", tex_rings)
probe("rings+blobs", tex_rings_blobs)
