import numpy as np

from scaletrack.features.base import provider_extract
from scaletrack.features.hog import HogConfig
from scaletrack.features.registry import resolve_provider
from scaletrack.scale import build_scale_pyramid
from scaletrack.scale_samples import (
    baseline_scale_sample,
    canonical_cell_grid,
    holistic_scale_sample,
    region_scale_sample,
)
from scaletrack.synthetic import synth_sequence


def probe(obj_px: float):
    seq = synth_sequence(
        "zoom", frame_size=(260, 300), object_size=(obj_px, obj_px), rate=1.02, length=8, seed=1
    )
    prov = resolve_provider("hog", cell_size=4)
    layer = prov.descriptor().layers[0].layer_id
    center = (130.0, 150.0)
    size = (obj_px, obj_px)
    pyr = build_scale_pyramid(size[0], size[1], 1.02, 17)
    canon = canonical_cell_grid(size, 4)
    in_px = (canon[0] * 4, canon[1] * 4)

    def samples(frame):
        img = frame.astype(float) / 255.0
        fmap = provider_extract(prov, img, [layer])[0]
        h = holistic_scale_sample(fmap, center, pyr, canon)
        r = region_scale_sample(img, center, pyr, prov, in_px, layer)
        d = baseline_scale_sample(img, center, pyr, in_px, HogConfig(cell_size=4))
        return h, r, d

    s0 = samples(seq.frame(0))
    s5 = samples(seq.frame(5))
    print(f"object {obj_px:.0f}px, canonical {canon}:")
    for name, a, b in zip(("hrsem", "rrsem", "dsst "), s0, s5):
        base = a.matrix[:, 8]
        sims = b.matrix.T @ base / (
            np.linalg.norm(b.matrix, axis=0) * np.linalg.norm(base) + 1e-12
        )
        # contrast: best column vs mean of columns >= 3 levels away
        arg = int(np.argmax(sims))
        far = np.abs(np.arange(17) - arg) >= 3
        print(
            f"  {name}: argmax {arg-8:+d} (true +5) peak {sims[arg]:.4f} "
            f"far-mean {sims[far].mean():.4f} contrast {sims[arg]-sims[far].mean():.4f}"
        )


probe(40.0)
probe(80.0)
probe(120.0)
