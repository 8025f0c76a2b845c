"""Deterministic synthetic sequences with exact analytic ground truth.

Each sequence renders a textured rectangle over a textured background, with
the rectangle's center and size following a closed-form trajectory:

* ``static``      — nothing moves.
* ``zoom``        — size grows geometrically (``rate`` per frame).
* ``drift``       — center translates by ``drift`` px/frame.
* ``zoom+drift``  — both at once.

Rendering is sub-pixel: the rectangle's edges are anti-aliased by exact
pixel-coverage weights and its texture is bilinearly warped from a fixed
high-resolution patch, so a 2%/frame zoom produces a genuinely smooth scale
change rather than integer jumps.  Frames are quantized to uint8 at render
time, making in-memory runs bit-identical to runs that round-trip PNG files.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .evaluation import Sequence
from .interpolation import resample

SYNTH_KINDS = ("static", "zoom", "drift", "zoom+drift")

_TEXTURE_RES = 192  # base resolution of the object texture patch


def _smooth_noise(rng: np.random.Generator, shape: tuple[int, int], grid: tuple[int, int]) -> np.ndarray:
    coarse = rng.random(grid)
    return resample(coarse, shape)


def _bilinear(patch: np.ndarray, yy: np.ndarray, xx: np.ndarray) -> np.ndarray:
    h, w = patch.shape
    y = np.clip(yy, 0.0, h - 1.0)
    x = np.clip(xx, 0.0, w - 1.0)
    y0 = np.floor(y).astype(int)
    x0 = np.floor(x).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = y - y0
    fx = x - x0
    top = patch[y0, x0] * (1 - fx) + patch[y0, x1] * fx
    bot = patch[y1, x0] * (1 - fx) + patch[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def _coverage(n: int, lo: float, hi: float) -> np.ndarray:
    """Overlap of each pixel cell [p, p+1) with the interval [lo, hi)."""
    edges = np.arange(n + 1, dtype=float)
    return np.clip(np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo), 0.0, 1.0)


def render_frame(
    background: np.ndarray,
    texture: np.ndarray,
    center: tuple[float, float],
    size: tuple[float, float],
) -> np.ndarray:
    """Composite the textured rectangle onto the background; returns uint8."""
    fh, fw = background.shape
    cy, cx = center
    h, w = size
    y_lo, y_hi = cy - h / 2.0, cy + h / 2.0
    x_lo, x_hi = cx - w / 2.0, cx + w / 2.0
    alpha = np.outer(_coverage(fh, y_lo, y_hi), _coverage(fw, x_lo, x_hi))
    py, px = np.mgrid[0:fh, 0:fw]
    th, tw = texture.shape
    u = (py + 0.5 - y_lo) / h * th - 0.5
    v = (px + 0.5 - x_lo) / w * tw - 0.5
    warped = _bilinear(texture, u, v)
    frame = background * (1.0 - alpha) + warped * alpha
    return np.round(np.clip(frame, 0.0, 1.0) * 255.0).astype(np.uint8)


def synth_sequence(
    kind: str,
    frame_size: tuple[int, int] = (160, 200),
    object_size: tuple[float, float] = (40.0, 40.0),
    rate: float = 1.02,
    drift: tuple[float, float] = (2.0, 0.0),
    length: int = 30,
    seed: int = 0,
    name: str | None = None,
) -> Sequence:
    """Render an in-memory sequence with analytic ground truth.

    ``drift`` is (dx, dy) pixels per frame; ``rate`` is the per-frame size
    multiplier for the zoom kinds.  Frame t (0-based) has size
    ``object_size * rate**t`` and center displaced by ``t * drift``.
    """
    if kind not in SYNTH_KINDS:
        raise InvalidInputError(f"unknown synthetic kind {kind!r}; choose from {SYNTH_KINDS}")
    fh, fw = int(frame_size[0]), int(frame_size[1])
    oh, ow = float(object_size[0]), float(object_size[1])
    length = int(length)
    if length < 1:
        raise InvalidInputError(f"length must be >= 1, got {length}")
    if oh < 4 or ow < 4:
        raise InvalidInputError(f"object size must be at least 4 px per side, got {object_size}")
    zooming = kind in ("zoom", "zoom+drift")
    drifting = kind in ("drift", "zoom+drift")
    if zooming and rate <= 0:
        raise InvalidInputError(f"zoom rate must be > 0, got {rate}")

    scale_end = rate ** (length - 1) if zooming else 1.0
    max_h = oh * max(1.0, scale_end)
    max_w = ow * max(1.0, scale_end)
    if max_h > fh or max_w > fw:
        raise InvalidInputError(
            f"object ({max_h:.1f}x{max_w:.1f} px at its largest) does not fit the "
            f"{fh}x{fw} frame"
        )

    dx, dy = (float(drift[0]), float(drift[1])) if drifting else (0.0, 0.0)
    total_dx, total_dy = dx * (length - 1), dy * (length - 1)
    # start the center so the whole trajectory stays inside the frame
    cy0 = (fh - total_dy) / 2.0 if drifting else fh / 2.0
    cx0 = (fw - total_dx) / 2.0 if drifting else fw / 2.0
    for t in (0, length - 1):
        s = rate**t if zooming else 1.0
        cy, cx = cy0 + dy * t, cx0 + dx * t
        if not (s * oh / 2 <= cy <= fh - s * oh / 2 and s * ow / 2 <= cx <= fw - s * ow / 2):
            raise InvalidInputError(
                "trajectory leaves the frame: reduce drift, rate, or object size"
            )

    rng = np.random.default_rng(seed)
    # Dark, gently varying background under a bright high-contrast object:
    # concentric rings give the object strong edges at every scale (so its
    # apparent size is unambiguous) and smooth blobs break the radial symmetry.
    background = np.clip(0.08 + 0.06 * (_smooth_noise(rng, (fh, fw), (7, 9)) - 0.5), 0.0, 1.0)
    yy, xx = np.mgrid[0:_TEXTURE_RES, 0:_TEXTURE_RES].astype(float)
    radius = np.hypot(yy - _TEXTURE_RES / 2.0, xx - _TEXTURE_RES / 2.0)
    rings = 0.62 + 0.38 * np.cos(2.0 * np.pi * radius / 48.0)
    blobs = 0.5 * (_smooth_noise(rng, (_TEXTURE_RES, _TEXTURE_RES), (5, 5)) - 0.5)
    texture = np.clip(rings + blobs, 0.08, 1.0)

    frames = []
    boxes = []
    for t in range(length):
        s = rate**t if zooming else 1.0
        h, w = oh * s, ow * s
        cy, cx = cy0 + dy * t, cx0 + dx * t
        frames.append(render_frame(background, texture, (cy, cx), (h, w)))
        boxes.append([cx - w / 2.0, cy - h / 2.0, w, h])

    attrs = []
    if zooming:
        attrs.append("SV")
    if drifting:
        attrs.append("FM")
    if name is None:
        name = f"synth-{kind.replace('+', '-')}-{seed}"
    return Sequence(name=name, frames=frames, boxes=np.asarray(boxes), attributes=tuple(attrs))


def ground_truth_text(boxes) -> str:
    """1-indexed x,y,w,h lines, the groundtruth_rect.txt file content."""
    rows = np.asarray(boxes, dtype=float)
    lines = [f"{x + 1:.4f},{y + 1:.4f},{w:.4f},{h:.4f}" for x, y, w, h in rows]
    return "\n".join(lines) + "\n"


def frame_png(frame: np.ndarray) -> bytes:
    """PNG encoding of one rendered frame, as written to img/NNNN.png."""
    from io import BytesIO

    from PIL import Image

    buf = BytesIO()
    Image.fromarray(frame).save(buf, format="PNG")
    return buf.getvalue()


def write_sequence(sequence: Sequence, out_dir) -> None:
    """Write a sequence in the benchmark directory layout (1-indexed boxes)."""
    from pathlib import Path

    root = Path(out_dir)
    img_dir = root / "img"
    img_dir.mkdir(parents=True, exist_ok=True)
    for i in range(len(sequence)):
        (img_dir / f"{i + 1:04d}.png").write_bytes(frame_png(sequence.frame(i)))
    (root / "groundtruth_rect.txt").write_text(ground_truth_text(sequence.boxes), encoding="utf-8")
    if sequence.attributes:
        (root / "attributes.txt").write_text(
            "\n".join(sequence.attributes) + "\n", encoding="utf-8"
        )
