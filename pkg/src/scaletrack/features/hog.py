"""31-channel compressed HOG.

The compressed formulation: 18 contrast-sensitive orientation channels, 9
contrast-insensitive ones, and 4 gradient-energy (texture) channels, each
cell block-normalized against its four 2x2 neighborhoods with truncation.

Numerics that matter downstream:
  * gradients are centered differences on an edge-replicated image, with the
    per-pixel channel of largest magnitude winning on color input;
  * orientation is snapped to the nearest of 18 discrete directions (argmax
    of signed projections), magnitude is bilinearly shared between the 2x2
    neighboring cells;
  * every cell of the floor(H/cell) x floor(W/cell) grid is kept — block
    normalization at the borders clamps to edge cells instead of shrinking
    the output;
  * the epsilon guard makes an all-zero gradient field produce an all-zero
    (never NaN) map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from .base import FeatureMap, LayerSpec, ProviderDescriptor, as_float_image

TRUNCATION = 0.2
TEXTURE_GAIN = 1.0 / np.sqrt(18.0)


@dataclass(frozen=True)
class HogConfig:
    cell_size: int = 4
    orientations: int = 9
    truncation: float = TRUNCATION
    eps: float = 1e-8

    def __post_init__(self):
        if self.cell_size < 1:
            raise InvalidInputError(f"cell_size must be >= 1, got {self.cell_size}")
        if self.orientations < 2:
            raise InvalidInputError(f"orientations must be >= 2, got {self.orientations}")
        if self.eps <= 0:
            raise InvalidInputError("eps must be > 0")

    @property
    def channels(self) -> int:
        # sensitive + insensitive + 4 texture channels; 31 for 9 orientations
        return 3 * self.orientations + 4


def _gradients(img: np.ndarray):
    padded = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    dx = padded[1:-1, 2:] - padded[1:-1, :-2]
    mag2 = dx * dx + dy * dy
    best = np.argmax(mag2, axis=2)[..., None]
    dx = np.take_along_axis(dx, best, axis=2)[..., 0]
    dy = np.take_along_axis(dy, best, axis=2)[..., 0]
    return dx, dy


def hog_extract(patch, cfg: HogConfig = HogConfig()) -> FeatureMap:
    """Extract the 31-channel HOG map at cfg.cell_size resolution."""
    img = as_float_image(patch)
    cell = cfg.cell_size
    rows, cols = img.shape[0] // cell, img.shape[1] // cell
    if rows < 1 or cols < 1:
        raise InvalidInputError(
            f"patch {img.shape[:2]} smaller than one {cell}x{cell} cell"
        )
    img = img[: rows * cell, : cols * cell]

    dx, dy = _gradients(img)
    mag = np.sqrt(dx * dx + dy * dy)

    nb = cfg.orientations
    theta = np.arange(nb) * np.pi / nb
    # signed projection onto each direction; nearest direction wins
    proj = dx[..., None] * np.cos(theta) + dy[..., None] * np.sin(theta)
    nearest = np.argmax(np.abs(proj), axis=2)
    signed = np.take_along_axis(proj, nearest[..., None], axis=2)[..., 0]
    bins = np.where(signed >= 0, nearest, nearest + nb)  # 2*nb sensitive bins

    # bilinear sharing of each pixel's magnitude between neighboring cells
    h, w = mag.shape
    yc = (np.arange(h) + 0.5) / cell - 0.5
    xc = (np.arange(w) + 0.5) / cell - 0.5
    y0 = np.floor(yc).astype(int)
    x0 = np.floor(xc).astype(int)
    wy1 = yc - y0
    wx1 = xc - x0

    hist = np.zeros((rows, cols, 2 * nb))
    yi = np.broadcast_to(y0[:, None], (h, w))
    xi = np.broadcast_to(x0[None, :], (h, w))
    wy = np.broadcast_to(wy1[:, None], (h, w))
    wx = np.broadcast_to(wx1[None, :], (h, w))
    for oy, fy in ((0, 1 - wy), (1, wy)):
        for ox, fx in ((0, 1 - wx), (1, wx)):
            cy = yi + oy
            cx = xi + ox
            ok = (cy >= 0) & (cy < rows) & (cx >= 0) & (cx < cols)
            np.add.at(
                hist,
                (cy[ok], cx[ok], bins[ok]),
                (mag * fy * fx)[ok],
            )

    folded = hist[:, :, :nb] + hist[:, :, nb:]
    energy = (folded**2).sum(axis=2)

    # four 2x2 block energies per cell, edge cells clamped
    epad = np.pad(energy, 1, mode="edge")
    blocks = []
    for sy in (0, 1):
        for sx in (0, 1):
            blocks.append(
                epad[sy : sy + rows, sx : sx + cols]
                + epad[sy : sy + rows, sx + 1 : sx + 1 + cols]
                + epad[sy + 1 : sy + 1 + rows, sx : sx + cols]
                + epad[sy + 1 : sy + 1 + rows, sx + 1 : sx + 1 + cols]
            )
    inv = [1.0 / np.sqrt(b + cfg.eps) for b in blocks]

    sensitive = np.zeros((rows, cols, 2 * nb))
    insensitive = np.zeros((rows, cols, nb))
    texture = np.zeros((rows, cols, 4))
    for i, n in enumerate(inv):
        t = np.minimum(hist * n[..., None], cfg.truncation)
        sensitive += 0.5 * t
        insensitive += 0.5 * np.minimum(folded * n[..., None], cfg.truncation)
        texture[:, :, i] = TEXTURE_GAIN * t.sum(axis=2)

    out = np.concatenate([sensitive, insensitive, texture], axis=2)
    return FeatureMap(out, stride=float(cell))


class HogProvider:
    """Feature provider wrapping hog_extract under the standard contract."""

    LAYER = "hog"

    def __init__(self, cfg: HogConfig = HogConfig(), input_size: tuple[int, int] | None = None):
        self.cfg = cfg
        self._input_size = input_size

    def descriptor(self) -> ProviderDescriptor:
        return ProviderDescriptor(
            name="hog",
            layers=(LayerSpec(self.LAYER, self.cfg.cell_size, self.cfg.channels),),
            input_size=self._input_size,
            supports_batch=True,
        )

    def extract(self, image, layer_ids=None):
        return [hog_extract(image, self.cfg)]

    def extract_batch(self, batch, layer_id):
        arr = np.asarray(batch, dtype=float)
        slices = [hog_extract(arr[:, :, :, d], self.cfg).data for d in range(arr.shape[3])]
        return np.stack(slices, axis=3)
