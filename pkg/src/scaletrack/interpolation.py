"""Cubic-convolution resampling and crop geometry.

The resampler is the piecewise-cubic convolution kernel with a = -0.75 (the
classic image-resize kernel): interpolating (K(0)=1, K(k)=0 at other integers)
and a partition of unity at every fractional offset, so constant inputs come
back exactly and resampling at identical resolution is the identity.

Out-of-range source taps are clamped to the nearest valid sample (edge
replication); the same rule serves crops that extend past the array.

Weight matrices are built once per (source length, target length) pair and
cached, then shared across channels and maps — resampling is two small
matrix products per channel.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import InvalidInputError

KERNEL_SHARPNESS = -0.75


def cubic_kernel(s, alpha: float = KERNEL_SHARPNESS):
    """Piecewise-cubic convolution kernel, support (-2, 2)."""
    s = np.abs(np.asarray(s, dtype=float))
    near = (alpha + 2) * s**3 - (alpha + 3) * s**2 + 1
    far = alpha * (s**3 - 5 * s**2 + 8 * s - 4)
    return np.where(s <= 1, near, np.where(s < 2, far, 0.0))


@lru_cache(maxsize=512)
def _axis_weights(n_src: int, n_dst: int) -> np.ndarray:
    """Dense (n_dst, n_src) resampling matrix for one axis.

    Output sample j is taken at source coordinate j * n_src/n_dst — the
    origin-aligned continuous-grid convention.  Equal lengths give the exact
    identity, and 2x upsampling evaluates the kernel only at offsets 0 and
    1/2, where the cubic family interpolates linear signals exactly.
    """
    w = np.zeros((n_dst, n_src))
    scale = n_src / n_dst
    for j in range(n_dst):
        x = j * scale
        base = int(np.floor(x))
        for k in range(base - 1, base + 3):
            src = min(max(k, 0), n_src - 1)  # edge replication
            w[j, src] += float(cubic_kernel(x - k))
    return w


def resample(data: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Resample the leading two axes of ``data`` (H, W[, C]) to ``shape``."""
    data = np.asarray(data, dtype=float)
    if data.ndim not in (2, 3):
        raise InvalidInputError(f"resample expects 2-D or 3-D data, got ndim {data.ndim}")
    h_dst, w_dst = int(shape[0]), int(shape[1])
    if h_dst < 1 or w_dst < 1:
        raise InvalidInputError(f"target shape must be positive, got {shape}")
    h_src, w_src = data.shape[:2]
    if h_src < 1 or w_src < 1:
        raise InvalidInputError("source is empty")
    wy = _axis_weights(h_src, h_dst)
    wx = _axis_weights(w_src, w_dst)
    out = np.tensordot(wy, data, axes=(1, 0))  # (h_dst, w_src[, C])
    out = np.tensordot(wx, out, axes=(1, 1))  # (w_dst, h_dst[, C])
    return np.moveaxis(out, 0, 1)


@lru_cache(maxsize=4096)
def _window_axis_weights(n_src: int, n_dst: int, start: float, step: float) -> np.ndarray:
    """Dense (n_dst, n_src) matrix sampling a fractional source window.

    Output sample j is taken at continuous source coordinate start + j*step;
    _axis_weights is the special case start=0, step=n_src/n_dst.  Taps falling
    outside the source are clamped to the border sample (edge replication).
    """
    w = np.zeros((n_dst, n_src))
    for j in range(n_dst):
        x = start + j * step
        base = int(np.floor(x))
        for k in range(base - 1, base + 3):
            src = min(max(k, 0), n_src - 1)
            w[j, src] += float(cubic_kernel(x - k))
    return w


def sample_window(
    data: np.ndarray, window: tuple[float, float, float, float], shape: tuple[int, int]
) -> np.ndarray:
    """Resample a fractional (y0, y1, x0, x1) window of ``data`` to ``shape``.

    The window is half-open in continuous source coordinates, so arbitrary
    sub-sample rectangles can be lifted to a canonical grid without first
    rounding to whole samples — rectangles whose edges differ by less than one
    sample still produce distinct outputs.  Kernel taps near the window border
    read the true neighboring samples of ``data`` (the window selects, the full
    array interpolates); only taps beyond the array itself are edge-replicated.
    An integer window spanning the whole array at its own size is the identity.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim not in (2, 3):
        raise InvalidInputError(f"sample_window expects 2-D or 3-D data, got ndim {data.ndim}")
    y0, y1, x0, x1 = (float(v) for v in window)
    if not (np.isfinite([y0, y1, x0, x1]).all() and y1 > y0 and x1 > x0):
        raise InvalidInputError(f"window must be finite with positive extent, got {window}")
    h_dst, w_dst = int(shape[0]), int(shape[1])
    if h_dst < 1 or w_dst < 1:
        raise InvalidInputError(f"target shape must be positive, got {shape}")
    wy = _window_axis_weights(data.shape[0], h_dst, y0, (y1 - y0) / h_dst)
    wx = _window_axis_weights(data.shape[1], w_dst, x0, (x1 - x0) / w_dst)
    out = np.tensordot(wy, data, axes=(1, 0))
    out = np.tensordot(wx, out, axes=(1, 1))
    return np.moveaxis(out, 0, 1)


def round_half_away(x):
    """Round to nearest integer, halves away from zero (never banker's)."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5))
    return out.astype(int) if out.ndim else int(out)


def center_rect(center: tuple[float, float], size: tuple[float, float]) -> tuple[int, int, int, int]:
    """Integer crop rectangle (y0, y1, x0, x1), half-open, centered on ``center``.

    Each edge is rounded half-away-from-zero independently; a degenerate side
    (fewer than 2 samples) is widened to 2 so downstream interpolation always
    has a real extent to work with.
    """
    cy, cx = float(center[0]), float(center[1])
    hh, ww = float(size[0]) / 2.0, float(size[1]) / 2.0
    y0, y1 = round_half_away(cy - hh), round_half_away(cy + hh)
    x0, x1 = round_half_away(cx - ww), round_half_away(cx + ww)
    if y1 - y0 < 2:
        y0 = round_half_away(cy) - 1
        y1 = y0 + 2
    if x1 - x0 < 2:
        x0 = round_half_away(cx) - 1
        x1 = x0 + 2
    return int(y0), int(y1), int(x0), int(x1)


def crop_replicate(data: np.ndarray, rect: tuple[int, int, int, int]) -> np.ndarray:
    """Materialize a half-open (y0, y1, x0, x1) crop, replicating edge samples
    for the parts of the rectangle that fall outside the array."""
    data = np.asarray(data)
    if data.ndim not in (2, 3):
        raise InvalidInputError(f"crop expects 2-D or 3-D data, got ndim {data.ndim}")
    y0, y1, x0, x1 = (int(v) for v in rect)
    if y1 <= y0 or x1 <= x0:
        raise InvalidInputError(f"empty crop rectangle {rect}")
    rows = np.clip(np.arange(y0, y1), 0, data.shape[0] - 1)
    cols = np.clip(np.arange(x0, x1), 0, data.shape[1] - 1)
    return data[np.ix_(rows, cols)]


def crop_and_resample(
    data: np.ndarray, rect: tuple[int, int, int, int], shape: tuple[int, int]
) -> np.ndarray:
    """Crop (with edge replication) then resample to ``shape``.

    Defined as the exact composition of crop_replicate and resample so the two
    primitives stay independently testable.
    """
    return resample(crop_replicate(data, rect), shape)
