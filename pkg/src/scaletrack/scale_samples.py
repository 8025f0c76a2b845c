"""Builders of multi-scale sample matrices.

Three strategies produce the same (K_f x D) sample layout:

* ``holistic_scale_sample`` — one full-frame (or search-region) feature map
  is cropped D times in *feature* space, each crop resampled to a canonical
  cell grid.  Costs a single feature extraction regardless of D.
* ``region_scale_sample`` — D image-space crops resized to one input size
  and pushed through the feature provider as a single batched call.
* ``baseline_scale_sample`` — the classical per-level loop: crop the image,
  resize, extract features level by level (D provider passes).  Kept as the
  reference point the batched strategies are measured against.

All three vectorize each level with ``vectorize_feature_stack`` so their
outputs are directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .features.base import FeatureMap, FeatureProvider, provider_extract, provider_extract_batch
from .features.hog import HogConfig, hog_extract
from .interpolation import center_rect, crop_replicate, resample, sample_window
from .scale import ScalePyramid, ScaleSample, vectorize_feature_stack


@dataclass(frozen=True)
class RegionBatch:
    """D resized image crops stacked for one batched provider call."""

    stack: np.ndarray  # (M, N, C, D)
    rects: tuple[tuple[int, int, int, int], ...]  # source rect per level


def _check_center(center: tuple[float, float], height: int, width: int) -> None:
    cy, cx = float(center[0]), float(center[1])
    if not (0.0 <= cy < height and 0.0 <= cx < width):
        raise InvalidInputError(
            f"target center {center} lies outside the frame ({height}x{width})"
        )


def holistic_scale_sample(
    feature_map: FeatureMap,
    center_px: tuple[float, float],
    pyramid: ScalePyramid,
    canonical_cells: tuple[int, int],
) -> ScaleSample:
    """Crop the scale pyramid out of an already-extracted feature map.

    ``center_px`` is in image pixels; the feature grid is addressed at
    ``center_px / stride``.  Level windows are kept at fractional cell
    coordinates and lifted straight to the canonical grid by the continuous
    resampler — essential because adjacent pyramid levels can differ by well
    under one cell, which whole-cell cropping would collapse into identical
    columns.
    """
    stride = feature_map.stride
    fh, fw = feature_map.height, feature_map.width
    _check_center((center_px[0] / stride, center_px[1] / stride), fh, fw)
    cy, cx = center_px[0] / stride, center_px[1] / stride
    sizes_cells = pyramid.level_sizes() / stride
    columns = []
    for level in range(pyramid.count):
        hh, ww = sizes_cells[level, 0] / 2.0, sizes_cells[level, 1] / 2.0
        block = sample_window(
            feature_map.data, (cy - hh, cy + hh, cx - ww, cx + ww), canonical_cells
        )
        columns.append(vectorize_feature_stack(block))
    return ScaleSample(matrix=np.stack(columns, axis=1))


def build_region_batch(
    frame: np.ndarray,
    center_px: tuple[float, float],
    pyramid: ScalePyramid,
    input_dims: tuple[int, int],
) -> RegionBatch:
    """Crop D pyramid levels from the image and resize each to one size."""
    if frame.ndim == 2:
        frame = frame[:, :, None]
    if frame.ndim != 3:
        raise InvalidInputError(f"frame must be 2-D or 3-D, got ndim {frame.ndim}")
    h, w = frame.shape[:2]
    _check_center(center_px, h, w)
    sizes = pyramid.level_sizes()
    crops = []
    rects = []
    for level in range(pyramid.count):
        rect = center_rect(center_px, (sizes[level, 0], sizes[level, 1]))
        patch = crop_replicate(frame, rect)
        crops.append(resample(patch, input_dims))
        rects.append(rect)
    return RegionBatch(stack=np.stack(crops, axis=3), rects=tuple(rects))


def region_scale_sample(
    frame: np.ndarray,
    center_px: tuple[float, float],
    pyramid: ScalePyramid,
    provider: FeatureProvider,
    input_dims: tuple[int, int],
    layer_id: str,
) -> ScaleSample:
    """Batch the image pyramid through the provider in one call."""
    batch = build_region_batch(frame, center_px, pyramid, input_dims)
    features = provider_extract_batch(provider, batch.stack, layer_id)  # (M', N', G, D)
    columns = [vectorize_feature_stack(features[:, :, :, d]) for d in range(pyramid.count)]
    return ScaleSample(matrix=np.stack(columns, axis=1))


def baseline_scale_sample(
    frame: np.ndarray,
    center_px: tuple[float, float],
    pyramid: ScalePyramid,
    model_dims: tuple[int, int],
    hog_config: HogConfig | None = None,
) -> ScaleSample:
    """Per-level crop/resize/extract loop (D separate feature passes)."""
    cfg = hog_config if hog_config is not None else HogConfig()
    if frame.ndim == 2:
        frame = frame[:, :, None]
    h, w = frame.shape[:2]
    _check_center(center_px, h, w)
    sizes = pyramid.level_sizes()
    columns = []
    for level in range(pyramid.count):
        rect = center_rect(center_px, (sizes[level, 0], sizes[level, 1]))
        patch = crop_replicate(frame, rect)
        patch = resample(patch, model_dims)
        features = hog_extract(patch, cfg)
        columns.append(vectorize_feature_stack(features.data))
    return ScaleSample(matrix=np.stack(columns, axis=1))


def region_scale_sample_single(
    frame: np.ndarray,
    center_px: tuple[float, float],
    pyramid: ScalePyramid,
    provider: FeatureProvider,
    input_dims: tuple[int, int],
    layer_id: str,
) -> ScaleSample:
    """Same crops as ``region_scale_sample`` but one provider call per level
    (for providers without batch support)."""
    batch = build_region_batch(frame, center_px, pyramid, input_dims)
    columns = []
    for d in range(pyramid.count):
        fmap = provider_extract(provider, batch.stack[:, :, :, d], [layer_id])[0]
        columns.append(vectorize_feature_stack(fmap.data))
    return ScaleSample(matrix=np.stack(columns, axis=1))


def canonical_cell_grid(
    target_size_px: tuple[float, float], stride: int, max_cells: int = 1024
) -> tuple[int, int]:
    """First-frame target size in cells, shrunk (aspect preserved) until the
    cell count is at most ``max_cells``; at least 2 cells per side."""
    th = max(target_size_px[0] / stride, 1.0)
    tw = max(target_size_px[1] / stride, 1.0)
    area = th * tw
    if area > max_cells:
        shrink = (max_cells / area) ** 0.5
        th *= shrink
        tw *= shrink
    return (max(2, int(round(th))), max(2, int(round(tw))))
