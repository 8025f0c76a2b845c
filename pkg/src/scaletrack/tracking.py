"""Per-frame tracking loop: translation detection, scale detection, model
updates — in that order, every frame.

The loop keeps the feature budget of the two batched scale strategies
explicit:

* ``hrsem`` extracts the full frame once; the translation search sample, the
  scale detection sample, and the post-detection learning sample are all
  cropped from that one feature map (in feature space).
* ``rrsem`` extracts one search-region crop for translation plus one batched
  D-level image pyramid for scale; the scale filter learns from the same
  detection batch against a level-shifted label, so no second pyramid is
  built.
* ``dsst`` is the classical baseline: per-level HOG re-extraction for both
  detection and learning (deliberately unbatched — it is the reference the
  other two are measured against).

Translation learning likewise reuses the detection sample: its spectrum is
phase-shifted by the detected displacement so the stored sample is
target-centered without a second extraction.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import (
    DegenerateResponseError,
    InvalidInputError,
    NumericalFailureError,
)
from .features.base import FeatureMap, as_float_image, provider_extract
from .features.hog import HogConfig
from .features.registry import resolve_provider
from .interpolation import center_rect, crop_replicate, resample, sample_window
from .scale import (
    ScalePyramid,
    build_scale_pyramid,
    detect_scale,
    learn_scale_filter,
    make_scale_label,
    scale_filter_terms,
    shift_label_spectrum,
    update_scale_filter,
)
from .scale_samples import (
    baseline_scale_sample,
    canonical_cell_grid,
    holistic_scale_sample,
    region_scale_sample,
)
from .tensorops import hann_window, signed_wrap
from .translation import (
    SampleMemory,
    TranslationFilter,
    learn_projection,
    learn_translation_filter,
    localize,
    make_translation_label,
    spatial_penalty,
)

METHODS = ("hrsem", "rrsem", "dsst")


@dataclass
class TrackerConfig:
    """All tunables of the tracking loop; every field has a working default."""

    method: str = "hrsem"
    scale_factor: float = 1.02  # a: per-level size ratio
    scale_count: int = 17  # D: pyramid levels
    learning_rate: float = 0.025  # eta: online blending
    scale_sigma: float = 1.0625  # scale label width, in scale-steps
    newton_iterations: int = 5  # sub-grid peak refinement
    scale_lambda: float = 1e-2
    projected_channels: int = 16  # m: channels kept after projection
    translation_lambda: float = 1e-3
    output_sigma_factor: float = 1.0 / 16.0  # translation label width factor
    cg_iterations_init: int = 60
    cg_iterations_update: int = 5
    memory_capacity: int = 30
    memory_decay: float = 0.025
    provider: str = "hog"
    layer: str = ""  # empty: provider's first layer
    cell_size: int = 4
    search_padding: float = 2.0  # search side = padding x target side
    share_extraction: bool = True  # hrsem: serve translation from the full-frame map
    max_canonical_cells: int = 1024

    def validate(self) -> "TrackerConfig":
        checks = [
            (self.method in METHODS, f"method must be one of {METHODS}, got {self.method!r}"),
            (self.scale_factor > 0, f"scale_factor must be > 0, got {self.scale_factor}"),
            (self.scale_count >= 1, f"scale_count must be >= 1, got {self.scale_count}"),
            (self.scale_count == 1 or self.scale_factor > 1,
             f"scale_factor must be > 1 when scale_count > 1, got {self.scale_factor}"),
            (0.0 <= self.learning_rate <= 1.0, f"learning_rate must be in [0, 1], got {self.learning_rate}"),
            (self.scale_sigma > 0, f"scale_sigma must be > 0, got {self.scale_sigma}"),
            (self.newton_iterations >= 1, f"newton_iterations must be >= 1, got {self.newton_iterations}"),
            (self.scale_lambda > 0, f"scale_lambda must be > 0, got {self.scale_lambda}"),
            (self.projected_channels >= 1, f"projected_channels must be >= 1, got {self.projected_channels}"),
            (self.translation_lambda > 0, f"translation_lambda must be > 0, got {self.translation_lambda}"),
            (self.output_sigma_factor > 0, f"output_sigma_factor must be > 0, got {self.output_sigma_factor}"),
            (self.cg_iterations_init >= 1, f"cg_iterations_init must be >= 1, got {self.cg_iterations_init}"),
            (self.cg_iterations_update >= 1, f"cg_iterations_update must be >= 1, got {self.cg_iterations_update}"),
            (self.memory_capacity >= 1, f"memory_capacity must be >= 1, got {self.memory_capacity}"),
            (0.0 < self.memory_decay <= 1.0, f"memory_decay must be in (0, 1], got {self.memory_decay}"),
            (self.cell_size >= 1, f"cell_size must be >= 1, got {self.cell_size}"),
            (self.search_padding > 1.0, f"search_padding must be > 1, got {self.search_padding}"),
            (self.max_canonical_cells >= 16, f"max_canonical_cells must be >= 16, got {self.max_canonical_cells}"),
        ]
        for cond, message in checks:
            if not cond:
                raise InvalidInputError(message)
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TrackerConfig":
        if not isinstance(data, dict):
            raise InvalidInputError("config must be a flat JSON object")
        known = {f.name: f.type for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise InvalidInputError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = {}
        for f in fields(cls):
            if f.name not in data:
                continue
            value = data[f.name]
            caster = type(getattr(cls(), f.name))
            try:
                kwargs[f.name] = caster(value)
            except (TypeError, ValueError) as exc:
                raise InvalidInputError(f"config key {f.name!r}: {exc}") from exc
        return cls(**kwargs).validate()

    @classmethod
    def from_file(cls, path) -> "TrackerConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


@dataclass
class TargetState:
    center: tuple[float, float]  # (cy, cx) pixels
    size: tuple[float, float]  # (h, w) pixels
    scale: float  # cumulative scale factor relative to the init size
    frame_index: int

    def __post_init__(self):
        if not all(np.isfinite(self.center)):
            raise InvalidInputError(f"center must be finite, got {self.center}")
        if min(self.size) <= 0:
            raise InvalidInputError(f"size must be positive, got {self.size}")
        if self.scale <= 0:
            raise InvalidInputError(f"scale must be positive, got {self.scale}")


@dataclass
class TrackResult:
    boxes: np.ndarray  # (T, 4) float (x, y, w, h)
    scores: list[float]
    scale_factors: list[float]
    low_confidence: list[bool]
    frame_times: list[float]  # wall-clock seconds per frame

    @property
    def fps(self) -> float:
        total = sum(self.frame_times)
        return len(self.frame_times) / total if total > 0 else float("inf")


def _shift_sample_spectrum(sample_hat: np.ndarray, delta: tuple[float, float]) -> np.ndarray:
    """Phase-shift so content at (center + delta) moves to the center."""
    h, w = sample_hat.shape[-2:]
    fy = np.fft.fftfreq(h) * h
    fx = np.fft.fftfreq(w) * w
    phase = np.exp(2j * np.pi * (fy[:, None] * delta[0] / h + fx[None, :] * delta[1] / w))
    return sample_hat * phase[None]


def _box_to_state(box) -> tuple[tuple[float, float], tuple[float, float]]:
    x, y, w, h = (float(v) for v in box)
    return (y + h / 2.0, x + w / 2.0), (h, w)


def _state_to_box(center, size) -> np.ndarray:
    cy, cx = center
    h, w = size
    return np.array([cx - w / 2.0, cy - h / 2.0, w, h], dtype=float)


class Tracker:
    """Stateful single-target tracker (one instance per sequence)."""

    def __init__(self, frame, box, config: TrackerConfig | None = None, provider=None):
        self.config = (config or TrackerConfig()).validate()
        cfg = self.config
        self.provider = provider if provider is not None else resolve_provider(
            cfg.provider, cell_size=cfg.cell_size
        )
        desc = self.provider.descriptor()
        self.layer = cfg.layer or desc.layers[0].layer_id
        spec = desc.layer(self.layer)
        self.stride = spec.stride

        image = as_float_image(frame)
        self.frame_shape = image.shape[:2]
        fh, fw = self.frame_shape
        b = np.asarray(box, dtype=float)
        if b.shape != (4,):
            raise InvalidInputError(f"init box must be (x, y, w, h), got {box!r}")
        x, y, w, h = b
        if w * h < 4.0 or w <= 0 or h <= 0:
            raise InvalidInputError(f"init box area must be >= 4 px^2, got {w}x{h}")
        if x < 0 or y < 0 or x + w > fw or y + h > fh:
            raise InvalidInputError(f"init box {box!r} exceeds the {fh}x{fw} frame")
        self._init_box = b.copy()
        center, size = _box_to_state(b)
        self.state = TargetState(center=center, size=size, scale=1.0, frame_index=1)
        self._base_size = size

        # translation geometry (fixed template resolution from frame 1)
        region_px = (size[0] * cfg.search_padding, size[1] * cfg.search_padding)
        self.template_cells = (
            max(4, int(round(region_px[0] / self.stride))),
            max(4, int(round(region_px[1] / self.stride))),
        )
        self.template_px = (
            self.template_cells[0] * self.stride,
            self.template_cells[1] * self.stride,
        )
        target_cells = (size[0] / self.stride, size[1] / self.stride)
        sigma = cfg.output_sigma_factor * float(np.sqrt(target_cells[0] * target_cells[1]))
        label = make_translation_label(self.template_cells, max(sigma, 0.5))
        window = hann_window(self.template_cells)
        penalty = spatial_penalty(self.template_cells, target_cells)

        fmap = self._full_map(image)
        raw = self._translation_features(image, fmap)
        m = min(cfg.projected_channels, raw.shape[2])
        projection = learn_projection(raw * window[:, :, None], m)
        self.filter = TranslationFilter(
            filter_hat=np.zeros((m, *self.template_cells), dtype=complex),
            projection=projection,
            label_hat=np.fft.fft2(label),
            window=window,
            penalty=penalty,
            lam=cfg.translation_lambda,
        )
        self.memory = SampleMemory(capacity=cfg.memory_capacity, decay=cfg.memory_decay)
        self.memory.add(self.filter.prepare(raw))
        self.filter = learn_translation_filter(self.memory, self.filter, cfg.cg_iterations_init)
        self._peak_reference = (float(self.template_cells[0] // 2), float(self.template_cells[1] // 2))
        self._calibrate_peak()

        # scale geometry
        self.scale_label = make_scale_label(cfg.scale_count, cfg.scale_sigma)
        self.canonical_cells = canonical_cell_grid(size, self.stride, cfg.max_canonical_cells)
        self.scale_input_px = (
            self.canonical_cells[0] * self.stride,
            self.canonical_cells[1] * self.stride,
        )
        self._hog_cfg = HogConfig(cell_size=cfg.cell_size)
        self._dsst_px = (
            self.canonical_cells[0] * cfg.cell_size,
            self.canonical_cells[1] * cfg.cell_size,
        )
        sample = self._scale_sample(image, fmap, self.state.center, self.state.size)
        self.scale_filter = learn_scale_filter(sample, self.scale_label, cfg.scale_lambda)

    def _calibrate_peak(self) -> None:
        """Record where the current filter actually peaks on its newest
        training sample.

        The regularized fit leaves the self-response maximum a small,
        persistent fraction of a cell off the label center.  Measuring
        displacement against the realized peak instead of the ideal one stops
        that constant from being integrated into the position estimate frame
        after frame.
        """
        try:
            pos, _, _ = localize(
                self.filter, self.memory.samples[-1], self.config.newton_iterations
            )
            self._peak_reference = (float(pos[0]), float(pos[1]))
        except DegenerateResponseError:
            pass

    # ------------------------------------------------------------------ features
    def _full_map(self, image) -> FeatureMap | None:
        """One full-frame extraction — hrsem's single feature pass per frame."""
        if self.config.method != "hrsem":
            return None
        return provider_extract(self.provider, image, [self.layer])[0]

    def _translation_features(self, image, fmap: FeatureMap | None) -> np.ndarray:
        cfg = self.config
        cy, cx = self.state.center
        h, w = self.state.size
        region = (h * cfg.search_padding, w * cfg.search_padding)
        if fmap is not None and cfg.share_extraction:
            hh = region[0] / self.stride / 2.0
            ww = region[1] / self.stride / 2.0
            fy, fx = cy / self.stride, cx / self.stride
            return sample_window(
                fmap.data, (fy - hh, fy + hh, fx - ww, fx + ww), self.template_cells
            )
        rect = center_rect((cy, cx), region)
        patch = crop_replicate(image, rect)
        patch = resample(patch, self.template_px)
        return provider_extract(self.provider, patch, [self.layer])[0].data

    def _pyramid(self, size) -> ScalePyramid:
        return build_scale_pyramid(size[0], size[1], self.config.scale_factor, self.config.scale_count)

    def _scale_sample(self, image, fmap, center, size):
        method = self.config.method
        pyramid = self._pyramid(size)
        if method == "hrsem":
            fmap = fmap if fmap is not None else self._full_map(image)
            return holistic_scale_sample(fmap, center, pyramid, self.canonical_cells)
        if method == "rrsem":
            return region_scale_sample(
                image, center, pyramid, self.provider, self.scale_input_px, self.layer
            )
        return baseline_scale_sample(image, center, pyramid, self._dsst_px, self._hog_cfg)

    # ------------------------------------------------------------------ tracking
    def step(self, frame) -> tuple[np.ndarray, dict]:
        cfg = self.config
        image = as_float_image(frame)
        if image.shape[:2] != self.frame_shape:
            raise InvalidInputError(
                f"frame dims {image.shape[:2]} != init dims {self.frame_shape}"
            )
        fh, fw = self.frame_shape
        fmap = self._full_map(image)
        low_confidence = False

        # --- translation detection at the previous position/scale
        raw = self._translation_features(image, fmap)
        sample_hat = self.filter.prepare(raw)
        delta_cells = (0.0, 0.0)
        score = 0.0
        try:
            pos, score, _ = localize(self.filter, sample_hat, cfg.newton_iterations)
            hc, wc = self.template_cells
            delta_cells = (
                float(signed_wrap(pos[0] - self._peak_reference[0], hc)),
                float(signed_wrap(pos[1] - self._peak_reference[1], wc)),
            )
            region = (
                self.state.size[0] * cfg.search_padding,
                self.state.size[1] * cfg.search_padding,
            )
            px_per_cell = (region[0] / hc, region[1] / wc)
            cy = self.state.center[0] + delta_cells[0] * px_per_cell[0]
            cx = self.state.center[1] + delta_cells[1] * px_per_cell[1]
            center = (min(max(cy, 0.0), fh - 1.0), min(max(cx, 0.0), fw - 1.0))
        except DegenerateResponseError:
            low_confidence = True
            center = self.state.center

        # --- scale detection at the new position, previous size
        scale_degenerate = False
        factor = 1.0
        level = 0.0
        detection_sample = None
        try:
            detection_sample = self._scale_sample(image, fmap, center, self.state.size)
            response = detect_scale(
                self.scale_filter, detection_sample, self._pyramid(self.state.size),
                cfg.newton_iterations,
            )
            if response.degenerate:
                scale_degenerate = True
            else:
                factor = response.factor
                level = response.level
        except (InvalidInputError, DegenerateResponseError):
            scale_degenerate = True

        new_h = min(max(self.state.size[0] * factor, 4.0), float(fh))
        new_w = min(max(self.state.size[1] * factor, 4.0), float(fw))
        size = (new_h, new_w)
        self.state = TargetState(
            center=center,
            size=size,
            scale=float(np.sqrt((new_h / self._base_size[0]) * (new_w / self._base_size[1]))),
            frame_index=self.state.frame_index + 1,
        )

        # --- model updates (skipped on low-confidence frames)
        if not low_confidence:
            learn_hat = _shift_sample_spectrum(sample_hat, delta_cells)
            self.memory.add(learn_hat)
            try:
                self.filter = learn_translation_filter(
                    self.memory, self.filter, cfg.cg_iterations_update
                )
                self._calibrate_peak()
            except NumericalFailureError as exc:
                if exc.last_iterate is not None:
                    self.filter.filter_hat = exc.last_iterate
                low_confidence = True

        if not (low_confidence or scale_degenerate):
            try:
                numerator, denominator = self._scale_learn_terms(
                    image, fmap, detection_sample, level
                )
                self.scale_filter = update_scale_filter(
                    self.scale_filter, numerator, denominator, cfg.learning_rate
                )
            except InvalidInputError:
                scale_degenerate = True

        box = _state_to_box(self.state.center, self.state.size)
        info = {
            "score": float(score),
            "scale_factor": float(factor),
            "low_confidence": bool(low_confidence or scale_degenerate),
        }
        return box, info

    def _scale_learn_terms(self, image, fmap, detection_sample, level: float):
        """New numerator/denominator for the per-frame scale update."""
        cfg = self.config
        if cfg.method == "rrsem" and detection_sample is not None:
            # reuse the detection batch: shift the label to the detected level
            shift = int(round(level))
            shifted = np.fft.ifft(
                shift_label_spectrum(np.fft.fft(self.scale_label), shift)
            ).real
            numerator, denominator, _ = scale_filter_terms(
                detection_sample, shifted, cfg.scale_lambda
            )
            return numerator, denominator
        # hrsem re-crops the same feature map at the new size; dsst re-extracts
        sample = self._scale_sample(image, fmap, self.state.center, self.state.size)
        numerator, denominator, _ = scale_filter_terms(
            sample, self.scale_label, cfg.scale_lambda
        )
        return numerator, denominator

    @property
    def box(self) -> np.ndarray:
        return _state_to_box(self.state.center, self.state.size)


def track_sequence(frames, init_box, config: TrackerConfig | None = None, provider=None) -> TrackResult:
    """Initialize on the first frame, step through the rest."""
    if hasattr(frames, "frame") and hasattr(frames, "__len__"):
        get = frames.frame
        count = len(frames)
    else:
        items = list(frames)
        get = lambda i: items[i]
        count = len(items)
    if count < 1:
        raise InvalidInputError("need at least one frame")

    t0 = time.perf_counter()
    tracker = Tracker(get(0), init_box, config, provider=provider)
    times = [time.perf_counter() - t0]
    boxes = [np.asarray(init_box, dtype=float)]
    scores = [float("nan")]
    factors = [1.0]
    flags = [False]
    for i in range(1, count):
        t0 = time.perf_counter()
        box, info = tracker.step(get(i))
        times.append(time.perf_counter() - t0)
        boxes.append(box)
        scores.append(info["score"])
        factors.append(info["scale_factor"])
        flags.append(info["low_confidence"])
    return TrackResult(
        boxes=np.asarray(boxes),
        scores=scores,
        scale_factors=factors,
        low_confidence=flags,
        frame_times=times,
    )
