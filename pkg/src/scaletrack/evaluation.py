"""Dataset ingestion, tracking metrics, and one-pass evaluation reports.

Sequences follow the common benchmark directory layout: an ``img/`` folder of
numbered frames, a ``groundtruth_rect.txt`` of one ``x,y,w,h`` line per frame
(comma/tab/space separated, 1-indexed pixel origin), and an optional
``attributes.txt`` with one tag per line.  Boxes are converted to 0-indexed
internally at ingestion.

Metrics: precision curve over center-error thresholds 0..50 px (step 1),
success curve over 101 overlap thresholds in [0, 1] (strict IoU > threshold),
AUC as the mean of the success curve.  Aggregates across sequences weight by
frame count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IngestionError, InvalidInputError

ATTRIBUTE_TAGS = ("IV", "SV", "FM", "OV", "BC", "OPR", "OCC", "DEF", "MB", "IPR", "LR")

PRECISION_THRESHOLDS = np.arange(0, 51, dtype=float)  # px
SUCCESS_THRESHOLDS = np.linspace(0.0, 1.0, 101)

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


@dataclass
class Sequence:
    """Ordered frames (paths or in-memory arrays) with per-frame ground truth."""

    name: str
    frames: list  # list[Path] or list[np.ndarray]
    boxes: np.ndarray  # (N, 4) float, 0-indexed (x, y, w, h)
    attributes: tuple[str, ...] = ()

    def __post_init__(self):
        self.boxes = np.asarray(self.boxes, dtype=float)
        if self.boxes.ndim != 2 or self.boxes.shape[1] != 4:
            raise IngestionError(f"ground truth must be (N, 4), got {self.boxes.shape}")
        if len(self.frames) != self.boxes.shape[0]:
            raise IngestionError(
                f"{len(self.frames)} frames vs {self.boxes.shape[0]} boxes"
            )
        if np.any(self.boxes[:, 2:] <= 0):
            raise IngestionError("ground-truth boxes must have positive area")

    def __len__(self) -> int:
        return len(self.frames)

    def frame(self, index: int) -> np.ndarray:
        item = self.frames[index]
        if isinstance(item, np.ndarray):
            return item
        from PIL import Image

        with Image.open(item) as img:
            return np.asarray(img)


def _parse_box_line(line: str, lineno: int, path: Path) -> list[float]:
    text = line.strip()
    for sep in (",", "\t", ";"):
        text = text.replace(sep, " ")
    parts = text.split()
    if len(parts) != 4:
        raise IngestionError(f"{path}:{lineno}: expected 4 values, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise IngestionError(f"{path}:{lineno}: malformed number ({exc})") from exc


def load_ground_truth(path: Path) -> np.ndarray:
    """Parse x,y,w,h lines; convert the 1-indexed origin to 0-indexed."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rows.append(_parse_box_line(line, lineno, path))
    if not rows:
        raise IngestionError(f"{path}: no ground-truth boxes")
    boxes = np.asarray(rows, dtype=float)
    boxes[:, 0] -= 1.0
    boxes[:, 1] -= 1.0
    return boxes


def find_frames(directory) -> list[Path]:
    """Discover the ordered frame files of a benchmark-layout directory."""
    root = Path(directory)
    if not root.is_dir():
        raise IngestionError(f"sequence directory not found: {root}")
    img_dir = root / "img"
    if not img_dir.is_dir():
        candidates = [
            d for d in sorted(root.iterdir())
            if d.is_dir() and any(p.suffix.lower() in _IMAGE_SUFFIXES for p in d.iterdir())
        ]
        if not candidates:
            raise IngestionError(f"{root}: no image folder found")
        img_dir = candidates[0]
    frames = sorted(
        p for p in img_dir.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES
    )
    if not frames:
        raise IngestionError(f"{img_dir}: no image files")
    return frames


def load_sequence(directory) -> Sequence:
    """Load one benchmark-layout sequence directory."""
    root = Path(directory)
    frames = find_frames(root)
    gt_path = root / "groundtruth_rect.txt"
    if not gt_path.is_file():
        txts = sorted(root.glob("groundtruth*.txt"))
        if not txts:
            raise IngestionError(f"{root}: missing ground-truth file")
        gt_path = txts[0]
    boxes = load_ground_truth(gt_path)
    if len(frames) != boxes.shape[0]:
        raise IngestionError(f"{len(frames)} frames vs {boxes.shape[0]} boxes in {root}")
    attrs: tuple[str, ...] = ()
    attr_path = root / "attributes.txt"
    if attr_path.is_file():
        tags = [t.strip().upper() for t in attr_path.read_text(encoding="utf-8").splitlines() if t.strip()]
        unknown = [t for t in tags if t not in ATTRIBUTE_TAGS]
        if unknown:
            raise IngestionError(f"{attr_path}: unknown attribute tags {unknown}")
        attrs = tuple(tags)
    return Sequence(name=root.name, frames=list(frames), boxes=boxes, attributes=attrs)


def _check_box(box) -> np.ndarray:
    b = np.asarray(box, dtype=float)
    if b.shape != (4,):
        raise InvalidInputError(f"box must be (x, y, w, h), got shape {b.shape}")
    if b[2] <= 0 or b[3] <= 0:
        raise InvalidInputError(f"box must have positive area, got {b}")
    return b


def iou(box_a, box_b) -> float:
    """Intersection-over-union of two (x, y, w, h) boxes."""
    a = _check_box(box_a)
    b = _check_box(box_b)
    x0 = max(a[0], b[0])
    y0 = max(a[1], b[1])
    x1 = min(a[0] + a[2], b[0] + b[2])
    y1 = min(a[1] + a[3], b[1] + b[3])
    inter = max(0.0, x1 - x0) * max(0.0, y1 - y0)
    union = a[2] * a[3] + b[2] * b[3] - inter
    return float(inter / union)


def center_error(box_a, box_b) -> float:
    """Euclidean distance between box centers, pixels."""
    a = _check_box(box_a)
    b = _check_box(box_b)
    dx = (a[0] + a[2] / 2) - (b[0] + b[2] / 2)
    dy = (a[1] + a[3] / 2) - (b[1] + b[3] / 2)
    return float(np.hypot(dx, dy))


def precision_curve(errors) -> np.ndarray:
    """Fraction of frames with center error <= tau, tau = 0..50 px."""
    e = np.asarray(errors, dtype=float)
    if e.ndim != 1 or e.size == 0:
        raise InvalidInputError("errors must be a non-empty 1-D array")
    return (e[None, :] <= PRECISION_THRESHOLDS[:, None]).mean(axis=1)


def success_curve(overlaps) -> np.ndarray:
    """Fraction of frames with IoU strictly greater than each threshold."""
    v = np.asarray(overlaps, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError("overlaps must be a non-empty 1-D array")
    return (v[None, :] > SUCCESS_THRESHOLDS[:, None]).mean(axis=1)


@dataclass
class SequenceScores:
    name: str
    frames: int
    precision: np.ndarray  # 51 points
    success: np.ndarray  # 101 points
    errors: np.ndarray
    overlaps: np.ndarray

    @property
    def precision_at_20(self) -> float:
        return float(self.precision[20])

    @property
    def success_at_half(self) -> float:
        return float(self.success[50])

    @property
    def auc(self) -> float:
        return float(self.success.mean())


@dataclass
class EvalReport:
    """Per-sequence scores plus frame-weighted aggregate and attribute cuts."""

    per_sequence: list[SequenceScores]
    precision: np.ndarray
    success: np.ndarray
    attribute_reports: dict = field(default_factory=dict)

    @property
    def precision_at_20(self) -> float:
        return float(self.precision[20])

    @property
    def success_at_half(self) -> float:
        return float(self.success[50])

    @property
    def auc(self) -> float:
        return float(self.success.mean())

    def to_dict(self) -> dict:
        def curve(v):
            return [round(float(x), 10) for x in v]

        return {
            "aggregation": "frame-weighted mean across sequences",
            "precision_at_20": round(self.precision_at_20, 10),
            "success_at_0.5": round(self.success_at_half, 10),
            "auc": round(self.auc, 10),
            "precision_curve": curve(self.precision),
            "success_curve": curve(self.success),
            "sequences": [
                {
                    "name": s.name,
                    "frames": s.frames,
                    "precision_at_20": round(s.precision_at_20, 10),
                    "success_at_0.5": round(s.success_at_half, 10),
                    "auc": round(s.auc, 10),
                }
                for s in self.per_sequence
            ],
            "attributes": {
                tag: {
                    "sequences": rep["sequences"],
                    "frames": rep["frames"],
                    "precision_at_20": round(rep["precision_at_20"], 10),
                    "success_at_0.5": round(rep["success_at_0.5"], 10),
                    "auc": round(rep["auc"], 10),
                }
                for tag, rep in sorted(self.attribute_reports.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _aggregate(scores: list[SequenceScores]) -> tuple[np.ndarray, np.ndarray]:
    weights = np.array([s.frames for s in scores], dtype=float)
    weights /= weights.sum()
    precision = sum(w * s.precision for w, s in zip(weights, scores))
    success = sum(w * s.success for w, s in zip(weights, scores))
    return precision, success


def score_sequence(boxes, sequence: Sequence) -> SequenceScores:
    pred = np.asarray(boxes, dtype=float)
    if pred.shape != sequence.boxes.shape:
        raise InvalidInputError(
            f"{sequence.name}: {pred.shape[0]} predicted boxes vs {len(sequence)} frames"
        )
    errors = np.array([center_error(p, g) for p, g in zip(pred, sequence.boxes)])
    overlaps = np.array([iou(p, g) for p, g in zip(pred, sequence.boxes)])
    return SequenceScores(
        name=sequence.name,
        frames=len(sequence),
        precision=precision_curve(errors),
        success=success_curve(overlaps),
        errors=errors,
        overlaps=overlaps,
    )


def evaluate(box_lists, sequences) -> EvalReport:
    """One-pass evaluation: one predicted box list per sequence."""
    if len(box_lists) != len(sequences):
        raise InvalidInputError(
            f"{len(box_lists)} result lists vs {len(sequences)} sequences"
        )
    if not sequences:
        raise InvalidInputError("nothing to evaluate")
    order = np.argsort([s.name for s in sequences], kind="stable")
    scores = [score_sequence(box_lists[i], sequences[i]) for i in order]
    precision, success = _aggregate(scores)
    attribute_reports = {}
    for tag in ATTRIBUTE_TAGS:
        tagged = [
            s for s, i in zip(scores, order) if tag in sequences[i].attributes
        ]
        if not tagged:
            continue
        p, s_curve = _aggregate(tagged)
        attribute_reports[tag] = {
            "sequences": [t.name for t in tagged],
            "frames": int(sum(t.frames for t in tagged)),
            "precision_at_20": float(p[20]),
            "success_at_0.5": float(s_curve[50]),
            "auc": float(s_curve.mean()),
        }
    return EvalReport(
        per_sequence=scores,
        precision=precision,
        success=success,
        attribute_reports=attribute_reports,
    )


def curve_csv(thresholds, values) -> str:
    lines = ["threshold,value"]
    for t, v in zip(thresholds, values):
        lines.append(f"{t:.6g},{v:.10g}")
    return "\n".join(lines) + "\n"
