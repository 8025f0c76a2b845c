"""Correlation-filter visual tracking with learned scale estimation.

The package tracks a single object through a video by learning a
discriminative correlation filter over translated image patches, paired
with a dedicated one-dimensional correlation filter over a pyramid of
scaled appearance samples.  Two scale-sample constructions are provided —
one that crops every pyramid level from a single full-frame feature map,
and one that extracts features once over a batched stack of image crops —
alongside a deliberately unbatched per-level baseline.

Entry points:

* :class:`Tracker` / :func:`track_sequence` — frame-by-frame tracking.
* :class:`TrackerConfig` — every tunable, with validated defaults.
* :func:`evaluate` — precision/success scoring against ground truth.
* :func:`synth_sequence` — synthetic sequences with exact ground truth.
* :func:`run_oracles` — brute-force verification of the numerical core.
* ``scaletrack.service`` — the HTTP application (``create_app``).
* ``scaletrack`` console script — the command-line client.
"""

from __future__ import annotations

from .errors import (
    ContractError,
    DegenerateResponseError,
    IngestionError,
    InvalidInputError,
    NumericalFailureError,
    ProviderError,
    ScaletrackError,
)
from .evaluation import (
    EvalReport,
    Sequence,
    SequenceScores,
    center_error,
    evaluate,
    iou,
    load_ground_truth,
    load_sequence,
    precision_curve,
    score_sequence,
    success_curve,
)
from .features import (
    ENV_VAR,
    FeatureProvider,
    HogProvider,
    MockProvider,
    RemoteProvider,
    resolve_provider,
)
from .oracles import ORACLE_NAMES, OracleResult, run_oracles
from .scale import (
    ScaleFilter,
    ScalePyramid,
    ScaleSample,
    build_scale_pyramid,
    detect_scale,
    learn_scale_filter,
    make_scale_label,
    update_scale_filter,
)
from .synthetic import SYNTH_KINDS, synth_sequence, write_sequence
from .tensorops import Spectrum, circular_correlate, fft, hann_window, ifft, refine_peak
from .tracking import METHODS, Tracker, TrackerConfig, TrackResult, track_sequence
from .translation import (
    SampleMemory,
    TranslationFilter,
    learn_translation_filter,
    localize,
    make_translation_label,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ScaletrackError",
    "InvalidInputError",
    "ContractError",
    "ProviderError",
    "NumericalFailureError",
    "DegenerateResponseError",
    "IngestionError",
    # tracking pipeline
    "METHODS",
    "Tracker",
    "TrackerConfig",
    "TrackResult",
    "track_sequence",
    # translation model
    "SampleMemory",
    "TranslationFilter",
    "learn_translation_filter",
    "localize",
    "make_translation_label",
    # scale model
    "ScalePyramid",
    "ScaleSample",
    "ScaleFilter",
    "build_scale_pyramid",
    "make_scale_label",
    "learn_scale_filter",
    "update_scale_filter",
    "detect_scale",
    # features
    "FeatureProvider",
    "HogProvider",
    "MockProvider",
    "RemoteProvider",
    "resolve_provider",
    "ENV_VAR",
    # tensor core
    "Spectrum",
    "fft",
    "ifft",
    "hann_window",
    "circular_correlate",
    "refine_peak",
    # evaluation
    "Sequence",
    "SequenceScores",
    "EvalReport",
    "load_sequence",
    "load_ground_truth",
    "iou",
    "center_error",
    "precision_curve",
    "success_curve",
    "score_sequence",
    "evaluate",
    # synthetic data
    "SYNTH_KINDS",
    "synth_sequence",
    "write_sequence",
    # verification
    "ORACLE_NAMES",
    "OracleResult",
    "run_oracles",
]
