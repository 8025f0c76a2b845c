"""Wire models for the tracking service.

Every request body is strict (unknown fields rejected) so a client typo
fails loudly instead of silently running with defaults.  Tracker
configuration travels as a partial override: only the provided keys replace
the built-in defaults, and the full resolved configuration is echoed back in
responses so runs are reproducible from their output alone.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from ..tracking import TrackerConfig


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConfigOverride(StrictModel):
    """Partial tracker configuration; unset fields keep their defaults."""

    method: str | None = None
    scale_factor: float | None = None
    scale_count: int | None = None
    learning_rate: float | None = None
    scale_sigma: float | None = None
    newton_iterations: int | None = None
    scale_lambda: float | None = None
    projected_channels: int | None = None
    translation_lambda: float | None = None
    output_sigma_factor: float | None = None
    cg_iterations_init: int | None = None
    cg_iterations_update: int | None = None
    memory_capacity: int | None = None
    memory_decay: float | None = None
    provider: str | None = None
    layer: str | None = None
    cell_size: int | None = None
    search_padding: float | None = None
    share_extraction: bool | None = None
    max_canonical_cells: int | None = None

    def resolve(self, method: str | None = None, provider: str | None = None) -> TrackerConfig:
        """Build a validated TrackerConfig; explicit arguments win over body fields."""
        data = {k: v for k, v in self.model_dump().items() if v is not None}
        if method is not None:
            data["method"] = method
        if provider is not None:
            data["provider"] = provider
        return TrackerConfig.from_dict(data)


class TrackRequest(StrictModel):
    sequence: str = Field(description="server-local sequence directory")
    init: tuple[float, float, float, float] | None = Field(
        default=None, description="initial (x, y, w, h); defaults to the first ground-truth box"
    )
    config: ConfigOverride = Field(default_factory=ConfigOverride)
    method: str | None = None
    provider: str | None = None


class TrackResponse(StrictModel):
    sequence: str
    frames: int
    boxes: list[tuple[float, float, float, float]]
    scores: list[float | None]  # None on the init frame (no detection ran)
    scale_factors: list[float]
    low_confidence: list[bool]
    frame_ms: list[float]
    fps: float
    config: dict


class BenchRequest(StrictModel):
    dataset: str = Field(description="server-local directory of sequence directories")
    methods: list[str] = Field(default=["hrsem", "rrsem", "dsst"], min_length=1)
    config: ConfigOverride = Field(default_factory=ConfigOverride)
    provider: str | None = None
    workers: int = Field(default=0, ge=0, description="0 = one per logical core")


class MethodReport(StrictModel):
    method: str
    report: dict
    failures: dict[str, str]


class BenchResponse(StrictModel):
    dataset: str
    sequences: list[str]
    reports: list[MethodReport]
    comparison: list[dict]


class SynthRequest(StrictModel):
    kind: str
    frame_size: tuple[int, int] = (160, 200)
    object_size: tuple[float, float] = (40.0, 40.0)
    rate: float = 1.02
    drift: tuple[float, float] = (2.0, 0.0)
    length: int = 30
    seed: int = 0
    name: str | None = None


class SynthResponse(StrictModel):
    name: str
    frames: int
    frames_png_b64: list[str]
    ground_truth: str = Field(description="groundtruth_rect.txt content, 1-indexed")
    attributes: list[str]
    boxes: list[tuple[float, float, float, float]]


class OracleRequest(StrictModel):
    seed: int = 0
    force_fail: str | None = None


class OracleEntry(StrictModel):
    name: str
    passed: bool
    detail: str
    seconds: float


class OracleResponse(StrictModel):
    results: list[OracleEntry]
    passed: bool


class SessionCreateRequest(StrictModel):
    config: ConfigOverride = Field(default_factory=ConfigOverride)
    method: str | None = None
    provider: str | None = None


class SessionCreateResponse(StrictModel):
    session_id: str
    config: dict


class FramePayload(StrictModel):
    """One frame, either by server-local path or as base64 image bytes."""

    frame_path: str | None = None
    frame_b64: str | None = None


class SessionInitRequest(FramePayload):
    box: tuple[float, float, float, float]


class SessionStepResponse(StrictModel):
    session_id: str
    frame_index: int
    box: tuple[float, float, float, float]
    score: float | None  # None on the init frame (no detection ran)
    scale_factor: float
    low_confidence: bool


class SessionInfo(StrictModel):
    session_id: str
    initialized: bool
    frames_processed: int
    box: tuple[float, float, float, float] | None
    config: dict


class HealthResponse(StrictModel):
    status: str
    version: str


class ProvidersResponse(StrictModel):
    providers: list[str]
    methods: list[str]
    env_override: str
