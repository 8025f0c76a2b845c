"""FastAPI application: batch tracking endpoints plus stateful sessions.

Path-taking endpoints (track, bench) read sequences from the server's
filesystem; responses carry all result *data* so clients own their file
writing.  Error mapping: invalid input or unreadable data → 400, unknown
session or path → 404, numerical/tracking breakdown → 500 with the error
class named in the body.  Sessions are guarded by per-session locks —
concurrent steps on one session serialize, distinct sessions run freely.
"""

from __future__ import annotations

import base64
import io
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException

from ..errors import IngestionError, InvalidInputError, ScaletrackError
from ..evaluation import evaluate, find_frames, load_sequence
from ..oracles import all_passed, run_oracles
from ..synthetic import SYNTH_KINDS, frame_png, ground_truth_text, synth_sequence
from ..tracking import METHODS, Tracker, TrackerConfig, track_sequence
from . import schemas

API_VERSION = "0.1.0"


class Session:
    def __init__(self, config: TrackerConfig):
        self.config = config
        self.tracker: Tracker | None = None
        self.frames_processed = 0
        self.lock = threading.Lock()


def _load_frame(payload: schemas.FramePayload) -> np.ndarray:
    from PIL import Image

    if (payload.frame_path is None) == (payload.frame_b64 is None):
        raise HTTPException(400, "provide exactly one of frame_path, frame_b64")
    if payload.frame_path is not None:
        path = Path(payload.frame_path)
        if not path.is_file():
            raise HTTPException(404, f"frame not found: {path}")
        with Image.open(path) as img:
            return np.asarray(img)
    try:
        raw = base64.b64decode(payload.frame_b64, validate=True)
        with Image.open(io.BytesIO(raw)) as img:
            return np.asarray(img)
    except Exception as exc:
        raise HTTPException(400, f"frame_b64 is not a decodable image: {exc}") from exc


def _http_error(exc: ScaletrackError) -> HTTPException:
    name = type(exc).__name__
    if isinstance(exc, (InvalidInputError, IngestionError)):
        return HTTPException(400, {"error": name, "detail": str(exc)})
    return HTTPException(500, {"error": name, "detail": str(exc)})


def _json_scores(scores) -> list[float | None]:
    return [float(s) if np.isfinite(s) else None for s in scores]


class FrameFolder:
    """Lazy frame access over a plain image directory (no ground truth)."""

    def __init__(self, paths):
        self.paths = list(paths)

    def __len__(self) -> int:
        return len(self.paths)

    def frame(self, index: int) -> np.ndarray:
        from PIL import Image

        with Image.open(self.paths[index]) as img:
            return np.asarray(img)


def create_app() -> FastAPI:
    app = FastAPI(title="scaletrack", version=API_VERSION)
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=API_VERSION)

    @app.get("/providers", response_model=schemas.ProvidersResponse)
    def providers():
        from ..features.registry import ENV_VAR

        return schemas.ProvidersResponse(
            providers=["hog", "hog:<cell>", "mock", "mock:<stride>,<channels>", "remote:<host>:<port>"],
            methods=list(METHODS),
            env_override=ENV_VAR,
        )

    @app.post("/track", response_model=schemas.TrackResponse)
    def track(req: schemas.TrackRequest):
        root = Path(req.sequence)
        if not root.is_dir():
            raise HTTPException(404, f"sequence directory not found: {root}")
        try:
            config = req.config.resolve(req.method, req.provider)
            try:
                sequence = load_sequence(root)
                init = req.init if req.init is not None else tuple(sequence.boxes[0])
            except IngestionError:
                if req.init is None:
                    raise  # no ground truth and no explicit init box
                sequence = FrameFolder(find_frames(root))
                init = req.init
            result = track_sequence(sequence, init, config)
        except ScaletrackError as exc:
            raise _http_error(exc) from exc
        return schemas.TrackResponse(
            sequence=getattr(sequence, "name", root.name),
            frames=len(sequence),
            boxes=[tuple(b) for b in result.boxes],
            scores=_json_scores(result.scores),
            scale_factors=result.scale_factors,
            low_confidence=result.low_confidence,
            frame_ms=[t * 1e3 for t in result.frame_times],
            fps=result.fps,
            config=config.to_dict(),
        )

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench(req: schemas.BenchRequest):
        root = Path(req.dataset)
        if not root.is_dir():
            raise HTTPException(404, f"dataset directory not found: {root}")
        seq_dirs = sorted(p for p in root.iterdir() if p.is_dir())
        if not seq_dirs:
            raise HTTPException(400, {"error": "InvalidInputError", "detail": f"no sequence directories under {root}"})
        for m in req.methods:
            if m not in METHODS:
                raise HTTPException(400, {"error": "InvalidInputError", "detail": f"unknown method {m!r}"})

        sequences = []
        load_failures: dict[str, str] = {}
        for p in seq_dirs:
            try:
                sequences.append(load_sequence(p))
            except ScaletrackError as exc:
                load_failures[p.name] = str(exc)
        if not sequences:
            raise HTTPException(400, {"error": "IngestionError", "detail": "every sequence failed to load"})

        workers = req.workers if req.workers > 0 else (len(sequences) if len(sequences) < 8 else 8)
        reports: list[schemas.MethodReport] = []
        comparison: list[dict] = []
        for method in req.methods:
            try:
                config = req.config.resolve(method, req.provider)
            except ScaletrackError as exc:
                raise _http_error(exc) from exc
            failures = dict(load_failures)
            results: dict[str, np.ndarray] = {}

            def run(seq):
                return seq.name, track_sequence(seq, tuple(seq.boxes[0]), config)

            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {pool.submit(run, seq): seq for seq in sequences}
                for future, seq in futures.items():
                    try:
                        name, result = future.result()
                        results[name] = result.boxes
                    except ScaletrackError as exc:
                        failures[seq.name] = str(exc)
            if not results:
                raise HTTPException(500, {"error": "TrackingFailure", "detail": f"all sequences failed for {method}: {failures}"})
            scored = [s for s in sequences if s.name in results]
            report = evaluate([results[s.name] for s in scored], scored)
            reports.append(schemas.MethodReport(method=method, report=report.to_dict(), failures=failures))
            comparison.append(
                {
                    "method": method,
                    "sequences": len(scored),
                    "precision_at_20": report.precision_at_20,
                    "success_at_0.5": report.success_at_half,
                    "auc": report.auc,
                }
            )
        return schemas.BenchResponse(
            dataset=str(root),
            sequences=[s.name for s in sequences],
            reports=reports,
            comparison=comparison,
        )

    @app.post("/synth", response_model=schemas.SynthResponse)
    def synth(req: schemas.SynthRequest):
        if req.kind not in SYNTH_KINDS:
            raise HTTPException(400, {"error": "InvalidInputError", "detail": f"kind must be one of {SYNTH_KINDS}, got {req.kind!r}"})
        try:
            sequence = synth_sequence(
                req.kind,
                frame_size=req.frame_size,
                object_size=req.object_size,
                rate=req.rate,
                drift=req.drift,
                length=req.length,
                seed=req.seed,
                name=req.name,
            )
        except ScaletrackError as exc:
            raise _http_error(exc) from exc
        return schemas.SynthResponse(
            name=sequence.name,
            frames=len(sequence),
            frames_png_b64=[
                base64.b64encode(frame_png(sequence.frame(i))).decode("ascii")
                for i in range(len(sequence))
            ],
            ground_truth=ground_truth_text(sequence.boxes),
            attributes=list(sequence.attributes),
            boxes=[tuple(b) for b in sequence.boxes],
        )

    @app.post("/oracle", response_model=schemas.OracleResponse)
    def oracle(req: schemas.OracleRequest):
        try:
            results = run_oracles(seed=req.seed, force_fail=req.force_fail)
        except InvalidInputError as exc:
            raise _http_error(exc) from exc
        return schemas.OracleResponse(
            results=[
                schemas.OracleEntry(name=r.name, passed=r.passed, detail=r.detail, seconds=r.seconds)
                for r in results
            ],
            passed=all_passed(results),
        )

    # ------------------------------------------------------------------ sessions

    def _get_session(session_id: str) -> Session:
        with sessions_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id}")
        return session

    @app.post("/sessions", response_model=schemas.SessionCreateResponse, status_code=201)
    def create_session(req: schemas.SessionCreateRequest):
        try:
            config = req.config.resolve(req.method, req.provider)
        except ScaletrackError as exc:
            raise _http_error(exc) from exc
        session_id = uuid.uuid4().hex
        with sessions_lock:
            sessions[session_id] = Session(config)
        return schemas.SessionCreateResponse(session_id=session_id, config=config.to_dict())

    @app.post("/sessions/{session_id}/init", response_model=schemas.SessionStepResponse)
    def init_session(session_id: str, req: schemas.SessionInitRequest):
        session = _get_session(session_id)
        frame = _load_frame(req)
        with session.lock:
            if session.tracker is not None:
                raise HTTPException(409, f"session {session_id} is already initialized")
            try:
                session.tracker = Tracker(frame, req.box, session.config)
            except ScaletrackError as exc:
                raise _http_error(exc) from exc
            session.frames_processed = 1
            box = session.tracker.box
        return schemas.SessionStepResponse(
            session_id=session_id,
            frame_index=0,
            box=tuple(box),
            score=None,
            scale_factor=1.0,
            low_confidence=False,
        )

    @app.post("/sessions/{session_id}/step", response_model=schemas.SessionStepResponse)
    def step_session(session_id: str, req: schemas.FramePayload):
        session = _get_session(session_id)
        frame = _load_frame(req)
        with session.lock:
            if session.tracker is None:
                raise HTTPException(409, f"session {session_id} is not initialized")
            try:
                box, info = session.tracker.step(frame)
            except ScaletrackError as exc:
                raise _http_error(exc) from exc
            session.frames_processed += 1
            index = session.frames_processed - 1
        return schemas.SessionStepResponse(
            session_id=session_id,
            frame_index=index,
            box=tuple(box),
            score=info["score"],
            scale_factor=info["scale_factor"],
            low_confidence=info["low_confidence"],
        )

    @app.get("/sessions/{session_id}", response_model=schemas.SessionInfo)
    def session_info(session_id: str):
        session = _get_session(session_id)
        with session.lock:
            box = tuple(session.tracker.box) if session.tracker is not None else None
            return schemas.SessionInfo(
                session_id=session_id,
                initialized=session.tracker is not None,
                frames_processed=session.frames_processed,
                box=box,
                config=session.config.to_dict(),
            )

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        with sessions_lock:
            if sessions.pop(session_id, None) is None:
                raise HTTPException(404, f"unknown session {session_id}")

    return app


app = create_app()
