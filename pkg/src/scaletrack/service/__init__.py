"""HTTP service wrapping the tracking toolkit.

``create_app()`` builds a FastAPI application exposing batch endpoints
(track / bench / synth / oracle) and stateful per-sequence tracking
sessions.  The CLI is a thin client of this app — in-process by default,
over the network against ``uvicorn scaletrack.service:app`` otherwise.
"""

from .app import app, create_app

__all__ = ["app", "create_app"]
