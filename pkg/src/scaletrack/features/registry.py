"""Provider selection by name, with environment override.

Accepted names:
  "hog"                    — the in-repo 31-channel HOG provider
  "hog:<cell>"             — HOG at a non-default cell size
  "mock" / "mock:<s>,<g>"  — deterministic test provider (stride s, g channels)
  "remote:<host>:<port>"   — client for the out-of-process wire protocol

The SCALETRACK_PROVIDER environment variable, when set and non-empty,
overrides whatever name was requested.
"""

from __future__ import annotations

import os

from ..errors import InvalidInputError
from .base import MockProvider
from .hog import HogConfig, HogProvider
from .remote import RemoteProvider

ENV_VAR = "SCALETRACK_PROVIDER"


def resolve_provider(name: str = "hog", *, cell_size: int = 4, env=os.environ):
    """Build the provider named by ``name`` (or by the environment override)."""
    override = env.get(ENV_VAR)
    if override:
        name = override
    if not isinstance(name, str) or not name:
        raise InvalidInputError(f"provider name must be a non-empty string, got {name!r}")
    kind, _, rest = name.partition(":")
    if kind == "hog":
        cell = int(rest) if rest else cell_size
        return HogProvider(HogConfig(cell_size=cell))
    if kind == "mock":
        if rest:
            try:
                stride, channels = (int(v) for v in rest.split(","))
            except ValueError as exc:
                raise InvalidInputError(f"bad mock spec {name!r}; want mock:<stride>,<channels>") from exc
        else:
            stride, channels = 1, 1
        return MockProvider(stride=stride, channels=channels)
    if kind == "remote":
        host, _, port = rest.rpartition(":")
        if not host or not port.isdigit():
            raise InvalidInputError(f"bad remote spec {name!r}; want remote:<host>:<port>")
        return RemoteProvider(host, int(port))
    raise InvalidInputError(f"unknown provider {name!r}")
