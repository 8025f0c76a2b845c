"""Shared fixtures: an on-disk synthetic dataset and an in-process service client."""

from __future__ import annotations

import warnings

import pytest

from scaletrack.synthetic import synth_sequence, write_sequence


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    """Two short synthetic sequences written in the benchmark layout."""
    root = tmp_path_factory.mktemp("dataset")
    zoom = synth_sequence(
        "zoom", frame_size=(200, 240), object_size=(48.0, 48.0), rate=1.02, length=10, seed=3
    )
    drift = synth_sequence(
        "drift", frame_size=(160, 200), object_size=(40.0, 40.0), drift=(2.0, 0.0), length=8, seed=4
    )
    write_sequence(zoom, root / zoom.name)
    write_sequence(drift, root / drift.name)
    return root


@pytest.fixture(scope="session")
def client():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from scaletrack.service import create_app

    with TestClient(create_app()) as tc:
        yield tc
