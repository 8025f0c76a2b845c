"""Out-of-process provider protocol: framing, equivalence, and error mapping."""

import threading

import numpy as np
import pytest

from scaletrack.errors import ContractError, InvalidInputError, ProviderError
from scaletrack.features.base import MockProvider, provider_extract, provider_extract_batch
from scaletrack.features.remote import (
    RemoteProvider,
    decode_tensor,
    encode_tensor,
    serve_provider,
)

rng = np.random.default_rng(3)


@pytest.fixture()
def remote_pair():
    """A mock provider served over a loopback socket, plus a connected client."""
    backend = MockProvider(stride=2, channels=3)
    ready = threading.Event()
    ports: list[int] = []
    thread = threading.Thread(
        target=serve_provider,
        args=(backend,),
        kwargs={"port": 0, "ready": ready, "port_holder": ports, "max_connections": 1},
        daemon=True,
    )
    thread.start()
    assert ready.wait(5.0)
    client = RemoteProvider("127.0.0.1", ports[0], timeout=5.0)
    yield backend, client
    client.close()
    thread.join(5.0)


class TestTensorFraming:
    def test_roundtrip_preserves_shape_and_values(self):
        for shape in [(3,), (4, 5), (2, 3, 4), (2, 2, 2, 2)]:
            x = rng.standard_normal(shape)
            back = decode_tensor(encode_tensor(x))
            assert back.shape == x.shape
            assert np.allclose(back, x, atol=1e-6)  # float32 on the wire

    def test_malformed_payloads_raise(self):
        with pytest.raises(ProviderError):
            decode_tensor(b"\x01")
        good = encode_tensor(np.ones((2, 2)))
        with pytest.raises(ProviderError):
            decode_tensor(good[:-4])  # truncated data
        with pytest.raises(ProviderError):
            decode_tensor(b"\x07" + good[1:])  # unknown element type


class TestRemoteProvider:
    def test_descriptor_matches_backend(self, remote_pair):
        backend, client = remote_pair
        assert client.descriptor() == backend.descriptor()

    def test_extract_matches_local(self, remote_pair):
        backend, client = remote_pair
        img = rng.random((12, 10, 3)).astype(np.float32).astype(float)
        local = provider_extract(backend, img)[0]
        remote = provider_extract(client, img)[0]
        assert remote.stride == local.stride
        assert np.allclose(remote.data, local.data, atol=1e-6)

    def test_extract_batch_matches_local(self, remote_pair):
        backend, client = remote_pair
        stack = rng.random((8, 8, 3, 4)).astype(np.float32).astype(float)
        local = provider_extract_batch(backend, stack, "identity")
        remote = provider_extract_batch(client, stack, "identity")
        assert remote.shape == local.shape
        assert np.allclose(remote, local, atol=1e-6)

    def test_bad_image_rejected_before_hitting_the_wire(self, remote_pair):
        _, client = remote_pair
        with pytest.raises(InvalidInputError):
            client.extract(np.full((4, 4), np.nan))

    def test_server_side_errors_keep_their_kind(self, remote_pair):
        _, client = remote_pair
        with pytest.raises(ContractError):
            client.extract(rng.random((6, 6)), ["no-such-layer"])

    def test_unreachable_backend_is_provider_error(self):
        client = RemoteProvider("127.0.0.1", 1, timeout=0.5)
        with pytest.raises(ProviderError):
            client.descriptor()
