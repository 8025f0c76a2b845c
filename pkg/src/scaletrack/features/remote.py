"""Out-of-process feature providers over a byte stream.

Wire format (everything little-endian):

  frame          := u32 payload-length, payload
  JSON payload   := UTF-8 JSON text (control messages, descriptors)
  tensor payload := u8 element-type (1 = float32), u8 ndim,
                    ndim * u32 dims, row-major float32 data

Session: on connect the server sends its descriptor as a JSON frame.  Each
request is one JSON frame — {"op": "extract", "layers": [...]} or
{"op": "extract_batch", "layer": id} — followed by one tensor frame (the
image, or the (D, M, N, C) stack).  Each response is one JSON frame —
{"ok": true, "maps": [{"layer": id, "stride": s}, ...]} or
{"ok": false, "kind": "input"|"contract"|"provider", "error": msg} —
followed by one tensor frame per map.

Failures of the transport or protocol surface as ProviderError, never as
invalid input: "backend down" and "bad request" stay distinguishable.
"""

from __future__ import annotations

import json
import socket
import struct
import threading

import numpy as np

from ..errors import ContractError, InvalidInputError, ProviderError, ScaletrackError
from .base import FeatureMap, ProviderDescriptor, as_float_image

ELEM_F32 = 1
_MAX_FRAME = 1 << 30


def encode_tensor(arr: np.ndarray) -> bytes:
    """Tensor payload: element-type, ndim, dims, then row-major float32."""
    a = np.ascontiguousarray(arr, dtype="<f4")
    return struct.pack("<BB", ELEM_F32, a.ndim) + struct.pack(f"<{a.ndim}I", *a.shape) + a.tobytes()


def decode_tensor(payload: bytes) -> np.ndarray:
    if len(payload) < 2:
        raise ProviderError("tensor frame too short")
    elem, ndim = struct.unpack_from("<BB", payload, 0)
    if elem != ELEM_F32:
        raise ProviderError(f"unsupported element type {elem}")
    dims = struct.unpack_from(f"<{ndim}I", payload, 2)
    off = 2 + 4 * ndim
    count = int(np.prod(dims)) if ndim else 1
    if len(payload) - off != 4 * count:
        raise ProviderError("tensor frame length disagrees with header dims")
    return (
        np.frombuffer(payload, dtype="<f4", count=count, offset=off)
        .reshape(dims)
        .astype(np.float64)
    )


def send_frame(sock: socket.socket, payload: bytes):
    sock.sendall(struct.pack("<I", len(payload)) + payload)


def send_json(sock: socket.socket, doc):
    send_frame(sock, json.dumps(doc).encode("utf-8"))


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ProviderError("connection closed mid-frame")
        buf.extend(chunk)
    return bytes(buf)


def recv_frame(sock: socket.socket) -> bytes:
    (length,) = struct.unpack("<I", _recv_exact(sock, 4))
    if length > _MAX_FRAME:
        raise ProviderError(f"frame of {length} bytes exceeds limit")
    return _recv_exact(sock, length)


def recv_json(sock: socket.socket):
    try:
        return json.loads(recv_frame(sock).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProviderError(f"malformed control frame: {exc}") from exc


class RemoteProvider:
    """Client half of the wire protocol; satisfies the provider contract.

    One in-flight request at a time — a lock serializes callers, so the
    handle may be shared across threads.
    """

    def __init__(self, host: str, port: int, timeout: float = 30.0):
        self._addr = (host, int(port))
        self._timeout = timeout
        self._lock = threading.Lock()
        self._sock: socket.socket | None = None
        self._descriptor: ProviderDescriptor | None = None

    def _connect(self):
        if self._sock is not None:
            return
        try:
            sock = socket.create_connection(self._addr, timeout=self._timeout)
        except OSError as exc:
            raise ProviderError(
                f"cannot reach provider at {self._addr[0]}:{self._addr[1]}: {exc}"
            ) from exc
        try:
            hello = recv_json(sock)
            self._descriptor = ProviderDescriptor.from_json(json.dumps(hello["descriptor"]))
        except (ScaletrackError, KeyError, TypeError) as exc:
            sock.close()
            raise ProviderError(f"bad descriptor handshake: {exc}") from exc
        self._sock = sock

    def close(self):
        with self._lock:
            if self._sock is not None:
                try:
                    send_json(self._sock, {"op": "close"})
                except OSError:
                    pass
                self._sock.close()
                self._sock = None

    def descriptor(self) -> ProviderDescriptor:
        with self._lock:
            self._connect()
            return self._descriptor

    def _roundtrip(self, request: dict, tensor: np.ndarray):
        with self._lock:
            self._connect()
            sock = self._sock
            try:
                send_json(sock, request)
                send_frame(sock, encode_tensor(tensor))
                reply = recv_json(sock)
                if not reply.get("ok", False):
                    kind = reply.get("kind", "provider")
                    msg = reply.get("error", "remote failure")
                    if kind == "input":
                        raise InvalidInputError(msg)
                    if kind == "contract":
                        raise ContractError(msg)
                    raise ProviderError(msg)
                tensors = [decode_tensor(recv_frame(sock)) for _ in reply.get("maps", [])]
                return reply, tensors
            except OSError as exc:
                self._sock = None
                raise ProviderError(f"provider connection failed: {exc}") from exc

    def extract(self, image, layer_ids=None):
        img = as_float_image(image)
        desc = self.descriptor()
        ids = list(layer_ids) if layer_ids is not None else [s.layer_id for s in desc.layers]
        reply, tensors = self._roundtrip({"op": "extract", "layers": ids}, img)
        if len(tensors) != len(ids):
            raise ProviderError(f"remote returned {len(tensors)} maps for {len(ids)} layers")
        return [FeatureMap(t, stride=float(m["stride"])) for t, m in zip(tensors, reply["maps"])]

    def extract_batch(self, batch, layer_id):
        arr = np.asarray(batch, dtype=float)  # (M, N, C, D)
        stack = np.moveaxis(arr, 3, 0)  # ship as (D, M, N, C)
        _, tensors = self._roundtrip({"op": "extract_batch", "layer": layer_id}, stack)
        if not tensors:
            raise ProviderError("remote returned an empty batch")
        return np.stack(tensors, axis=3)


def serve_provider(
    provider,
    host: str = "127.0.0.1",
    port: int = 0,
    ready: threading.Event | None = None,
    port_holder: list | None = None,
    max_connections: int | None = None,
):
    """Serve an in-process provider over the wire protocol (blocking).

    Connections are handled one at a time; within a connection, requests are
    served sequentially until a close op or EOF.
    """
    desc = provider.descriptor()
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    server.bind((host, port))
    server.listen(1)
    if port_holder is not None:
        port_holder.append(server.getsockname()[1])
    if ready is not None:
        ready.set()
    served = 0
    try:
        while max_connections is None or served < max_connections:
            conn, _ = server.accept()
            served += 1
            with conn:
                send_json(conn, {"type": "descriptor", "descriptor": json.loads(desc.to_json())})
                _serve_connection(conn, provider, desc)
    finally:
        server.close()


def _serve_connection(conn: socket.socket, provider, desc: ProviderDescriptor):
    while True:
        try:
            request = recv_json(conn)
        except ProviderError:
            return  # client went away
        op = request.get("op")
        if op == "close":
            return
        try:
            tensor = decode_tensor(recv_frame(conn))
            if op == "extract":
                ids = request.get("layers") or [s.layer_id for s in desc.layers]
                specs = [desc.layer(i) for i in ids]
                maps = provider.extract(tensor, ids)
                send_json(
                    conn,
                    {"ok": True, "maps": [{"layer": s.layer_id, "stride": m.stride} for s, m in zip(specs, maps)]},
                )
                for m in maps:
                    send_frame(conn, encode_tensor(m.data))
            elif op == "extract_batch":
                layer = request.get("layer")
                spec = desc.layer(layer)
                stack = np.moveaxis(tensor, 0, 3)  # back to (M, N, C, D)
                out = provider.extract_batch(stack, layer)
                send_json(
                    conn,
                    {"ok": True, "maps": [{"layer": layer, "stride": spec.stride}] * out.shape[3]},
                )
                for d in range(out.shape[3]):
                    send_frame(conn, encode_tensor(out[:, :, :, d]))
            else:
                send_json(conn, {"ok": False, "kind": "provider", "error": f"unknown op {op!r}"})
        except InvalidInputError as exc:
            send_json(conn, {"ok": False, "kind": "input", "error": str(exc)})
        except ContractError as exc:
            send_json(conn, {"ok": False, "kind": "contract", "error": str(exc)})
        except ScaletrackError as exc:
            send_json(conn, {"ok": False, "kind": "provider", "error": str(exc)})
