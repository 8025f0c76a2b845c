"""Feature maps and the provider contract.

A provider turns images into per-layer feature maps.  The repo ships two:
the HOG provider (the hand-crafted default) and a mock provider for tests.
Heavier backbones plug in through the same descriptor + extract surface,
in-process or over the binary wire protocol in ``remote``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Protocol, Sequence, runtime_checkable

import numpy as np

from ..errors import ContractError, InvalidInputError


def as_float_image(image) -> np.ndarray:
    """Normalize an image to (H, W, C) float64 in roughly [0, 1]."""
    img = np.asarray(image)
    if img.ndim == 2:
        img = img[:, :, None]
    if img.ndim != 3:
        raise InvalidInputError(f"image must be 2-D or 3-D, got ndim {img.ndim}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise InvalidInputError("image is empty")
    if img.dtype == np.uint8:
        img = img.astype(np.float64) / 255.0
    else:
        img = img.astype(np.float64)
    if not np.all(np.isfinite(img)):
        raise InvalidInputError("image contains non-finite values")
    return img


@dataclass(frozen=True)
class FeatureMap:
    """A dense (H', W', G) feature tensor plus its stride in input pixels."""

    data: np.ndarray
    stride: float = 1.0

    def __post_init__(self):
        if self.data.ndim != 3:
            raise InvalidInputError(f"feature map must be 3-D, got ndim {self.data.ndim}")
        if self.stride < 1:
            raise InvalidInputError(f"stride must be >= 1, got {self.stride}")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


class LayerSpec(NamedTuple):
    layer_id: str
    stride: int
    channels: int


@dataclass(frozen=True)
class ProviderDescriptor:
    """What a provider offers: its layers, strides, channel counts, the input
    size it expects (None = any), and whether it accepts stacked batches."""

    name: str
    layers: tuple[LayerSpec, ...]
    input_size: tuple[int, int] | None = None
    supports_batch: bool = False

    def __post_init__(self):
        if not self.layers:
            raise InvalidInputError("descriptor needs at least one layer")
        for spec in self.layers:
            if spec.stride < 1:
                raise InvalidInputError(f"layer {spec.layer_id}: stride must be >= 1")
            if spec.channels < 1:
                raise InvalidInputError(f"layer {spec.layer_id}: channels must be >= 1")

    def layer(self, layer_id: str) -> LayerSpec:
        for spec in self.layers:
            if spec.layer_id == layer_id:
                return spec
        raise ContractError(f"provider {self.name!r} has no layer {layer_id!r}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "layers": [
                    {"id": s.layer_id, "stride": s.stride, "channels": s.channels}
                    for s in self.layers
                ],
                "input_size": list(self.input_size) if self.input_size else None,
                "supports_batch": self.supports_batch,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ProviderDescriptor":
        try:
            doc = json.loads(text)
            layers = tuple(
                LayerSpec(str(l["id"]), int(l["stride"]), int(l["channels"]))
                for l in doc["layers"]
            )
            size = doc.get("input_size")
            return cls(
                name=str(doc["name"]),
                layers=layers,
                input_size=tuple(int(v) for v in size) if size else None,
                supports_batch=bool(doc.get("supports_batch", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed provider descriptor: {exc}") from exc


@runtime_checkable
class FeatureProvider(Protocol):
    def descriptor(self) -> ProviderDescriptor: ...

    def extract(self, image: np.ndarray, layer_ids: Sequence[str] | None = None) -> list[FeatureMap]: ...

    def extract_batch(self, batch: np.ndarray, layer_id: str) -> np.ndarray: ...


def provider_extract(
    provider: FeatureProvider, image, layer_ids: Sequence[str] | None = None
) -> list[FeatureMap]:
    """Extract the named layers and enforce the descriptor's shape contract."""
    desc = provider.descriptor()
    ids = list(layer_ids) if layer_ids is not None else [s.layer_id for s in desc.layers]
    specs = [desc.layer(i) for i in ids]  # unknown layer -> ContractError
    img = as_float_image(image)
    maps = provider.extract(img, ids)
    if len(maps) != len(ids):
        raise ContractError(f"provider {desc.name!r} returned {len(maps)} maps for {len(ids)} layers")
    for fm, spec in zip(maps, specs):
        want = (img.shape[0] // spec.stride, img.shape[1] // spec.stride, spec.channels)
        if fm.data.shape != want:
            raise ContractError(
                f"provider {desc.name!r} layer {spec.layer_id!r}: shape {fm.data.shape} != advertised {want}"
            )
        if not np.all(np.isfinite(fm.data)):
            raise ContractError(f"provider {desc.name!r} emitted non-finite features")
    return maps


def provider_extract_batch(provider: FeatureProvider, batch, layer_id: str) -> np.ndarray:
    """Extract one layer from an (M, N, C, D) stack; returns (M', N', G, D)."""
    desc = provider.descriptor()
    spec = desc.layer(layer_id)
    if not desc.supports_batch:
        raise ContractError(f"provider {desc.name!r} does not support batched extraction")
    arr = np.asarray(batch, dtype=float)
    if arr.ndim != 4:
        raise InvalidInputError(f"batch must be 4-D (M, N, C, D), got ndim {arr.ndim}")
    out = provider.extract_batch(arr, layer_id)
    want = (arr.shape[0] // spec.stride, arr.shape[1] // spec.stride, spec.channels, arr.shape[3])
    if out.shape != want:
        raise ContractError(
            f"provider {desc.name!r} batch layer {layer_id!r}: shape {out.shape} != advertised {want}"
        )
    if not np.all(np.isfinite(out)):
        raise ContractError(f"provider {desc.name!r} emitted non-finite features")
    return out


class MockProvider:
    """Deterministic linear test provider that counts its invocations.

    With stride 1 and channels equal to the image's, features are the image
    itself — linear and crop-commuting, which the sampler-equivalence tests
    rely on.  Larger strides mean-pool; extra channels repeat the image
    channels scaled by a fixed per-channel weight (keeps linearity).
    """

    def __init__(self, stride: int = 1, channels: int = 1, name: str = "mock"):
        self._spec = LayerSpec("identity", int(stride), int(channels))
        self._name = name
        self.single_calls: list[tuple[int, ...]] = []
        self.batch_calls: list[tuple[int, ...]] = []

    def reset_counts(self):
        self.single_calls.clear()
        self.batch_calls.clear()

    def descriptor(self) -> ProviderDescriptor:
        return ProviderDescriptor(self._name, (self._spec,), None, supports_batch=True)

    def _features(self, img: np.ndarray) -> np.ndarray:
        s, g = self._spec.stride, self._spec.channels
        h, w, c = img.shape
        hh, ww = h // s, w // s
        pooled = img[: hh * s, : ww * s].reshape(hh, s, ww, s, c).mean(axis=(1, 3))
        chans = [pooled[:, :, i % c] * (1.0 + (i // c)) for i in range(g)]
        return np.stack(chans, axis=2)

    def extract(self, image, layer_ids=None):
        img = as_float_image(image)
        self.single_calls.append(img.shape)
        return [FeatureMap(self._features(img), stride=self._spec.stride)]

    def extract_batch(self, batch, layer_id):
        arr = np.asarray(batch, dtype=float)
        self.batch_calls.append(arr.shape)
        slices = [self._features(arr[:, :, :, d]) for d in range(arr.shape[3])]
        return np.stack(slices, axis=3)


__all__ = [
    "FeatureMap",
    "LayerSpec",
    "ProviderDescriptor",
    "FeatureProvider",
    "MockProvider",
    "as_float_image",
    "provider_extract",
    "provider_extract_batch",
]
