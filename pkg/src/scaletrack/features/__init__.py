from .base import (
    FeatureMap,
    FeatureProvider,
    LayerSpec,
    MockProvider,
    ProviderDescriptor,
    as_float_image,
    provider_extract,
    provider_extract_batch,
)
from .hog import HogConfig, HogProvider, hog_extract
from .registry import ENV_VAR, resolve_provider
from .remote import RemoteProvider, serve_provider

__all__ = [
    "FeatureMap",
    "FeatureProvider",
    "LayerSpec",
    "MockProvider",
    "ProviderDescriptor",
    "as_float_image",
    "provider_extract",
    "provider_extract_batch",
    "HogConfig",
    "HogProvider",
    "hog_extract",
    "ENV_VAR",
    "resolve_provider",
    "RemoteProvider",
    "serve_provider",
]
