"""Feature-map corpus extraction for the tensor compression tooling."""

from .extract import (
    NETWORKS,
    ExtractionConfig,
    ExtractionReport,
    build_model,
    extract,
    list_images,
    quantize,
    relu_feature_maps,
)
from .tnsr import (
    Tensor,
    TnsrError,
    read_manifest,
    read_tensor,
    validate_corpus,
    write_manifest,
    write_tensor,
)

__version__ = "0.1.0"

__all__ = [
    "NETWORKS",
    "ExtractionConfig",
    "ExtractionReport",
    "build_model",
    "extract",
    "list_images",
    "quantize",
    "relu_feature_maps",
    "Tensor",
    "TnsrError",
    "read_tensor",
    "write_tensor",
    "read_manifest",
    "write_manifest",
    "validate_corpus",
]
