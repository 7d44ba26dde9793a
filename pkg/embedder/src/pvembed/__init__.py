"""Paragraph vectors for document collections: train a PV-DBOW model on a
token-dump corpus, infer vectors for an analysis set, write them in the
plain-text vector interchange format, and score vector quality with a
nearest-to-centroid benchmark."""

from .benchmark import BenchmarkError, BenchmarkResult, centroid_benchmark
from .dbow import DbowError, DbowModel, EmbedConfig, infer, load_model, save_model, train
from .interchange import InterchangeError, read_vectors, write_vectors
from .tokens import TokenDoc, TokensError, read_labels, read_token_dump

__version__ = "0.1.0"

__all__ = [
    "BenchmarkError",
    "BenchmarkResult",
    "centroid_benchmark",
    "DbowError",
    "DbowModel",
    "EmbedConfig",
    "infer",
    "load_model",
    "save_model",
    "train",
    "InterchangeError",
    "read_vectors",
    "write_vectors",
    "TokenDoc",
    "TokensError",
    "read_labels",
    "read_token_dump",
    "__version__",
]
