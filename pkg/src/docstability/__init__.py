"""Multiscale document clustering on sparsified similarity graphs.

Pipeline: JSONL corpus -> token normalisation -> TF-iDF or imported vectors
-> normalised cosine similarity -> MST-kNN graph -> Markov Stability sweep
with Louvain ensembles -> VI-based robust level selection -> PMI/NMI/z-score
evaluation and Sankey flow export.
"""

from .corpus import Corpus, CorpusError, Document, ingest, ingest_path, load_stopwords, ngram_summary, preprocess
from .evalmetrics import (
    ContingencyResult,
    EvalError,
    WordStats,
    cluster_top_words,
    labels_from_categories,
    nmi,
    partition_pmi,
    partition_report,
    pmi,
    zscore_contingency,
)
from .simgraph import (
    SimgraphError,
    SimilarityGraph,
    SimilarityMatrix,
    build_mst_knn,
    cosine_similarity_matrix,
)
from .vectors import VectorSet, VectorsError, export_vectors, import_vectors, tfidf_vectorize
from . import mstability

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "CorpusError",
    "Document",
    "ingest",
    "ingest_path",
    "load_stopwords",
    "ngram_summary",
    "preprocess",
    "ContingencyResult",
    "EvalError",
    "WordStats",
    "cluster_top_words",
    "labels_from_categories",
    "nmi",
    "partition_pmi",
    "partition_report",
    "pmi",
    "zscore_contingency",
    "SimgraphError",
    "SimilarityGraph",
    "SimilarityMatrix",
    "build_mst_knn",
    "cosine_similarity_matrix",
    "VectorSet",
    "VectorsError",
    "export_vectors",
    "import_vectors",
    "tfidf_vectorize",
    "mstability",
    "__version__",
]
