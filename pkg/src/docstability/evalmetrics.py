"""Partition evaluation: PMI topic coherence, NMI against external labels,
and z-score contingency tables under a fixed-margin null.

Word probabilities are document-level occurrence frequencies over the
analysis corpus: P(w) = df(w)/N, P(w1 w2) = df(w1 and w2)/N. A pair that
never co-occurs is smoothed to P = 1/(N+1); nothing else is smoothed.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus
from .mstability.partition import canonicalize, contingency


class EvalError(ValueError):
    pass


@dataclass
class WordStats:
    n_docs: int
    postings: dict  # token -> frozenset of document indices
    doc_freq: dict = field(default_factory=dict)

    @classmethod
    def from_corpus(cls, corpus: Corpus) -> "WordStats":
        postings: dict[str, set[int]] = {}
        for idx, doc in enumerate(corpus.documents):
            for token in set(doc.tokens):
                postings.setdefault(token, set()).add(idx)
        frozen = {w: frozenset(ids) for w, ids in postings.items()}
        doc_freq = {w: len(ids) for w, ids in frozen.items()}
        return cls(n_docs=len(corpus), postings=frozen, doc_freq=doc_freq)

    def probability(self, word: str) -> float:
        if word not in self.postings:
            raise EvalError(f"word {word!r} not in vocabulary")
        return self.doc_freq[word] / self.n_docs

    def pair_probability(self, w1: str, w2: str) -> float:
        if w1 not in self.postings:
            raise EvalError(f"word {w1!r} not in vocabulary")
        if w2 not in self.postings:
            raise EvalError(f"word {w2!r} not in vocabulary")
        raw = len(self.postings[w1] & self.postings[w2])
        if raw == 0:
            return 1.0 / (self.n_docs + 1)
        return raw / self.n_docs


def pmi(w1: str, w2: str, stats: WordStats) -> float:
    """log P(w1 w2) / (P(w1) P(w2)), natural log."""
    return math.log(
        stats.pair_probability(w1, w2) / (stats.probability(w1) * stats.probability(w2))
    )


def cluster_top_words(
    labels: np.ndarray, corpus: Corpus, top: int = 10
) -> list[list[str]]:
    """Per cluster, the `top` tokens by within-cluster raw term frequency,
    ties broken lexicographically."""
    labels = np.asarray(labels, dtype=int)
    if labels.size != len(corpus):
        raise EvalError("partition does not cover the corpus")
    n_clusters = int(labels.max()) + 1
    counters: list[Counter] = [Counter() for _ in range(n_clusters)]
    for label, doc in zip(labels, corpus.documents):
        counters[label].update(doc.tokens)
    result = []
    for counter in counters:
        ranked = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
        result.append([w for w, _ in ranked[:top]])
    return result


def partition_pmi(
    labels: np.ndarray,
    corpus: Corpus,
    stats: WordStats | None = None,
    top: int = 10,
) -> float:
    """Size-weighted sum of per-cluster median pairwise PMI of top words."""
    labels = np.asarray(labels, dtype=int)
    if labels.size != len(corpus):
        raise EvalError("partition does not cover the corpus")
    if stats is None:
        stats = WordStats.from_corpus(corpus)
    top_words = cluster_top_words(labels, corpus, top=top)
    sizes = np.bincount(labels)
    n = labels.size
    total = 0.0
    for cluster, words in enumerate(top_words):
        if len(words) < 2:
            warnings.warn(
                f"cluster {cluster} has fewer than 2 distinct words; its median PMI is 0"
            )
            median = 0.0
        else:
            pairs = [
                pmi(words[i], words[j], stats)
                for i in range(len(words))
                for j in range(i + 1, len(words))
            ]
            median = float(np.median(pairs))
        total += sizes[cluster] / n * median
    return total


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(a, b) -> float:
    """Normalised mutual information I/sqrt(H(a) H(b)), natural log.

    Identical partitions (up to relabelling) return exactly 1.0. If one side
    has a single class while the other does not, the denominator vanishes;
    0.0 is returned with a warning.
    """
    a = canonicalize(a)
    b = canonicalize(b)
    if a.shape != b.shape:
        raise EvalError("labellings cover different node sets")
    if tuple(a) == tuple(b):
        return 1.0
    counts = contingency(a, b)
    n = a.size
    h_a = _entropy(counts.sum(axis=1), n)
    h_b = _entropy(counts.sum(axis=0), n)
    if h_a == 0.0 or h_b == 0.0:
        warnings.warn("degenerate input: one labelling has a single class; NMI set to 0")
        return 0.0
    h_ab = _entropy(counts.ravel(), n)
    mutual = max(h_a + h_b - h_ab, 0.0)
    return float(min(mutual / math.sqrt(h_a * h_b), 1.0))


@dataclass
class ContingencyResult:
    counts: np.ndarray  # raw n_cd
    zscores: np.ndarray
    sigma_zero: np.ndarray  # cells where the null variance vanishes
    row_sizes: np.ndarray
    col_sizes: np.ndarray


def zscore_contingency(a, b) -> ContingencyResult:
    """Cell z-scores under the fixed-margin (hypergeometric) null:
    E = n_c n_d / N, var = E (1 - n_c/N) (N - n_d) / (N - 1)."""
    a = canonicalize(a)
    b = canonicalize(b)
    if a.shape != b.shape:
        raise EvalError("labellings cover different node sets")
    counts = contingency(a, b)
    n = a.size
    row = counts.sum(axis=1)
    col = counts.sum(axis=0)
    expected = np.outer(row, col) / n
    variance = expected * (1.0 - row[:, None] / n) * (n - col[None, :]) / (n - 1)
    sigma_zero = variance <= 0.0
    sigma = np.sqrt(np.where(sigma_zero, 1.0, variance))
    z = np.where(sigma_zero, 0.0, (counts - expected) / sigma)
    return ContingencyResult(
        counts=counts,
        zscores=z,
        sigma_zero=sigma_zero,
        row_sizes=row.astype(int),
        col_sizes=col.astype(int),
    )


def write_contingency_csv(result: ContingencyResult, path: str) -> None:
    """Long-format CSV: one row per cell with raw count and z side by side."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("cluster,category,count,zscore,sigma_zero\n")
        n_rows, n_cols = result.counts.shape
        for c in range(n_rows):
            for d in range(n_cols):
                fh.write(
                    f"{c},{d},{int(result.counts[c, d])},"
                    f"{result.zscores[c, d]!r},{int(result.sigma_zero[c, d])}\n"
                )


def labels_from_categories(categories: list) -> np.ndarray:
    """Map category strings to contiguous integer labels (first-seen order)."""
    mapping: dict[str, int] = {}
    out = np.empty(len(categories), dtype=int)
    for i, cat in enumerate(categories):
        if cat is None:
            raise EvalError(f"document at position {i} has no category label")
        out[i] = mapping.setdefault(str(cat), len(mapping))
    return out


def partition_report(
    labels: np.ndarray,
    corpus: Corpus,
    t: float | None = None,
    stability: float | None = None,
    stats: WordStats | None = None,
    top: int = 10,
) -> dict:
    """Metric report for one partition: sizes, top words, PMI, NMI when
    external categories are present on the corpus."""
    labels = canonicalize(labels)
    if stats is None:
        stats = WordStats.from_corpus(corpus)
    sizes = np.bincount(labels)
    report = {
        "t": t,
        "C": int(labels.max()) + 1,
        "stability": stability,
        "PMI": partition_pmi(labels, corpus, stats=stats, top=top),
        "cluster_sizes": [int(s) for s in sizes],
        "top_words": cluster_top_words(labels, corpus, top=top),
    }
    categories = [doc.category for doc in corpus.documents]
    if all(cat is not None for cat in categories):
        report["NMI"] = nmi(labels, labels_from_categories(categories))
    else:
        report["NMI"] = None
    return report
