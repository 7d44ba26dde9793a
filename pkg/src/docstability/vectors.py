"""Document vectors: a TF-iDF vectoriser and the plain-text interchange
format used to carry externally trained vectors.

Interchange format: first line `N d`, then N lines of `id v1 ... vd`,
space-separated, UTF-8. Floats are rendered with shortest round-trip decimal
representation, so export -> import -> export is byte-identical.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import Corpus


class VectorsError(ValueError):
    pass


@dataclass
class VectorSet:
    ids: list[str]
    values: np.ndarray  # (N, d) float64, row i belongs to ids[i]
    provenance: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def tfidf_vectorize(corpus: Corpus) -> VectorSet:
    """Raw term count times ln(N_docs/df), no smoothing.

    A term present in every document gets weight exactly 0 everywhere.
    Documents with no tokens become zero rows.
    """
    if len(corpus) == 0:
        raise VectorsError("empty corpus")
    docs = corpus.documents
    n_docs = len(docs)
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc.tokens))
    vocabulary = sorted(df)
    index = {w: i for i, w in enumerate(vocabulary)}
    idf = np.zeros(len(vocabulary))
    for w, i in index.items():
        idf[i] = math.log(n_docs / df[w])
    values = np.zeros((n_docs, len(vocabulary)))
    for row, doc in enumerate(docs):
        for w, count in Counter(doc.tokens).items():
            col = index[w]
            values[row, col] = count * idf[col]
    return VectorSet(
        ids=corpus.ids(),
        values=values,
        provenance={"kind": "tfidf", "vocabulary": vocabulary},
    )


def export_vectors(vs: VectorSet, path: str) -> None:
    if vs.dim < 1:
        raise VectorsError("refusing to export vectors of dimension 0")
    if vs.n < 1:
        raise VectorsError("refusing to export an empty vector set")
    for doc_id in vs.ids:
        if not doc_id or any(ch.isspace() for ch in doc_id):
            raise VectorsError(f"id {doc_id!r} not representable in interchange format")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{vs.n} {vs.dim}\n")
        for doc_id, row in zip(vs.ids, vs.values):
            rendered = " ".join(repr(float(v)) for v in row)
            fh.write(f"{doc_id} {rendered}\n")


def import_vectors(path: str, corpus_ids: Sequence[str] | None = None) -> VectorSet:
    """Read an interchange file. When corpus_ids is given, every file id must
    be a corpus id and vice versa, and rows are realigned to corpus order."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise VectorsError("header must be two integers: N d")
        try:
            n, d = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise VectorsError("header must be two integers: N d") from exc
        if n < 1 or d < 1:
            raise VectorsError(f"invalid header N={n} d={d}")
        ids: list[str] = []
        values = np.empty((n, d))
        seen: set[str] = set()
        for row in range(n):
            line = fh.readline()
            if not line:
                raise VectorsError(f"row {row + 1}: unexpected end of file")
            fields = line.split()
            if len(fields) != d + 1:
                raise VectorsError(
                    f"row {row + 1}: expected {d + 1} fields, got {len(fields)}"
                )
            doc_id = fields[0]
            if doc_id in seen:
                raise VectorsError(f"row {row + 1}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            try:
                values[row] = [float(v) for v in fields[1:]]
            except ValueError as exc:
                raise VectorsError(f"row {row + 1}: unparseable value") from exc
            if not np.all(np.isfinite(values[row])):
                raise VectorsError(f"row {row + 1}: non-finite value")
            ids.append(doc_id)
        if fh.readline().strip():
            raise VectorsError(f"trailing content after {n} declared rows")
    vs = VectorSet(ids=ids, values=values, provenance={"kind": "imported", "path": path})
    if corpus_ids is not None:
        return align_to_corpus(vs, corpus_ids)
    return vs


def align_to_corpus(vs: VectorSet, corpus_ids: Sequence[str]) -> VectorSet:
    position = {doc_id: i for i, doc_id in enumerate(vs.ids)}
    unknown = set(vs.ids) - set(corpus_ids)
    if unknown:
        raise VectorsError(f"ids not present in corpus: {sorted(unknown)[:5]}")
    missing = [doc_id for doc_id in corpus_ids if doc_id not in position]
    if missing:
        raise VectorsError(f"corpus ids missing from vector file: {missing[:5]}")
    order = [position[doc_id] for doc_id in corpus_ids]
    return VectorSet(
        ids=list(corpus_ids),
        values=vs.values[order],
        provenance=dict(vs.provenance),
    )
