"""Nearest-to-centroid benchmark: for each category, average its member
vectors into a centroid, take the n_nearest vectors by cosine similarity to
that centroid, and count how many of them belong to the category. The total
over categories (out of n_categories * n_nearest) scores how well the
vector space separates the labelling. A document may be counted for several
centroids; the number of distinct documents selected is reported alongside.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


class BenchmarkError(ValueError):
    pass


@dataclass
class BenchmarkResult:
    total: int
    n_nearest: int
    categories: list[str]
    per_category: dict[str, int]
    distinct_documents: int
    ties: bool

    @property
    def maximum(self) -> int:
        return len(self.categories) * self.n_nearest


def centroid_benchmark(
    ids: Sequence[str],
    values: np.ndarray,
    labels: Mapping[str, str],
    n_nearest: int,
    categories: Sequence[str] | None = None,
) -> BenchmarkResult:
    values = np.asarray(values, dtype=float)
    n = len(ids)
    if values.ndim != 2 or values.shape[0] != n:
        raise BenchmarkError(f"{n} ids for value shape {values.shape}")
    if not 1 <= n_nearest <= n:
        raise BenchmarkError(f"n_nearest must be in [1, {n}], got {n_nearest}")
    missing = [doc_id for doc_id in ids if doc_id not in labels]
    if missing:
        raise BenchmarkError(f"no label for ids {missing[:5]!r}")
    doc_cats = [labels[doc_id] for doc_id in ids]
    if categories is None:
        cats = sorted(set(doc_cats))
    else:
        cats = list(categories)
        if len(set(cats)) != len(cats):
            raise BenchmarkError("duplicate category")
    present = set(doc_cats)
    for cat in cats:
        if cat not in present:
            raise BenchmarkError(f"category {cat!r} has zero members")
    if len(cats) < 2:
        raise BenchmarkError(f"need at least 2 categories, got {len(cats)}")

    norms = np.linalg.norm(values, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = values / safe[:, None]
    # ties fall back to document id order so reruns agree bit for bit
    id_rank = np.empty(n, dtype=np.intp)
    id_rank[np.argsort(np.array(ids, dtype=np.str_), kind="stable")] = np.arange(n)

    per_category: dict[str, int] = {}
    selected: set[int] = set()
    ties = False
    cat_array = np.array(doc_cats, dtype=np.str_)
    for cat in cats:
        members = cat_array == cat
        centroid = values[members].mean(axis=0)
        c_norm = np.linalg.norm(centroid)
        sim = unit @ (centroid / c_norm) if c_norm > 0 else np.zeros(n)
        order = np.lexsort((id_rank, -sim))
        if n_nearest < n and sim[order[n_nearest - 1]] == sim[order[n_nearest]]:
            ties = True
        top = order[:n_nearest]
        selected.update(int(i) for i in top)
        per_category[cat] = int(np.count_nonzero(members[top]))
    if ties:
        warnings.warn("tied similarities at the selection cut; broken by id order")
    return BenchmarkResult(
        total=sum(per_category.values()),
        n_nearest=n_nearest,
        categories=cats,
        per_category=per_category,
        distinct_documents=len(selected),
        ties=ties,
    )
