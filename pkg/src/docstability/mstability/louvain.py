"""Louvain optimisation of a generalised quality matrix.

The objective is trace(H^T B H) for a dense symmetric matrix B whose total
sum is 0 (here B(t) = Pi P(t) - pi pi^T). The classic two-phase scheme
applies: local node moves with strictly positive gain, then aggregation of
B over the found clusters, repeated until no further merge happens.

Determinism: node traversal order is drawn from the supplied generator;
equal-gain targets resolve to the lowest cluster index. The same seed and
inputs always give the same partition.
"""

from __future__ import annotations

import numpy as np

from .diffusion import DiffusionOperator
from .partition import Partition


def _one_level(b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Greedy node moves from singletons until no strictly improving move."""
    n = b.shape[0]
    labels = np.arange(n)
    # gains below rounding noise of the bincount sums must not count as
    # improvements, otherwise a node can ping-pong between two clusters
    # whose weights differ by one ulp and the sweep loop never terminates
    tol = 1e-12 * max(float(np.abs(b).max()), np.finfo(float).tiny)
    improved = True
    while improved:
        improved = False
        for node in rng.permutation(n):
            current = labels[node]
            row = b[node]
            # link weight from node to every cluster, self-loop excluded
            weights = np.bincount(labels, weights=row, minlength=n)
            weights[current] -= row[node]
            best = int(np.argmax(weights))  # lowest index on exact ties
            if weights[best] > weights[current] + tol and best != current:
                labels[node] = best
                improved = True
    _, labels = np.unique(labels, return_inverse=True)
    return labels


def _aggregate(b: np.ndarray, labels: np.ndarray, n_clusters: int) -> np.ndarray:
    h = np.zeros((b.shape[0], n_clusters))
    h[np.arange(b.shape[0]), labels] = 1.0
    return h.T @ b @ h


def louvain_dense(b: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Optimise trace(H^T B H); returns (labels, achieved value).

    Never returns a value below the all-in-one partition's 0: if no grouping
    scores positively, the all-in-one partition is returned with value 0.0.
    """
    n = b.shape[0]
    level_b = b
    full = np.arange(n)
    while True:
        labels = _one_level(level_b, rng)
        n_clusters = int(labels.max()) + 1
        if n_clusters == level_b.shape[0]:
            break
        full = labels[full]
        level_b = _aggregate(level_b, labels, n_clusters)
    value = float(np.trace(level_b))
    if value < 0.0 or int(full.max()) == 0:
        return np.zeros(n, dtype=int), 0.0
    return full, value


def louvain_optimize(op: DiffusionOperator, t: float, seed) -> Partition:
    """One seeded Louvain run on B(t)."""
    b = op.quality_matrix(t)
    labels, value = louvain_dense(b, np.random.default_rng(seed))
    return Partition(labels=labels, t=float(t), stability=value)
