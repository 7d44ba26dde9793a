"""Continuous-time diffusion operator on a weighted graph and the clustered
autocovariance quality measure built on it.

For a connected undirected graph with adjacency A, degree matrix D and
stationary distribution pi = d / sum(d), the kernel is
P(t) = exp(-t L_RW) with L_RW = I - D^{-1} A, and the quality of a
partition with membership matrix H at Markov time t is

    R(t, H) = H^T [Pi P(t) - pi pi^T] H,    r(t, H) = trace R(t, H).

P(t) is computed through the symmetric Laplacian: with
L_sym = I - D^{-1/2} A D^{-1/2} = V diag(w) V^T (one eigendecomposition,
reused for every t), P(t) = D^{-1/2} V e^{-tw} V^T D^{1/2}. Above a size
threshold the dense eigendecomposition is skipped and the exponential is
applied as an action on the needed columns instead.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply

from ..simgraph import SimilarityGraph, is_connected


class DiffusionError(ValueError):
    pass


EIG_NODE_CEILING = 2_000


class DiffusionOperator:
    def __init__(self, adjacency: np.ndarray, eig_ceiling: int = EIG_NODE_CEILING):
        adjacency = np.asarray(adjacency, dtype=float)
        n = adjacency.shape[0]
        if adjacency.ndim != 2 or adjacency.shape[1] != n:
            raise DiffusionError("adjacency must be square")
        if n < 2:
            raise DiffusionError("need at least 2 nodes")
        if not np.allclose(adjacency, adjacency.T, atol=1e-12):
            raise DiffusionError("adjacency must be symmetric")
        if (adjacency < 0).any():
            raise DiffusionError("negative edge weights not supported")
        adjacency = adjacency.copy()
        np.fill_diagonal(adjacency, 0.0)
        degrees = adjacency.sum(axis=1)
        if (degrees == 0).any():
            raise DiffusionError("zero-degree node: graph must have no isolates")
        if not is_connected(adjacency):
            raise DiffusionError("graph must be connected")

        self.adjacency = adjacency
        self.n = n
        self.degrees = degrees
        self.total_degree = float(degrees.sum())
        self.pi = degrees / self.total_degree
        self._sqrt_d = np.sqrt(degrees)
        self._inv_sqrt_d = 1.0 / self._sqrt_d
        self._use_eig = n <= eig_ceiling
        if self._use_eig:
            lsym = -(self._inv_sqrt_d[:, None] * adjacency * self._inv_sqrt_d[None, :])
            lsym[np.diag_indices(n)] += 1.0
            lsym = (lsym + lsym.T) / 2.0
            w, v = np.linalg.eigh(lsym)
            self._eigvals = np.clip(w, 0.0, None)
            self._eigvecs = v
            self._lrw = None
        else:
            self._eigvals = None
            self._eigvecs = None
            d_inv = sparse.diags(1.0 / degrees)
            self._lrw = (sparse.identity(n) - d_inv @ sparse.csr_matrix(adjacency)).tocsr()

    def _check_time(self, t: float) -> float:
        t = float(t)
        if t < 0:
            raise DiffusionError(f"Markov time must be non-negative, got {t}")
        return t

    def transition(self, t: float) -> np.ndarray:
        """P(t) = exp(-t L_RW); rows sum to 1, entries non-negative."""
        t = self._check_time(t)
        if t == 0.0:
            return np.eye(self.n)
        if self._use_eig:
            core = (self._eigvecs * np.exp(-t * self._eigvals)) @ self._eigvecs.T
            return self._inv_sqrt_d[:, None] * core * self._sqrt_d[None, :]
        return self.transition_action(t, np.eye(self.n))

    def transition_action(self, t: float, columns: np.ndarray) -> np.ndarray:
        """P(t) @ columns without materialising P(t)."""
        t = self._check_time(t)
        if t == 0.0:
            return np.array(columns, dtype=float, copy=True)
        if self._use_eig:
            proj = self._eigvecs.T @ (self._sqrt_d[:, None] * columns)
            core = self._eigvecs @ (np.exp(-t * self._eigvals)[:, None] * proj)
            return self._inv_sqrt_d[:, None] * core
        return expm_multiply(-t * self._lrw, np.asarray(columns, dtype=float))

    def quality_matrix(self, t: float) -> np.ndarray:
        """B(t) = Pi P(t) - pi pi^T, symmetric for undirected graphs."""
        t = self._check_time(t)
        null = np.outer(self.pi, self.pi)
        if t == 0.0:
            return np.diag(self.pi) - null
        if self._use_eig:
            core = (self._eigvecs * np.exp(-t * self._eigvals)) @ self._eigvecs.T
            pi_p = self._sqrt_d[:, None] * core * self._sqrt_d[None, :] / self.total_degree
        else:
            pi_p = self.pi[:, None] * self.transition(t)
        b = pi_p - null
        return (b + b.T) / 2.0

    def clustered_autocovariance(self, labels: np.ndarray, t: float) -> np.ndarray:
        """R(t, H) as a C x C matrix from a label vector."""
        labels = _validate_labels(labels, self.n)
        n_clusters = int(labels.max()) + 1
        h = np.zeros((self.n, n_clusters))
        h[np.arange(self.n), labels] = 1.0
        t = self._check_time(t)
        if self._use_eig or t == 0.0:
            b = self.quality_matrix(t)
            return h.T @ b @ h
        # action path: only C columns of the kernel are needed
        ph = self.transition_action(t, h)
        pi_h = self.pi @ h
        return h.T @ (self.pi[:, None] * ph) - np.outer(pi_h, pi_h)

    def stability(self, labels: np.ndarray, t: float) -> float:
        """r(t, H) = trace R(t, H); exactly 0.0 for the all-in-one partition."""
        labels = _validate_labels(labels, self.n)
        if labels.max() == 0:
            return 0.0
        return float(np.trace(self.clustered_autocovariance(labels, t)))


def _validate_labels(labels: np.ndarray, n: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (n,):
        raise DiffusionError(f"labels must have shape ({n},)")
    if labels.min() < 0:
        raise DiffusionError("labels must be non-negative")
    present = np.unique(labels)
    if present.size != labels.max() + 1:
        raise DiffusionError("cluster indices must be contiguous from 0")
    return labels


def build_operator(graph: SimilarityGraph | np.ndarray) -> DiffusionOperator:
    adjacency = graph.adjacency if isinstance(graph, SimilarityGraph) else graph
    return DiffusionOperator(adjacency)
