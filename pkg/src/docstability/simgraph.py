"""Similarity matrix construction and MST-kNN sparsification.

Distances are cosine distances normalised by the largest off-diagonal
distance, so the similarity Ŝ = 1 − D̂ spans [0, 1] with the most distant
pair pinned at 0. The sparsified graph is the union of the minimum spanning
tree of D̂ (Kruskal) and the symmetric k-nearest-neighbour edge set, with
edge weights inherited from Ŝ exactly.

Tie-breaking everywhere is by (distance, min node id, max node id), which
makes the graph a pure function of the input vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .vectors import VectorSet


class SimgraphError(ValueError):
    pass


DENSE_NODE_CEILING = 20_000


@dataclass
class SimilarityMatrix:
    s_hat: np.ndarray  # N x N symmetric, entries in [0, 1], unit diagonal
    d_hat: np.ndarray  # normalised distance, 1 - s_hat
    max_distance: float  # the normalisation constant (max off-diagonal D_cos)

    @property
    def n(self) -> int:
        return self.s_hat.shape[0]


@dataclass
class SimilarityGraph:
    adjacency: np.ndarray  # N x N symmetric weighted, zero diagonal
    provenance: dict  # (i, j) with i < j -> "mst" | "knn" | "both"
    k: int
    max_distance: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def edges(self) -> list[tuple[int, int, float, str]]:
        return [
            (i, j, float(self.adjacency[i, j]), prov)
            for (i, j), prov in sorted(self.provenance.items())
        ]

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.provenance)


def cosine_similarity_matrix(vs: VectorSet, ceiling: int = DENSE_NODE_CEILING) -> SimilarityMatrix:
    """Normalised cosine similarity of all vector pairs.

    Rejects all-zero vectors (cosine undefined) and fully degenerate inputs
    where every pairwise distance is zero (normalisation undefined).
    """
    values = vs.values
    n = values.shape[0]
    if n > ceiling:
        raise SimgraphError(
            f"N={n} exceeds the dense-matrix ceiling {ceiling}; "
            "reduce the corpus or raise the ceiling explicitly"
        )
    if n < 2:
        raise SimgraphError("need at least 2 vectors")
    if sparse.issparse(values):
        norms = np.asarray(np.sqrt(values.multiply(values).sum(axis=1))).ravel()
    else:
        norms = np.linalg.norm(values, axis=1)
    zero_rows = np.nonzero(norms == 0)[0]
    if zero_rows.size:
        doc_id = vs.ids[zero_rows[0]] if vs.ids else str(zero_rows[0])
        raise SimgraphError(f"document {doc_id!r} has an all-zero vector")
    if sparse.issparse(values):
        unit = sparse.diags(1.0 / norms) @ values
        s_cos = np.asarray((unit @ unit.T).todense())
    else:
        unit = values / norms[:, None]
        s_cos = unit @ unit.T
    s_cos = (s_cos + s_cos.T) / 2.0
    d_cos = 1.0 - s_cos
    np.fill_diagonal(d_cos, 0.0)
    np.clip(d_cos, 0.0, None, out=d_cos)  # guard float overshoot of cos > 1
    off_diag = ~np.eye(n, dtype=bool)
    max_distance = float(d_cos[off_diag].max())
    if max_distance == 0.0:
        raise SimgraphError("degenerate corpus: all pairwise distances are zero")
    d_hat = d_cos / max_distance
    np.fill_diagonal(d_hat, 0.0)
    s_hat = 1.0 - d_hat
    np.fill_diagonal(s_hat, 1.0)
    return SimilarityMatrix(s_hat=s_hat, d_hat=d_hat, max_distance=max_distance)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def minimum_spanning_tree_edges(d_hat: np.ndarray) -> list[tuple[int, int]]:
    """Kruskal on the complete graph of d_hat; ties by (distance, i, j)."""
    n = d_hat.shape[0]
    ii, jj = np.triu_indices(n, k=1)
    dd = d_hat[ii, jj]
    order = np.lexsort((jj, ii, dd))
    uf = _UnionFind(n)
    picked: list[tuple[int, int]] = []
    for idx in order:
        a, b = int(ii[idx]), int(jj[idx])
        if uf.union(a, b):
            picked.append((a, b))
            if len(picked) == n - 1:
                break
    return picked


def knn_edges(d_hat: np.ndarray, k: int) -> set[tuple[int, int]]:
    """Symmetric OR-rule kNN edge set: (i,j) kept if either endpoint ranks
    the other among its k nearest. Ties by (distance, min id, max id)."""
    n = d_hat.shape[0]
    edges: set[tuple[int, int]] = set()
    if k == 0:
        return edges
    others = np.arange(n)
    for i in range(n):
        mask = others != i
        cand = others[mask]
        min_ids = np.minimum(cand, i)
        max_ids = np.maximum(cand, i)
        order = np.lexsort((max_ids, min_ids, d_hat[i, mask]))
        for j in cand[order[:k]]:
            edges.add((min(i, int(j)), max(i, int(j))))
    return edges


def build_mst_knn(sm: SimilarityMatrix, k: int) -> SimilarityGraph:
    """Union of the MST and the symmetric kNN edge set, weighted by Ŝ."""
    n = sm.n
    if k < 0:
        raise SimgraphError(f"k must be non-negative, got {k}")
    if k >= n:
        raise SimgraphError(f"k={k} must be smaller than the number of nodes N={n}")
    mst = set(minimum_spanning_tree_edges(sm.d_hat))
    knn = knn_edges(sm.d_hat, k)
    provenance: dict[tuple[int, int], str] = {}
    for edge in mst | knn:
        if edge in mst and edge in knn:
            provenance[edge] = "both"
        elif edge in mst:
            provenance[edge] = "mst"
        else:
            provenance[edge] = "knn"
    adjacency = np.zeros_like(sm.s_hat)
    for i, j in provenance:
        adjacency[i, j] = adjacency[j, i] = sm.s_hat[i, j]
    return SimilarityGraph(
        adjacency=adjacency,
        provenance=provenance,
        k=k,
        max_distance=sm.max_distance,
    )


def is_connected(graph: SimilarityGraph | np.ndarray) -> bool:
    """Single connected component.

    A SimilarityGraph is judged by its edge set: an edge whose two endpoints
    sit at the maximum pairwise distance carries weight exactly 0 under the
    max-normalised similarity, yet it is still an edge. A bare adjacency
    matrix is judged by its nonzero entries.
    """
    if isinstance(graph, SimilarityGraph):
        n = graph.n
        neighbours: list[list[int]] = [[] for _ in range(n)]
        for i, j in graph.provenance:
            neighbours[i].append(j)
            neighbours[j].append(i)
    else:
        n = graph.shape[0]
        neighbours = [list(np.nonzero(graph[node])[0]) for node in range(n)]
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        node = stack.pop()
        for nbr in neighbours[node]:
            if not seen[nbr]:
                seen[nbr] = True
                stack.append(int(nbr))
    return bool(seen.all())


def export_graph(g: SimilarityGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"N={g.n} k={g.k} max_distance={g.max_distance!r}\n")
        for i, j, weight, prov in g.edges():
            fh.write(f"{i} {j} {weight!r} {prov}\n")


def load_graph(path: str) -> SimilarityGraph:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        try:
            fields = dict(part.split("=", 1) for part in header)
            n = int(fields["N"])
            k = int(fields["k"])
            max_distance = float(fields["max_distance"])
        except (KeyError, ValueError) as exc:
            raise SimgraphError("malformed graph header") from exc
        adjacency = np.zeros((n, n))
        provenance: dict[tuple[int, int], str] = {}
        for line in fh:
            if not line.strip():
                continue
            i_s, j_s, w_s, prov = line.split()
            i, j, weight = int(i_s), int(j_s), float(w_s)
            adjacency[i, j] = adjacency[j, i] = weight
            provenance[(i, j)] = prov
    return SimilarityGraph(
        adjacency=adjacency, provenance=provenance, k=k, max_distance=max_distance
    )
