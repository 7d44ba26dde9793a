"""Acceptance suite: one test per headline criterion, each printing a
single PASS/FAIL line with the measured quantity and its bound."""

import sys
import time

import numpy as np
import pytest

from docstability.corpus import Corpus, Document
from docstability.evalmetrics import nmi, zscore_contingency
from docstability.mstability import build_operator, scan, select_robust, time_grid
from docstability.mstability.diffusion import DiffusionOperator
from docstability.mstability.partition import variation_of_information
from docstability.simgraph import (
    build_mst_knn,
    cosine_similarity_matrix,
    is_connected,
    minimum_spanning_tree_edges,
)
from docstability.vectors import VectorSet, tfidf_vectorize

from oracles import (
    all_partitions,
    gaussian_cloud_vectors,
    mst_optimum_weight,
    planted_hierarchy,
    quality_matrix_taylor,
    random_connected_graph,
    random_partition,
    same_cluster_masks,
    synthetic_topic_docs,
)


def report(name: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}: {detail}"
    print(line, file=sys.stderr, flush=True)
    assert ok, line


def topic_corpus(seed: int):
    rng = np.random.default_rng(seed)
    token_docs, planted = synthetic_topic_docs(rng)
    docs = [
        Document(id=f"d{i}", raw_text="", tokens=tokens)
        for i, tokens in enumerate(token_docs)
    ]
    return Corpus(documents=docs, stopwords=frozenset(), meta={}), planted, rng


def matched_level(levels, target=10):
    return min(levels, key=lambda lv: (abs(lv.n_clusters - target), lv.index))


def test_kernel_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(1001)
    cache: dict[int, tuple[list, np.ndarray]] = {}
    worst = 0.0
    for graph_idx in range(50):
        n = int(rng.integers(3, 9))
        a = random_connected_graph(rng, n)
        op = DiffusionOperator(a)
        if n not in cache:
            cache[n] = (list(all_partitions(n)), same_cluster_masks(n))
        parts, masks = cache[n]
        for t in (0.1, 1.0, 10.0):
            b_prod = op.quality_matrix(t)
            b_oracle = quality_matrix_taylor(a, t)
            r_prod = np.tensordot(masks, b_prod, axes=([1, 2], [0, 1]))
            r_oracle = np.tensordot(masks, b_oracle, axes=([1, 2], [0, 1]))
            worst = max(worst, float(np.abs(r_prod - r_oracle).max()))
            # tie the vectorised evaluation to the scalar production call
            idx = int(rng.integers(0, len(parts)))
            direct = op.stability(np.asarray(parts[idx]), t)
            assert abs(direct - r_prod[idx]) < 1e-12
    elapsed = time.perf_counter() - start
    report(
        "kernel oracle",
        worst < 1e-8 and elapsed < 60,
        f"max |r_prod - r_taylor| = {worst:.2e} (< 1e-8) over 50 graphs x "
        f"all partitions x t in {{0.1,1,10}}, {elapsed:.1f}s (< 60s)",
    )


def test_conservation_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(1002)
    worst_rows = worst_stationary = worst_total = 0.0
    for graph_idx in range(100):
        n = int(rng.integers(3, 51))
        a = random_connected_graph(rng, n)
        op = DiffusionOperator(a)
        labels = random_partition(rng, n, max(2, n // 3))
        for t in (0.1, 1.0, 10.0):
            p = op.transition(t)
            worst_rows = max(worst_rows, float(np.abs(p.sum(axis=1) - 1.0).max()))
            worst_stationary = max(
                worst_stationary, float(np.abs(op.pi @ p - op.pi).max())
            )
            r = op.clustered_autocovariance(labels, t)
            worst_total = max(worst_total, abs(float(r.sum())))
    elapsed = time.perf_counter() - start
    worst = max(worst_rows, worst_stationary, worst_total)
    report(
        "conservation suite",
        worst < 1e-9 and elapsed < 60,
        f"row-sum dev {worst_rows:.1e}, stationarity dev {worst_stationary:.1e}, "
        f"1'R1 dev {worst_total:.1e} (all < 1e-9) on 100 graphs, {elapsed:.1f}s (< 60s)",
    )


def test_trivial_value_suite():
    rng = np.random.default_rng(1003)
    ok = True
    details = []
    for n in (2, 7, 30):
        a = random_connected_graph(rng, n)
        op = DiffusionOperator(a)
        all_in_one = np.zeros(n, dtype=int)
        for t in (0.0, 0.7, 13.0):
            if op.stability(all_in_one, t) != 0.0:
                ok = False
        want = 1.0 - float(op.pi @ op.pi)
        dev = abs(op.stability(np.arange(n), 0.0) - want)
        if dev > 1e-12:
            ok = False
        details.append(f"N={n}: r(0,singletons) dev {dev:.1e}")
        labels = random_partition(rng, n, max(2, n // 2))
        if variation_of_information(labels, labels) != 0.0:
            ok = False
        vi_dev = abs(
            variation_of_information(np.arange(n), all_in_one) - np.log(n)
        )
        if vi_dev > 1e-12:
            ok = False
        if nmi(labels, labels) != 1.0:
            ok = False
    report(
        "trivial values",
        ok,
        "r(all-in-one)=0 exact, r(0,singletons)=1-sum(pi^2) within 1e-12, "
        "VI(identical)=0 exact, VI(singletons,all-one)=log N within 1e-12, "
        "NMI(identical)=1 exact; " + "; ".join(details),
    )


def test_planted_hierarchy():
    start = time.perf_counter()
    adjacency, fine, mid, coarse = planted_hierarchy()
    op = build_operator(adjacency)
    times = time_grid(0.01, 100.0, 100)
    sr = scan(op, times, runs=100, top_m=20, seed=7)
    levels = select_robust(sr)
    elapsed = time.perf_counter() - start
    planted = {27: fine, 9: mid, 3: coarse}
    sizes = sorted(lv.n_clusters for lv in levels)
    nmis = {
        lv.n_clusters: nmi(lv.labels, planted[lv.n_clusters])
        for lv in levels
        if lv.n_clusters in planted
    }
    ok = (
        len(levels) == 3
        and sizes == [3, 9, 27]
        and all(v >= 0.99 for v in nmis.values())
        and elapsed < 600
    )
    report(
        "planted hierarchy",
        ok,
        f"selected C={sizes} (want [3, 9, 27]), NMI={ {c: round(v, 4) for c, v in sorted(nmis.items())} } "
        f"(each >= 0.99), {elapsed:.1f}s (< 600s)",
    )


def test_mst_knn_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(1004)
    ok = True
    for trial in range(20):
        n = 60
        values = np.abs(rng.standard_normal((n, 8))) + 0.05
        vs = VectorSet(
            ids=[f"d{i}" for i in range(n)], values=values,
            provenance={"kind": "test"},
        )
        sm = cosine_similarity_matrix(vs)
        previous: set | None = None
        for k in (0, 1, 5, 13, 50):
            g = build_mst_knn(sm, k)
            if not is_connected(g):
                ok = False
            edges = set(g.provenance)
            if k == 0 and len(edges) != n - 1:
                ok = False
            if previous is not None and not previous <= edges:
                ok = False
            previous = edges
    worst_mst = 0.0
    for trial in range(20):
        n = int(rng.integers(4, 11))
        pts = rng.standard_normal((n, 3))
        d = np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(-1))
        got = sum(d[i, j] for i, j in minimum_spanning_tree_edges(d))
        worst_mst = max(worst_mst, abs(got - mst_optimum_weight(d)))
    elapsed = time.perf_counter() - start
    report(
        "MST-kNN suite",
        ok and worst_mst < 1e-12 and elapsed < 60,
        f"connectivity + nesting for k in {{0,1,5,13,50}} on 20 sets, k=0 gives N-1 "
        f"edges, MST vs exhaustive dev {worst_mst:.1e} (< 1e-12), {elapsed:.1f}s (< 60s)",
    )


def test_sparsification_robustness():
    start = time.perf_counter()
    corpus, planted, _ = topic_corpus(2024)
    vs = tfidf_vectorize(corpus)
    sm = cosine_similarity_matrix(vs)
    times = time_grid(0.01, 100.0, 60)
    matched = {}
    for k in (13, 17):
        graph = build_mst_knn(sm, k)
        op = build_operator(graph.adjacency)
        sr = scan(op, times, runs=30, top_m=8, seed=11)
        matched[k] = matched_level(select_robust(sr))
    cross = nmi(matched[13].labels, matched[17].labels)
    elapsed = time.perf_counter() - start
    report(
        "sparsification robustness",
        cross >= 0.9 and elapsed < 300,
        f"NMI(k=13 level C={matched[13].n_clusters}, k=17 level "
        f"C={matched[17].n_clusters}) = {cross:.4f} (>= 0.9), {elapsed:.1f}s (< 300s)",
    )


def test_vi_axioms():
    rng = np.random.default_rng(1005)
    symmetric = True
    worst_triangle = 0.0
    for _ in range(1000):
        a = random_partition(rng, 50, 12)
        b = random_partition(rng, 50, 12)
        c = random_partition(rng, 50, 12)
        ab = variation_of_information(a, b)
        if ab != variation_of_information(b, a):
            symmetric = False
        bc = variation_of_information(b, c)
        ac = variation_of_information(a, c)
        worst_triangle = max(worst_triangle, ac - (ab + bc))
    report(
        "VI axioms",
        symmetric and worst_triangle <= 1e-12,
        f"symmetry bitwise on 1000 triples (N=50), triangle excess "
        f"{worst_triangle:.1e} (<= 1e-12)",
    )


def test_embedding_vs_bow():
    start = time.perf_counter()
    corpus, planted, rng = topic_corpus(515)
    centroids = rng.standard_normal((10, 50))
    centroids /= np.linalg.norm(centroids, axis=1, keepdims=True)
    emb = VectorSet(
        ids=corpus.ids(),
        values=gaussian_cloud_vectors(rng, centroids, planted, noise=0.08),
        provenance={"kind": "synthetic-embedding"},
    )
    times = time_grid(0.01, 100.0, 60)
    scores = {}
    for name, vs in (("tfidf", tfidf_vectorize(corpus)), ("embedding", emb)):
        graph = build_mst_knn(cosine_similarity_matrix(vs), 13)
        op = build_operator(graph.adjacency)
        sr = scan(op, times, runs=30, top_m=8, seed=21)
        lv = matched_level(select_robust(sr))
        scores[name] = nmi(lv.labels, planted)
    elapsed = time.perf_counter() - start
    report(
        "embedding vs BoW",
        scores["embedding"] >= scores["tfidf"],
        f"NMI to planted: embedding {scores['embedding']:.4f} >= "
        f"tfidf {scores['tfidf']:.4f}, {elapsed:.1f}s",
    )


def test_zscore_null_calibration():
    total = 0
    within = 0
    for trial in range(20):
        rng = np.random.default_rng((1006, trial))
        a = rng.integers(0, 20, size=10000)
        b = rng.integers(0, 10, size=10000)
        _, a = np.unique(a, return_inverse=True)
        _, b = np.unique(b, return_inverse=True)
        res = zscore_contingency(a, b)
        z = res.zscores[~res.sigma_zero]
        total += z.size
        within += int((np.abs(z) <= 2.0).sum())
    rate = within / total
    report(
        "z-score null calibration",
        rate >= 0.93,
        f"{within}/{total} = {rate:.4f} of cells within |z| <= 2 over 20 trials (>= 0.93)",
    )
