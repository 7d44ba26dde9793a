"""Louvain optimiser: exhaustive optimality on small graphs, guards, determinism."""

import numpy as np

from docstability.mstability.diffusion import DiffusionOperator
from docstability.mstability.louvain import louvain_dense, louvain_optimize

from oracles import all_partitions, random_connected_graph, stability_from_quality


def test_matches_exhaustive_optimum_on_small_graphs():
    rng = np.random.default_rng(20)
    for trial in range(15):
        n = int(rng.integers(3, 7))
        a = random_connected_graph(rng, n)
        op = DiffusionOperator(a)
        for t in (0.5, 2.0):
            b = op.quality_matrix(t)
            best = max(
                stability_from_quality(b, labels) for labels in all_partitions(n)
            )
            values = [
                louvain_dense(b, np.random.default_rng((trial, run)))[1]
                for run in range(8)
            ]
            assert max(values) <= best + 1e-12
            assert max(values) >= best - 1e-9


def test_two_cliques_found():
    a = np.zeros((8, 8))
    for block in (range(4), range(4, 8)):
        for i in block:
            for j in block:
                if i != j:
                    a[i, j] = 1.0
    a[0, 4] = a[4, 0] = 0.1
    op = DiffusionOperator(a)
    b = op.quality_matrix(1.0)
    labels, value = louvain_dense(b, np.random.default_rng(1))
    assert labels.max() + 1 == 2
    assert len(set(labels[:4])) == 1 and len(set(labels[4:])) == 1
    assert value > 0


def test_never_below_all_in_one():
    rng = np.random.default_rng(21)
    for trial in range(10):
        a = random_connected_graph(rng, 8)
        op = DiffusionOperator(a)
        for t in (10.0, 100.0, 1000.0):
            b = op.quality_matrix(t)
            labels, value = louvain_dense(b, np.random.default_rng(trial))
            assert value >= 0.0
            if labels.max() == 0:
                assert value == 0.0


def test_deterministic_given_seed():
    rng = np.random.default_rng(22)
    a = random_connected_graph(rng, 14)
    op = DiffusionOperator(a)
    b = op.quality_matrix(0.5)
    first = louvain_dense(b, np.random.default_rng(99))
    second = louvain_dense(b, np.random.default_rng(99))
    assert np.array_equal(first[0], second[0])
    assert first[1] == second[1]


def test_terminates_on_ulp_level_ties():
    # two clusters whose link weights to a node differ below float resolution
    # must not make the sweep loop ping-pong forever
    eps = 1e-18
    b = np.array([
        [0.00, 0.10, 0.10 + eps, -0.1],
        [0.10, 0.00, -0.10, 0.0],
        [0.10 + eps, -0.10, 0.00, 0.0],
        [-0.1, 0.0, 0.0, 0.0],
    ])
    b = (b + b.T) / 2
    labels, value = louvain_dense(b, np.random.default_rng(0))
    assert labels.shape == (4,)


def test_louvain_optimize_wraps_operator():
    rng = np.random.default_rng(23)
    a = random_connected_graph(rng, 10)
    op = DiffusionOperator(a)
    part = louvain_optimize(op, 1.0, seed=(1, 2))
    assert part.labels.shape == (10,)
    assert part.t == 1.0
    assert part.stability == op.stability(part.labels, 1.0) or part.stability >= 0.0
