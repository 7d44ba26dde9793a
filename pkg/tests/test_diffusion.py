"""Diffusion operator: kernel, quality matrix, stability, conservation."""

import numpy as np
import pytest

from docstability.mstability.diffusion import DiffusionError, DiffusionOperator, build_operator

from oracles import quality_matrix_taylor, random_connected_graph, rw_kernel_taylor


def triangle():
    a = np.array([
        [0.0, 1.0, 0.5],
        [1.0, 0.0, 0.2],
        [0.5, 0.2, 0.0],
    ])
    return a


def test_kernel_matches_taylor_series():
    rng = np.random.default_rng(0)
    for trial in range(20):
        n = int(rng.integers(3, 9))
        a = random_connected_graph(rng, n)
        op = DiffusionOperator(a)
        for t in (0.1, 1.0, 3.0):
            got = op.transition(t)
            want = rw_kernel_taylor(a, t)
            np.testing.assert_allclose(got, want, atol=1e-9)


def test_kernel_at_zero_is_identity():
    op = DiffusionOperator(triangle())
    np.testing.assert_array_equal(op.transition(0.0), np.eye(3))


def test_kernel_rows_sum_to_one():
    rng = np.random.default_rng(1)
    a = random_connected_graph(rng, 12)
    op = DiffusionOperator(a)
    for t in (0.01, 0.5, 10.0):
        rows = op.transition(t).sum(axis=1)
        np.testing.assert_allclose(rows, 1.0, atol=1e-10)


def test_quality_matrix_matches_taylor():
    rng = np.random.default_rng(2)
    for trial in range(10):
        n = int(rng.integers(3, 9))
        a = random_connected_graph(rng, n)
        op = DiffusionOperator(a)
        for t in (0.1, 1.0):
            got = op.quality_matrix(t)
            want = quality_matrix_taylor(a, t)
            np.testing.assert_allclose(got, want, atol=1e-9)


def test_quality_matrix_total_sum_zero():
    rng = np.random.default_rng(3)
    a = random_connected_graph(rng, 15)
    op = DiffusionOperator(a)
    for t in (0.0, 0.3, 2.0, 30.0):
        b = op.quality_matrix(t)
        assert abs(b.sum()) < 1e-9
        # rows of Pi P(t) sum to pi, so B rows sum to zero as well
        np.testing.assert_allclose(b.sum(axis=1), 0.0, atol=1e-9)


def test_quality_matrix_at_zero_closed_form():
    a = triangle()
    op = DiffusionOperator(a)
    b = op.quality_matrix(0.0)
    # bitwise: the t=0 branch is the closed form built from the operator's pi
    np.testing.assert_array_equal(b, np.diag(op.pi) - np.outer(op.pi, op.pi))
    pi = a.sum(axis=1) / a.sum()
    np.testing.assert_allclose(b, np.diag(pi) - np.outer(pi, pi), atol=1e-15)


def test_stability_all_in_one_exactly_zero():
    rng = np.random.default_rng(4)
    a = random_connected_graph(rng, 10)
    op = DiffusionOperator(a)
    labels = np.zeros(10, dtype=int)
    for t in (0.0, 1.0, 50.0):
        assert op.stability(labels, t) == 0.0


def test_stability_singletons_at_zero_closed_form():
    rng = np.random.default_rng(5)
    a = random_connected_graph(rng, 9)
    op = DiffusionOperator(a)
    pi = a.sum(axis=1) / a.sum()
    want = 1.0 - float(pi @ pi)
    got = op.stability(np.arange(9), 0.0)
    assert got == pytest.approx(want, abs=1e-12)


def test_stability_decreases_with_time_for_fixed_partition():
    rng = np.random.default_rng(6)
    a = random_connected_graph(rng, 12)
    op = DiffusionOperator(a)
    labels = np.array([0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3])
    values = [op.stability(labels, t) for t in (0.01, 0.1, 1.0, 10.0)]
    assert all(x >= y - 1e-12 for x, y in zip(values, values[1:]))


def test_action_mode_matches_eig_mode():
    rng = np.random.default_rng(7)
    a = random_connected_graph(rng, 25)
    eig = DiffusionOperator(a)
    action = DiffusionOperator(a, eig_ceiling=10)
    labels = np.array([i % 4 for i in range(25)])
    for t in (0.1, 1.0, 10.0):
        assert action.stability(labels, t) == pytest.approx(
            eig.stability(labels, t), abs=1e-9
        )


def test_validation_rejects_bad_inputs():
    with pytest.raises(DiffusionError):
        DiffusionOperator(np.ones((2, 3)))
    asym = np.array([[0.0, 1.0], [0.5, 0.0]])
    with pytest.raises(DiffusionError):
        DiffusionOperator(asym)
    negative = np.array([[0.0, -1.0], [-1.0, 0.0]])
    with pytest.raises(DiffusionError):
        DiffusionOperator(negative)
    isolate = np.zeros((3, 3))
    isolate[0, 1] = isolate[1, 0] = 1.0
    with pytest.raises(DiffusionError):
        DiffusionOperator(isolate)
    disconnected = np.zeros((4, 4))
    disconnected[0, 1] = disconnected[1, 0] = 1.0
    disconnected[2, 3] = disconnected[3, 2] = 1.0
    with pytest.raises(DiffusionError):
        DiffusionOperator(disconnected)


def test_label_validation():
    op = DiffusionOperator(triangle())
    with pytest.raises(DiffusionError):
        op.stability(np.array([0, 2, 2]), 1.0)  # label 1 skipped
    with pytest.raises(DiffusionError):
        op.stability(np.array([0, 0]), 1.0)  # wrong length


def test_build_operator_accepts_graph_and_array():
    from docstability.simgraph import build_mst_knn, cosine_similarity_matrix
    from docstability.vectors import VectorSet

    rng = np.random.default_rng(8)
    vs = VectorSet(
        ids=[f"d{i}" for i in range(8)],
        values=np.abs(rng.standard_normal((8, 4))) + 0.05,
        provenance={"kind": "test"},
    )
    g = build_mst_knn(cosine_similarity_matrix(vs), 2)
    assert build_operator(g).n == 8
    assert build_operator(g.adjacency).n == 8
