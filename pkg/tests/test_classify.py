from __future__ import annotations

import numpy as np
import pytest

from blowspec import CertificationError, Graph, ValidationError, build_blowup
from blowspec.classify import (
    classify_real_eigenvalue,
    k3_minus_two_certificate,
    lift_real,
    nowhere_zero_in_eigenspace,
    numeric_real_eigvec_search,
)
from blowspec.hypergraph import UniformHypergraph, eigen_residual, TensorEigenPair

K3 = Graph.complete(3)


class TestNowhereZero:
    def test_perron(self):
        v = nowhere_zero_in_eigenspace(K3.adjacency(), 2.0)
        np.testing.assert_allclose(v, np.ones(3), atol=1e-12)

    def test_path_kernel_has_zero(self):
        assert nowhere_zero_in_eigenspace(Graph.path(3).adjacency(), 0.0) is None

    def test_two_dimensional_eigenspace(self):
        v = nowhere_zero_in_eigenspace(K3.adjacency(), -1.0, rng=4)
        assert v is not None and np.abs(v).min() > 1e-6
        assert abs(v.sum()) < 1e-10
        np.testing.assert_allclose(K3.adjacency() @ v, -v, atol=1e-12)

    def test_not_an_eigenvalue(self):
        assert nowhere_zero_in_eigenspace(K3.adjacency(), 1.5) is None

    def test_rejects_nonsymmetric(self):
        with pytest.raises(ValidationError):
            nowhere_zero_in_eigenspace(np.array([[0, 1], [0, 0]]), 0.0)


class TestClassify:
    def test_k3_examples(self):
        assert classify_real_eigenvalue(K3, 2, -2).verdict == "N"
        h = classify_real_eigenvalue(K3, 2, 2)
        assert h.verdict == "H" and h.residual <= 1e-15
        np.testing.assert_allclose(h.vector, np.ones(6), atol=1e-15)
        one = classify_real_eigenvalue(K3, 2, 1)
        assert one.verdict == "H" and one.subset == (0, 1)
        np.testing.assert_allclose(one.vector, [1, 1, 1, 1, 0, 0])
        neg = classify_real_eigenvalue(K3, 2, -1)
        assert neg.verdict == "H" and neg.residual <= 1e-8

    def test_zero(self):
        v = classify_real_eigenvalue(K3, 2, 0.0)
        assert v.verdict == "ZERO" and v.residual == 0

    def test_n_lists_reasons(self):
        v = classify_real_eigenvalue(K3, 2, -2)
        assert len(v.examined) == 7
        assert all("not an adjacency eigenvalue" in f.reason for f in v.examined)
        d = v.to_dict()
        assert d["verdict"] == "N" and d["method"] == "derived-reduction" and len(d["examined"]) == 7

    def test_vanishing_coordinate_falls_back_to_smaller_subset(self):
        # every eigenvector of P5 at 1 vanishes at the middle vertex; an edge
        # still gives a real eigenvector
        assert nowhere_zero_in_eigenspace(Graph.path(5).adjacency(), 1.0) is None
        v = classify_real_eigenvalue(Graph.path(5), 2, 1.0)
        assert v.verdict == "H" and len(v.subset) == 2
        v = classify_real_eigenvalue(Graph.path(3), 3, np.sqrt(2))
        assert v.verdict == "H" and v.subset == (0, 1, 2)

    def test_complex_lambda_rejected(self):
        with pytest.raises(ValidationError):
            classify_real_eigenvalue(K3, 2, 1j)
        with pytest.raises(ValidationError):
            classify_real_eigenvalue(K3, 1, 2)

    def test_block_magnitudes_equal(self):
        for g, lam in [(K3, -1.0), (Graph.path(4), (1 + np.sqrt(5)) / 2), (Graph.cycle(5), 2.0)]:
            for s in (2, 3):
                v = classify_real_eigenvalue(g, s, lam)
                _, bm = build_blowup(g, s)
                for blk in bm.blocks:
                    m = np.abs(v.vector[list(blk)])
                    assert np.ptp(m) <= 1e-9 * max(m.max(), 1e-300)

    def test_failed_lift_surfaces(self, monkeypatch):
        import blowspec.classify as cl

        monkeypatch.setattr(cl, "lift_real", lambda bm, labels, t: np.arange(1.0, bm.s * bm.base.n + 1))
        with pytest.raises(CertificationError):
            classify_real_eigenvalue(K3, 2, 2.0)

    def test_lift_signs(self):
        _, bm = build_blowup(K3, 3)
        x = lift_real(bm, [0, 2], np.array([8.0, -1.0]))
        np.testing.assert_allclose(x, [2, 2, 2, 0, 0, 0, -1, 1, 1])
        assert np.prod(x[6:9]) < 0


class TestOracle:
    def test_finds_perron(self):
        h, _ = build_blowup(K3, 2)
        best, x = numeric_real_eigvec_search(h, 2.0, restarts=200)
        assert best <= 1e-8
        assert np.isrealobj(x)
        np.testing.assert_allclose(np.abs(x), np.full(6, 1 / np.sqrt(6)), atol=1e-6)

    def test_minus_two_not_found(self):
        h, _ = build_blowup(K3, 2)
        best, _ = numeric_real_eigvec_search(h, -2.0, restarts=500)
        assert best > 1e-2

    def test_single_edge(self):
        best, _ = numeric_real_eigvec_search(UniformHypergraph(4, 4, [[0, 1, 2, 3]]), 1.0, restarts=100)
        assert best <= 1e-8

    def test_agrees_with_classifier_on_h(self):
        # one-sided check of the other direction on a few H values
        for g, s, lam in [(K3, 2, -1.0), (Graph.path(3), 2, np.sqrt(2)), (Graph.path(3), 3, -np.sqrt(2))]:
            h, _ = build_blowup(g, s)
            v = classify_real_eigenvalue(g, s, lam)
            assert v.verdict == "H"
            best, x = numeric_real_eigvec_search(h, lam, restarts=300)
            assert best <= 1e-6
            assert eigen_residual(h, TensorEigenPair(lam, x)).max_residual <= 1e-6

    def test_deterministic(self):
        h, _ = build_blowup(K3, 2)
        a = numeric_real_eigvec_search(h, -2.0, restarts=50, rng=3)
        b = numeric_real_eigvec_search(h, -2.0, restarts=50, rng=3)
        assert a[0] == b[0] and np.array_equal(a[1], b[1])

    def test_restarts_validated(self):
        h, _ = build_blowup(K3, 2)
        with pytest.raises(ValidationError):
            numeric_real_eigvec_search(h, 1.0, restarts=0)


class TestCertificate:
    def test_trace(self):
        cert = k3_minus_two_certificate()
        assert cert["coefficient_matrix"] == [[2, 1, 1], [1, 2, 1], [1, 1, 2]]
        assert cert["determinant"] == 4
        assert cert["only_trivial_solution"] and cert["all_blocks_nonzero"]
        assert cert["verdict"] == "N"
        assert all(isinstance(v, int) for row in cert["coefficient_matrix"] for v in row)

    def test_consistent_with_classifier(self):
        assert classify_real_eigenvalue(K3, 2, -2).verdict == k3_minus_two_certificate()["verdict"]
