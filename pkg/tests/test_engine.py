from __future__ import annotations

import itertools

import numpy as np
import pytest

from blowspec import (
    CertificationError,
    EngineOptions,
    Graph,
    SpectrumSet,
    ValidationError,
    blowup_spectrum,
    compare_spectra,
    cross_validate_reductions,
    verify_spectrum,
)
from blowspec.graph import VertexSubset, induced_subgraph
from blowspec.spectra import Witness
from blowspec.weights import roots_of_unity

from conftest import atlas

K3 = Graph.complete(3)
R7 = np.sqrt(7)
K3_S2 = [0, 1, -1, 1j, -1j, 2, -2, (1 + R7 * 1j) / 2, (1 - R7 * 1j) / 2, (-1 + R7 * 1j) / 2, (-1 - R7 * 1j) / 2]


def brute_force(g: Graph, s: int) -> np.ndarray:
    """Eigenvalues of every pi-weighted induced subgraph, no reductions, plain numpy."""
    out = [0j]
    adj = g.adjacency()
    for k in range(1, g.n + 1):
        for sub in itertools.combinations(range(g.n), k):
            a = adj[np.ix_(sub, sub)]
            for e in itertools.product(range(2 * s), repeat=k):
                p = roots_of_unity(e, 2 * s)
                out.extend(np.linalg.eigvals(p[:, None] * a * p[None, :]))
    return np.asarray(out)


def covered(a, b, tol):
    a, b = np.asarray(a), np.asarray(b)
    return bool(np.all(np.abs(a[:, None] - b[None, :]).min(axis=1) <= tol))


class TestSpectrum:
    def test_k3(self):
        rep = blowup_spectrum(K3, 2)
        assert len(rep.values) == 11
        c = compare_spectra(rep.values, K3_S2, 1e-9)
        assert c.equal and c.max_matched_distance <= 1e-9

    def test_single_edge(self):
        assert compare_spectra(blowup_spectrum(Graph.complete(2), 2).values, [0, 1, -1, 1j, -1j], 1e-9).equal

    def test_path(self):
        r2 = np.sqrt(2)
        want = [0, 1, -1, 1j, -1j, r2, -r2, r2 * 1j, -r2 * 1j]
        assert compare_spectra(blowup_spectrum(Graph.path(3), 2).values, want, 1e-9).equal

    def test_edgeless(self):
        rep = blowup_spectrum(Graph.from_edges(3, []), 2)
        assert rep.values == (0j,)

    def test_zero_always_present_exactly(self):
        for g in atlas(4):
            assert 0j in blowup_spectrum(g, 3).values

    def test_bad_s(self):
        with pytest.raises(ValidationError):
            blowup_spectrum(K3, 1)

    @pytest.mark.parametrize("kw", [{"tol": 0}, {"tol": -1e-7}, {"worker_count": 0}])
    def test_bad_options(self, kw):
        with pytest.raises(ValidationError):
            EngineOptions(**kw)

    def test_certificates_attached(self):
        rep = blowup_spectrum(Graph.cycle(4), 3)
        assert len(rep.certified) == len(rep.values)
        assert max(rep.certified) <= 1e-8
        assert all(w is not None and w.s == 3 for w in rep.spectrum.witnesses)
        assert rep.counts["records_over_tolerance"] == 0
        assert {"subsets", "matrices", "records", "values", "wall_ms"} <= set(rep.counts)

    def test_certify_off(self):
        rep = blowup_spectrum(K3, 2, EngineOptions(certify=False))
        assert rep.certified is None and len(rep.values) == 11

    @pytest.mark.parametrize("s", [2, 3])
    def test_against_brute_force(self, s):
        # raw eigvals of defective matrices scatter by ~eps**(1/k), hence 1e-3
        for g in atlas(4 if s == 2 else 3, min_n=2):
            got = blowup_spectrum(g, s).values
            ref = brute_force(g, s)
            assert covered(got, ref, 1e-3) and covered(ref, got, 1e-3), g.edges

    def test_worker_count_does_not_change_result(self):
        g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
        one = blowup_spectrum(g, 2, EngineOptions(worker_count=1))
        two = blowup_spectrum(g, 2, EngineOptions(worker_count=2))
        assert one.values == two.values
        assert one.spectrum.witnesses == two.spectrum.witnesses
        assert one.certified == two.certified

    def test_monotone_under_induced_subgraphs(self):
        for g in atlas(5, min_n=2):
            full = blowup_spectrum(g, 2, EngineOptions(certify=False))
            for v in range(g.n):
                sub, _ = induced_subgraph(g, VertexSubset.of(g.n, [u for u in range(g.n) if u != v]))
                part = blowup_spectrum(sub, 2, EngineOptions(certify=False))
                assert covered(part.values, full.values, 1e-7)

    def test_witnesses_reproduce_values(self):
        rep = blowup_spectrum(Graph.path(4), 3)
        for z, w in zip(rep.values, rep.spectrum.witnesses):
            if z == 0:
                assert len(w.subset) == 1
                continue
            sub, _ = induced_subgraph(Graph.path(4), VertexSubset.of(4, w.subset))
            eta = roots_of_unity(w.eta, 3)
            ev = np.linalg.eigvals(eta[:, None] * sub.adjacency())
            assert np.abs(ev - z).min() <= 1e-6


class TestVerify:
    def test_round_trip(self):
        rep = blowup_spectrum(K3, 2)
        vr = verify_spectrum(K3, 2, rep.spectrum)
        assert vr.passed and len(vr.entries) == 11
        assert all(e.residual <= 1e-8 for e in vr.entries)

    def test_wrong_value_fails(self):
        sp = SpectrumSet((3.0 + 0j,), 1e-7, (Witness((0, 1, 2), 2, (0, 0, 0)),))
        vr = verify_spectrum(K3, 2, sp)
        assert not vr.passed and vr.failures[0].value == 3

    def test_zero_single_vertex(self):
        sp = SpectrumSet((0j,), 1e-7, (Witness((1,), 2, (0,)),))
        assert verify_spectrum(K3, 2, sp).passed

    def test_missing_witness(self):
        with pytest.raises(ValidationError):
            verify_spectrum(K3, 2, SpectrumSet((1 + 0j,), 1e-7))

    def test_pi_space_witness(self):
        sp = SpectrumSet((-2 + 0j,), 1e-7, (Witness((0, 1, 2), 2, (1, 1, 1), pi=(1, 1, 1)),))
        assert verify_spectrum(K3, 2, sp).passed

    def test_certification_failure_is_hard_error(self, monkeypatch):
        import blowspec.engine as eng

        monkeypatch.setattr(eng, "residuals_batch", lambda h, lams, xs: np.ones(len(lams)))
        with pytest.raises(CertificationError):
            blowup_spectrum(K3, 2)


class TestCrossValidation:
    @pytest.mark.parametrize("g, s, size", [(K3, 2, 11), (Graph.path(3), 2, 9), (Graph.complete(2), 3, 7)])
    def test_examples(self, g, s, size):
        cv = cross_validate_reductions(g, s, certify=True)
        assert cv.equal
        assert all(len(r.values) == size for r in cv.reports.values())

    def test_k2_s3_is_sixth_roots(self):
        cv = cross_validate_reductions(Graph.complete(2), 3)
        want = [0, *roots_of_unity(np.arange(6), 6)]
        assert compare_spectra(cv.reports["all_reductions"].values, want, 1e-9).equal

    def test_limits(self):
        with pytest.raises(ValidationError):
            cross_validate_reductions(Graph.path(9), 2)
        with pytest.raises(ValidationError):
            cross_validate_reductions(K3, 5)

    def test_reductions_shrink_work(self):
        cv = cross_validate_reductions(Graph.cycle(5), 2)
        work = {k: r.counts["matrices"] for k, r in cv.reports.items()}
        assert work["all_reductions"] < work["no_eta"] < work["no_reductions"]
        assert work["all_reductions"] < work["no_rotation_quotient"]
        assert work["all_reductions"] < work["no_connected"]
