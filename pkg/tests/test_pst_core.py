from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from conftest import dense_walk
from strategies import graphs
from pstkit.graph_core import cartesian, make_named, parse_graph6
from pstkit.pst_core import (PSTCertificate, PSTFailure, certify_pst, minimal_period, periodic_at,
                             quadratic_shape, transfer_phase)
from pstkit.qfield import ExactTime, QuadValue, UnitPhase
from pstkit.errors import UnsupportedSpectrum
from pstkit.spectra import decompose
from pstkit.walk_oracle import amplitude, fidelity, scan, verify_certificate

TOL = 1e-9


def _best_return(g, u, lo, hi, step=1e-3):
    lam, vecs = np.linalg.eigh(g.adj.astype(float))
    times = np.arange(lo, hi, step)
    amps = np.abs(np.exp(1j * np.outer(times, lam)) @ (vecs[u] ** 2))
    return float(amps.max()) if len(times) else 0.0


class TestCertify:
    def test_k2(self):
        cert = certify_pst(make_named("path", 2), 0, 1)
        assert isinstance(cert, PSTCertificate)
        assert (cert.delta, cert.g) == (1, 2)
        assert cert.tau0 == ExactTime.of(1, 2)
        assert cert.phase == UnitPhase.of(1, 2)
        # U(pi/2) = iA for K2
        u = dense_walk(make_named("path", 2).adj, np.pi / 2)
        assert np.allclose(u, 1j * make_named("path", 2).adj, atol=1e-12)

    def test_p3(self):
        cert = certify_pst(make_named("path", 3), 0, 2)
        assert (cert.delta, cert.g, cert.a, cert.b) == (2, 1, 0, (2, 0, -2))
        assert cert.tau0 == ExactTime.of(1, 1, 2)
        assert cert.phase == UnitPhase.of(1)

    def test_p4_fails_shape(self):
        res = certify_pst(make_named("path", 4), 0, 3)
        assert isinstance(res, PSTFailure)
        assert res.condition == "ii"
        assert "no common integer a" in res.witness

    def test_k3_fails_cospectral(self):
        res = certify_pst(make_named("complete", 3), 0, 1)
        assert res.condition == "i"

    def test_c6_parity_failure(self):
        # antipodal C6 vertices are strongly cospectral with integer spectrum but fail parity
        res = certify_pst(make_named("cycle", 6), 0, 3)
        assert res.condition == "iii"
        assert "Phi" in res.witness

    def test_c7_residual(self):
        res = certify_pst(make_named("cycle", 7), 0, 1)
        assert not res.passed

    def test_hypercube(self):
        q3 = make_named("hypercube", 3)
        cert = certify_pst(q3, 0, 7)
        assert cert.tau0 == ExactTime.of(1, 2)
        assert verify_certificate(cert, tol=TOL).passed

    def test_c4_square(self):
        g = cartesian(make_named("cycle", 4), make_named("cycle", 4))
        cert = certify_pst(g, 0, 10)
        assert cert.passed and cert.tau0 == ExactTime.of(1, 2)

    def test_half_integer_support(self):
        # vertices whose support has odd a, e.g. (1 +- sqrt(5))/2 cases, are handled without error
        g = parse_graph6("DhW")
        d = decompose(g)
        for u in range(g.n):
            for v in range(u + 1, g.n):
                certify_pst(d, u, v)

    def test_same_vertex_rejected(self):
        with pytest.raises(ValueError):
            certify_pst(make_named("path", 2), 0, 0)

    def test_signed_matrix_theta0_in_minus(self):
        # -A(K2): theta0 = 1 sits in Phi- and the phase flips sign
        d = decompose(-make_named("path", 2).adj)
        cert = certify_pst(d, 0, 1)
        assert cert.phase == UnitPhase.of(3, 2)
        assert abs(dense_walk(-make_named("path", 2).adj, np.pi / 2)[1, 0] - (-1j)) < 1e-12

    def test_json_shape(self):
        doc = certify_pst(make_named("path", 3), 0, 2).to_json()
        assert doc["type"] == "pst"
        assert doc["tau0"] == "1/1*pi/sqrt(2)"
        assert doc["phase"] == "exp(i*pi*1/1)"
        assert set(doc["conditions"]) == {"i", "ii", "iii"}
        assert doc["graph"] == "Bg"
        fail = certify_pst(make_named("path", 4), 0, 3).to_json()
        assert fail["type"] == "pst_failure" and fail["condition"] == "ii"


class TestQuadraticShape:
    def test_integers(self):
        assert quadratic_shape([QuadValue(2), QuadValue(0), QuadValue(-2)]) == (1, 0, (4, 0, -4))

    def test_mixed_fields(self):
        assert "mixes" in quadratic_shape([QuadValue(0, 1, 2), QuadValue(0, 1, 3)])


class TestCertificateProperties:
    @given(graphs(min_n=2, max_n=7))
    def test_soundness_and_odd_multiples(self, g):
        d = decompose(g)
        for u in range(g.n):
            for v in range(u + 1, g.n):
                cert = certify_pst(d, u, v)
                back = certify_pst(d, v, u)
                assert cert.passed == back.passed
                if not cert.passed:
                    continue
                assert cert.tau0 == back.tau0
                assert verify_certificate(cert, tol=TOL).passed
                assert abs(amplitude(g, u, v, cert.tau0) - cert.phase.to_complex()) < 1e-8
                for k in (1, 3, 5):
                    assert fidelity(g, u, v, cert.time(k)) >= 1 - TOL
                for k in (2, 4):
                    assert fidelity(g, u, u, cert.time(k)) >= 1 - TOL

    def test_corpus_soundness(self, corpus):
        issued = 0
        for g in corpus:
            d = decompose(g)
            for u in range(g.n):
                for v in range(u + 1, g.n):
                    cert = certify_pst(d, u, v)
                    if cert.passed:
                        issued += 1
                        assert verify_certificate(cert, tol=TOL).passed
        assert issued > 50

    def test_completeness_sample(self, corpus):
        rng = np.random.default_rng(5)
        picks = rng.choice(len(corpus), 40, replace=False)
        for i in picks:
            g = corpus[int(i)]
            d = decompose(g)
            if not d.fully_recognized:
                continue
            for u in range(g.n):
                for v in range(u + 1, g.n):
                    if not certify_pst(d, u, v).passed:
                        assert scan(g, u, v, 20.0, 1e-3).best_fidelity < 1 - 1e-6, (g.adj, u, v)


class TestPeriodicity:
    def test_c4_at_pi(self):
        assert periodic_at(make_named("cycle", 4), 0, ExactTime.of(1)) == UnitPhase.of(0)

    def test_star_center(self):
        assert periodic_at(make_named("star", 3), 0, ExactTime.of(1, 1, 3)) == UnitPhase.of(1)

    def test_k2_not_periodic(self):
        assert periodic_at(make_named("path", 2), 0, ExactTime.of(1, 3)) is None

    @pytest.mark.parametrize("name,k,period,phase", [
        ("cycle", 4, ExactTime.of(1), UnitPhase.of(0)),
        ("path", 2, ExactTime.of(1), UnitPhase.of(1)),
        ("star", 3, ExactTime.of(1, 1, 3), UnitPhase.of(1)),
        ("path", 3, ExactTime.of(2, 1, 2), UnitPhase.of(0)),
    ])
    def test_minimal_period(self, name, k, period, phase):
        g = make_named(name, k)
        cert = minimal_period(g, 0)
        assert cert.period == period and cert.phase == phase
        assert verify_certificate(cert, tol=TOL).passed

    def test_minimal_period_is_minimal(self):
        g = make_named("cycle", 4)
        cert = minimal_period(g, 0)
        t = cert.period.to_float()
        assert _best_return(g, 0, 0.05, t - 0.05) < 1 - 1e-6

    def test_eigenvector_vertex(self):
        cert = minimal_period(make_named("empty", 2), 0)
        assert cert.period is None and cert.oracle_claims() == []

    def test_p4_end_never_periodic(self):
        assert minimal_period(make_named("path", 4), 0) is None

    def test_residual_undetermined(self):
        with pytest.raises(UnsupportedSpectrum):
            minimal_period(make_named("cycle", 7), 0)
        with pytest.raises(UnsupportedSpectrum):
            periodic_at(make_named("cycle", 7), 0, ExactTime.of(1))

    @given(graphs(max_n=6))
    def test_period_oracle(self, g):
        d = decompose(g)
        for u in range(g.n):
            if d.touches_residual(u):
                continue
            cert = minimal_period(d, u)
            if cert is None or cert.period is None:
                continue
            assert verify_certificate(cert, tol=TOL).passed
            assert periodic_at(d, u, cert.period * Fraction(1, 2)) is None
            t = cert.period.to_float()
            assert _best_return(g, u, 0.05, t - 0.05) < 1 - 1e-6


class TestTransferPhase:
    def test_matches_certificate(self):
        cert = certify_pst(make_named("path", 3), 0, 2)
        assert transfer_phase(make_named("path", 3), 0, 2, cert.tau0) == cert.phase
        assert transfer_phase(make_named("path", 3), 0, 2, cert.time(3)) == cert.phase ** 3

    def test_even_multiple_is_not_transfer(self):
        cert = certify_pst(make_named("path", 2), 0, 1)
        assert transfer_phase(make_named("path", 2), 0, 1, cert.time(2)) is None

    def test_not_cospectral(self):
        assert transfer_phase(make_named("complete", 3), 0, 1, ExactTime.of(1)) is None
