"""Acceptance gate: one group of tests per criterion, summarized at the end of the run."""
import math
import time

import numpy as np
import pytest

from conftest import dense_walk
from pstkit.graph_core import (Graph, cartesian, cartesian_power, complement, make_named,
                               matching_cover, switching_pair, tensor)
from pstkit.pst_core import certify_pst
from pstkit.product_framework import sum_product_unitary
from pstkit.qfield import ExactTime, UnitPhase
from pstkit.spectra import decompose
from pstkit.switching_pst import block_identity_error, complement_switching_check, matching_switching_check
from pstkit.tensor_pst import (cartesian_power_certificate, make_y_certificate, min_cartesian_power,
                               tensor_pst_check, tensor_unitary)
from pstkit.walk_oracle import fidelity, scan, unitary, verify_certificate, verify_claim

TOL = 1e-9
PHASE_TOL = 1e-8
GRID_BOUND = 1 - 1e-6


def _random_graph(rng, n, p=0.5):
    a = np.triu((rng.random((n, n)) < p).astype(np.int64), 1)
    return Graph(a + a.T)


def _circulant(rng, n):
    """Random symmetric 0/1 circulant; orders with quadratic spectra only."""
    conn = [k for k in range(1, n // 2 + 1) if rng.random() < 0.5]
    a = np.zeros((n, n), dtype=np.int64)
    for k in conn:
        for i in range(n):
            a[i, (i + k) % n] = a[(i + k) % n, i] = 1
    return a


# 1 ---------------------------------------------------------------------------

@pytest.mark.criterion(1, "P2: tau0 = pi/2, phase i, odd multiples transfer, 2 tau0 returns, < 0.1 s")
def test_c1_p2():
    g = make_named("path", 2)
    t0 = time.perf_counter()
    cert = certify_pst(g, 0, 1)
    res = verify_certificate(cert)
    elapsed = time.perf_counter() - t0
    assert cert.passed
    assert cert.tau0 == ExactTime.of(1, 2)
    assert cert.phase == UnitPhase.of(1, 2)
    assert res.passed and res.fidelity >= 1 - TOL
    assert fidelity(g, 0, 1, cert.time(3)) >= 1 - TOL
    assert fidelity(g, 0, 0, cert.time(2)) >= 1 - TOL
    assert elapsed < 0.1


# 2 ---------------------------------------------------------------------------

@pytest.mark.criterion(2, "P3 certificate (pi/sqrt2, -1, Phi- = {0}); P4, P5 fail and scan below 1 - 1e-6")
def test_c2_p3():
    cert = certify_pst(make_named("path", 3), 0, 2)
    assert cert.passed
    assert cert.tau0 == ExactTime.of(1, 1, 2)
    assert cert.phase == UnitPhase.of(1, 1)
    assert [str(t) for t in cert.minus] == ["0"]
    assert verify_certificate(cert, tol=TOL).passed


@pytest.mark.criterion(2, "P3 certificate (pi/sqrt2, -1, Phi- = {0}); P4, P5 fail and scan below 1 - 1e-6")
@pytest.mark.parametrize("k", [4, 5])
def test_c2_long_paths(k):
    g = make_named("path", k)
    assert not certify_pst(g, 0, k - 1).passed
    assert scan(g, 0, k - 1, 20.0, 1e-3).best_fidelity < GRID_BOUND


# 3 ---------------------------------------------------------------------------

@pytest.mark.criterion(3, "projector double sum and U_{X[]Y} = U_X (x) U_Y on 50 commuting instances, < 10 s")
def test_c3_double_sum():
    rng = np.random.default_rng(2024)
    orders = [2, 3, 4, 5, 6, 8]
    t0 = time.perf_counter()
    worst = worst_cart = 0.0
    for _ in range(50):
        n1, n2 = rng.choice(orders, 2)
        b, m = _circulant(rng, n1), _circulant(rng, n1)
        c, n = _circulant(rng, n2), _circulant(rng, n2)
        t = rng.uniform(0, 2 * math.pi)
        got = sum_product_unitary(b, c, m, n, t)
        want = dense_walk(np.kron(b, c) + np.kron(m, n), t)
        worst = max(worst, np.max(np.abs(got - want)))
        # the Cartesian product is the special case B = A(X), C = I, M = I, N = A(Y)
        i1, i2 = np.eye(n1, dtype=np.int64), np.eye(n2, dtype=np.int64)
        cart = sum_product_unitary(b, i2, i1, c, t)
        worst_cart = max(worst_cart, np.max(np.abs(cart - np.kron(dense_walk(b, t), dense_walk(c, t)))))
    assert worst < TOL
    assert worst_cart < TOL
    assert time.perf_counter() - t0 < 10


# 4 ---------------------------------------------------------------------------

@pytest.mark.criterion(4, "tensor-product projector formula matches dense exponentiation on 20 pairs")
def test_c4_tensor_unitary():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        nx_ = int(rng.integers(1, 9))
        ny = int(rng.integers(1, 64 // nx_ + 1))
        ny = min(ny, 12)
        x, y = _random_graph(rng, nx_), _random_graph(rng, ny)
        t = rng.uniform(0, 10)
        got = tensor_unitary(decompose(x), y, t)
        want = dense_walk(np.kron(x.adj, y.adj), t)
        worst = max(worst, np.max(np.abs(got - want)))
    assert worst < TOL


# 5 ---------------------------------------------------------------------------

C5_TEXT = "K4 x C4 passes at pi/2 with phase -1; verdicts on connected X (<= 5 vertices) x C4 match the oracle"


@pytest.mark.criterion(5, C5_TEXT)
def test_c5_k4_c4():
    rep = tensor_pst_check(make_named("complete", 4), 0, 0, make_y_certificate(make_named("cycle", 4), 0, 2))
    assert rep.passed
    assert rep.tau == ExactTime.of(1, 2)
    assert rep.phase == UnitPhase.of(1, 1)
    assert verify_certificate(rep, tol=TOL).passed


def _connected_small():
    import networkx as nx
    for g in nx.graph_atlas_g()[1:]:
        if g.number_of_nodes() <= 5 and nx.is_connected(g):
            yield Graph(nx.to_numpy_array(g, dtype=np.int64))


@pytest.mark.criterion(5, C5_TEXT)
def test_c5_sampled_completeness():
    t0 = time.perf_counter()
    c4 = make_named("cycle", 4)
    ycert = make_y_certificate(c4, 0, 2)
    checked = 0
    for x in _connected_small():
        dx = decompose(x)
        if not dx.fully_recognized:
            continue
        prod = tensor(x, c4)
        for w in range(x.n):
            for z in range(w, x.n):
                rep = tensor_pst_check(dx, w, z, ycert)
                a, b = w * 4 + 0, z * 4 + 2
                if rep.passed:
                    assert verify_claim(prod, a, b, rep.tau, rep.phase, TOL).passed, (x.adj, w, z)
                else:
                    assert scan(prod, a, b, 20.0, 1e-3).best_fidelity < GRID_BOUND, (x.adj, w, z, rep.reason)
                checked += 1
    assert checked > 50
    assert time.perf_counter() - t0 < 120


# 6 ---------------------------------------------------------------------------

C6_TEXT = "min_cartesian_power(S3, C4) = 2 and S3 x (C4 [] C4) transfers at pi/(2 sqrt3)"


@pytest.mark.criterion(6, C6_TEXT)
def test_c6_min_power():
    ycert = make_y_certificate(make_named("cycle", 4), 0, 2)
    assert min_cartesian_power(make_named("star", 3), ycert, 0) == 2


@pytest.mark.criterion(6, C6_TEXT)
def test_c6_star_square():
    c4 = make_named("cycle", 4)
    s3 = make_named("star", 3)
    y2 = cartesian_power(c4, 2)
    prod = tensor(s3, y2)
    # (center, (0,0)) -> (center, (2,2)); center is vertex 0 of the star
    a, b = 0 * 16 + 0 * 4 + 0, 0 * 16 + 2 * 4 + 2
    tau = ExactTime.of(1, 2, 3)
    assert fidelity(prod, a, b, tau) >= 1 - TOL
    rep = tensor_pst_check(s3, 0, 0, cartesian_power_certificate(make_y_certificate(c4, 0, 2), 2))
    assert rep.passed and rep.tau == tau
    assert rep.product_vertices() == (a, b)
    assert verify_certificate(rep, tol=TOL).passed


# 7 ---------------------------------------------------------------------------

C7_TEXT = "K4[]K4 switching with its complement: case i at pi/2, phase -i, < 1 s; K3 fails"


@pytest.mark.criterion(7, C7_TEXT)
def test_c7_k4k4():
    x = cartesian(make_named("complete", 4), make_named("complete", 4))
    t0 = time.perf_counter()
    rep = complement_switching_check(x)
    elapsed = time.perf_counter() - t0
    assert rep.passed and rep.case == "i"
    assert rep.tau == ExactTime.of(1, 2)
    assert rep.lam == UnitPhase.of(3, 2)
    cover = switching_pair(x, complement(x))
    assert cover.n == 32
    for u in range(16):
        amp = unitary(cover, rep.tau)[16 + u, u]
        assert abs(amp) >= 1 - TOL
        assert abs(amp - (-1j)) <= PHASE_TOL
    assert elapsed < 1.0


@pytest.mark.criterion(7, C7_TEXT)
def test_c7_k3_negative():
    x = make_named("complete", 3)
    assert not complement_switching_check(x).passed
    cover = switching_pair(x, complement(x))
    for k in range(1, 7):
        assert fidelity(cover, 0, 3, 2 * k * math.pi / 3) < 1 - 1e-3


# 8 ---------------------------------------------------------------------------

C8_TEXT = "switching block identity on 20 random pairs; matching cover of C4 = Q3 agrees with the direct certificate"


@pytest.mark.criterion(8, C8_TEXT)
def test_c8_block_identity():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        x, y = _random_graph(rng, n), _random_graph(rng, n)
        assert block_identity_error(x, y, rng.uniform(0, 10)) < TOL


@pytest.mark.criterion(8, C8_TEXT)
def test_c8_matching_cover():
    c4 = make_named("cycle", 4)
    q3 = matching_cover(c4)
    assert np.array_equal(q3.adj, cartesian(c4, make_named("path", 2)).adj[np.ix_(*[_cart_to_cover()] * 2)])
    reports = matching_switching_check(c4)
    assert [r.case for r in reports] == ["iii"]
    rep = reports[0]
    assert ((0, 0), (1, 2)) in rep.pairs
    cert = certify_pst(q3, 0, 4 + 2)
    assert cert.passed
    assert cert.tau0 == rep.tau
    assert cert.phase == rep.lam
    assert verify_certificate(rep, tol=TOL).passed


def _cart_to_cover():
    # cover vertex (s, u) sits at s*4 + u; in C4 [] K2 it is u*2 + s
    return [u * 2 + s for s in range(2) for u in range(4)]


# 9 ---------------------------------------------------------------------------

@pytest.mark.criterion(9, "exact projector identities on every recognized corpus graph; spectral mapping < 1e-9")
def test_c9_exactness(corpus):
    from pstkit.qfield import RadMatrix
    rng = np.random.default_rng(3)
    count = 0
    for g in corpus:
        d = decompose(g)
        if not d.fully_recognized:
            continue
        count += 1
        es = d.projectors
        total = es[0]
        for e in es[1:]:
            total = total + e
        assert total == RadMatrix.identity(g.n)
        for e in es:
            assert e @ e == e
        recon = es[0].scale(d.eigenvalues[0])
        for th, e in zip(d.eigenvalues[1:], es[1:]):
            recon = recon + e.scale(th)
        assert recon == RadMatrix.from_int(g.adj)
        t = rng.uniform(0, 10)
        spec = sum(np.exp(1j * t * float(th)) * e.to_float() for th, e in zip(d.eigenvalues, es))
        assert np.max(np.abs(unitary(g, t) - spec)) < TOL
    assert count > 200
