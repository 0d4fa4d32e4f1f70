import random

import pytest

from ptx.cochains import DerivTensor, d_contra
from ptx.extension import ext_bracket
from ptx.gauge import (
    GaugeData,
    GaugeError,
    compose_gauges,
    exactness_solve,
    gauge_apply_elem,
    gauge_transport_triple,
    inverse_gauge,
    is_flat,
    mu_gauge,
    poisson_module_roundtrip,
    random_unimodular,
)
from ptx.manifest import load_fixture
from ptx.poly import Poly, PolyVec
from ptx.triple import TripleData, triple_check

from conftest import rand_elem, rand_vec


def test_inverse_must_match():
    x1 = Poly.var(3, 0)
    phi = [[Poly.one(3), x1], [Poly.zero(3), Poly.one(3)]]
    with pytest.raises(GaugeError):
        GaugeData(3, 2, [PolyVec.zero(3, 2)] * 3, phi, phi)
    inv = [[Poly.one(3), -x1], [Poly.zero(3), Poly.one(3)]]
    G = GaugeData(3, 2, [PolyVec.zero(3, 2)] * 3, phi, inv)
    assert G.apply11_inv(G.apply11(PolyVec.unit(3, 2, 1))) == PolyVec.unit(3, 2, 1)


def test_random_unimodular_is_invertible():
    rng = random.Random(0)
    for _ in range(5):
        phi, inv = random_unimodular(3, 3, rng)
        GaugeData(3, 3, [PolyVec.zero(3, 3)] * 3, phi, inv)


def test_identity_gauge_is_trivial(so3):
    G = GaugeData.identity(3, 3)
    assert gauge_transport_triple(G, so3) == so3
    p = rand_elem(random.Random(1), so3)
    assert gauge_apply_elem(G, p) == p


def test_mu_gauges_commute(gl2):
    rng = random.Random(2)
    for _ in range(5):
        G1 = mu_gauge([rand_vec(rng, 3, 4) for _ in range(3)])
        G2 = mu_gauge([rand_vec(rng, 3, 4) for _ in range(3)])
        a, b = compose_gauges(G1, G2), compose_gauges(G2, G1)
        assert a.mu == b.mu and a.phi11 == b.phi11
        assert gauge_transport_triple(a, gl2) == gauge_transport_triple(b, gl2)


def test_composition_matches_successive_transport(so3):
    rng = random.Random(3)
    for _ in range(4):
        gs = []
        for _ in range(2):
            phi, inv = random_unimodular(3, 3, rng, steps=2)
            gs.append(GaugeData(3, 3, [rand_vec(rng, 3, 3) for _ in range(3)], phi, inv))
        G1, G2 = gs
        once = gauge_transport_triple(compose_gauges(G1, G2), so3)
        twice = gauge_transport_triple(G2, gauge_transport_triple(G1, so3))
        assert once == twice


def test_transport_rejects_invalid_triple(so3):
    bad = so3.replace(gamma={**so3.gamma, (0, 0, 0): Poly.var(3, 0)})
    with pytest.raises(GaugeError):
        gauge_transport_triple(GaugeData.identity(3, 3), bad)


def test_intertwining_on_transported_bracket(gl2):
    rng = random.Random(4)
    phi, inv = random_unimodular(3, 4, rng)
    G = GaugeData(3, 4, [rand_vec(rng, 3, 4) for _ in range(3)], phi, inv)
    T2 = gauge_transport_triple(G, gl2)
    for _ in range(5):
        p, q = rand_elem(rng, gl2), rand_elem(rng, gl2)
        assert gauge_apply_elem(G, ext_bracket(T2, p, q)) == ext_bracket(gl2, gauge_apply_elem(G, p), gauge_apply_elem(G, q))
        Gi = inverse_gauge(G)
        assert gauge_apply_elem(Gi, gauge_apply_elem(G, p)) == p


# ---------------------------------------------------------------------------
# exactness


def _central_rank1(T, poly):
    ident = T.unit(0) + T.unit(3)
    return DerivTensor(T.n, T.k, 1, {(i,): ident * poly[i] for i in range(T.n)})


def test_exactness_found_or_inconclusive(so3_flat):
    T = so3_flat
    x = [Poly.var(3, i) for i in range(3)]
    Q = DerivTensor(3, 3, 1, {(0,): T.unit(0) * (x[1] * x[2]), (2,): T.unit(1) * x[0] ** 2})
    Kdiff = d_contra(T, Q)
    res = exactness_solve(T, Kdiff, 1)
    assert not res.found and not res.certified
    assert "inconclusive" in res.summary()
    res = exactness_solve(T, Kdiff, 2)
    assert res.found and res.flat_verified
    assert d_contra(T, res.q) == Kdiff


def test_exactness_certified_absence():
    # a closed but non-exact center-valued 2-cochain on the zero base
    from ptx.base import PoissonBase

    T = TripleData(PoissonBase.zero(2), 1)
    K = DerivTensor(2, 1, 2, {(0, 1): PolyVec([Poly.one(2)], 2)})
    res = exactness_solve(T, K, 3)
    assert not res.found and res.certified
    assert "certified" in res.summary()


def test_exactness_flags_curved_connection(gl2):
    # constant mu keeps the connection homogeneous while [mu1, mu2] curves it
    G = mu_gauge([gl2.unit(1), gl2.unit(2), PolyVec.zero(3, 4)])
    T = gauge_transport_triple(G, gl2)
    assert triple_check(T).ok and not is_flat(T)
    x = [Poly.var(3, i) for i in range(3)]
    Kdiff = d_contra(T, _central_rank1(T, [x[0], x[1], Poly.zero(3)]))
    res = exactness_solve(T, Kdiff, 1)
    assert res.found and not res.flat_verified
    assert "not flat" in res.summary()


def test_exactness_rejects_non_central(so3):
    K = DerivTensor(3, 3, 2, {(0, 1): so3.unit(0)})
    with pytest.raises(ValueError):
        exactness_solve(so3, K, 1)


# ---------------------------------------------------------------------------
# module form


def test_zero_triple_module_form():
    T = TripleData.zero(load_fixture("so3_base_only.json").base, 2)
    res = poisson_module_roundtrip(T)
    assert res.is_module
    assert all(v.is_zero() for row in res.lam for v in row)


def test_k_tensor_obstruction():
    base = load_fixture("so3_base_only.json").base
    T = TripleData(base, 1, kk={(0, 0, 1): Poly.one(3)})
    res = poisson_module_roundtrip(T)
    assert res.obstructions == ["nonzero K-tensor"]


def test_module_form_with_nonzero_action():
    # at eps = 0 the fiber bracket vanishes and D_{dx1} e2 = e3 survives
    T = load_fixture("so3.json", eps="0")
    res = poisson_module_roundtrip(T)
    assert res.is_module
    assert res.lam[0][1] == T.unit(2)
