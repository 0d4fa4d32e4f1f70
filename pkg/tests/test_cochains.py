import random
from itertools import combinations

import pytest

from ptx.base import PoissonBase
from ptx.cochains import (
    DerivTensor,
    FormTensor,
    NotGradedError,
    cohomology_dims,
    d_contra,
    d_contra_eval,
    d_squared_check,
    delta_map,
    filtered_bounds,
    form_differential,
    form_of,
    j_kernel_witness,
    m_membership_check,
    multideriv_apply,
    weight_shift,
)
from ptx.extension import ExtElem, torsion_apply
from ptx.poly import Poly, PolyVec
from ptx.triple import TripleData, contra_deriv_dx, fiber_bracket

from conftest import rand_poly, rand_vec
import oracle


def rand_tensor(rng, T, r, cls=DerivTensor, max_degree=1):
    return cls(T.n, T.k, r, {I: rand_vec(rng, T.n, T.k, max_degree) for I in combinations(range(T.n), r)})


def test_skew_extension():
    Q = DerivTensor(3, 1, 2, {(0, 1): PolyVec([Poly.one(3)], 3)})
    assert Q.value((1, 0)) == -Q.value((0, 1))
    assert Q.value((0, 0)).is_zero()
    with pytest.raises(ValueError):
        DerivTensor(3, 1, 2, {(1, 0): PolyVec([Poly.one(3)], 3)})


def test_deriv_and_form_tensors_differ_in_type():
    Q = DerivTensor(3, 1, 1, {(0,): PolyVec([Poly.one(3)], 3)})
    assert form_of(Q) != Q
    assert delta_map(form_of(Q)) == Q


@pytest.mark.parametrize("r", [0, 1, 2])
def test_generator_and_direct_differentials_agree(so3, r):
    rng = random.Random(r)
    for _ in range(4):
        Q = rand_tensor(rng, so3, r)
        dQ = d_contra(so3, Q)
        fs = [rand_poly(rng, 3, 2, 3) for _ in range(r + 1)]
        assert multideriv_apply(dQ, fs) == d_contra_eval(so3, Q, fs)


@pytest.mark.parametrize("r", [0, 1, 2])
def test_delta_commutes_with_differentials(so3, r):
    rng = random.Random(10 + r)
    for _ in range(4):
        Qbar = rand_tensor(rng, so3, r, FormTensor)
        assert delta_map(form_differential(so3, Qbar)) == d_contra(so3, delta_map(Qbar))


def test_d_squared_flat_is_zero(so3):
    rng = random.Random(1)
    for r in (0, 1):
        Q = rand_tensor(rng, so3, r)
        assert d_squared_check(so3, Q).ok
        assert d_contra(so3, d_contra(so3, Q)).is_zero()


def test_weight_shift():
    x1, x2 = Poly.var(2, 0), Poly.var(2, 1)
    assert weight_shift(TripleData(PoissonBase(2, {(0, 1): x1 * x2}), 1)) == 1
    T = TripleData(PoissonBase(2, {(0, 1): x1}), 1, gamma={(0, 0, 0): Poly.one(2)})
    assert weight_shift(T) == 0


def test_not_graded_raises_and_bounds_still_available():
    x1, x2 = Poly.var(2, 0), Poly.var(2, 1)
    T = TripleData(PoissonBase(2, {(0, 1): x1 + x1 * x2}), 1)
    with pytest.raises(NotGradedError):
        cohomology_dims(T, 1, 1)
    z, b = filtered_bounds(T, 1, 1)
    assert z >= b >= 0


def test_mismatched_connection_degree_is_not_graded():
    x1 = Poly.var(2, 0)
    T = TripleData(PoissonBase(2, {(0, 1): x1}), 1, gamma={(0, 0, 0): x1})
    with pytest.raises(NotGradedError):
        weight_shift(T)


@pytest.mark.parametrize("r,degree", [(0, 1), (1, 0), (1, 1), (2, 0)])
def test_full_coefficient_dims_match_oracle(gl2, r, degree):
    s = weight_shift(gl2)
    assert cohomology_dims(gl2, r, degree).as_tuple() == oracle.DenseComplex(gl2).dims(r, degree, s)


# ---------------------------------------------------------------------------
# membership conditions for (L, ell, theta)


def test_inner_derivation_triple(so3):
    n, k = 3, 3
    e1 = so3.unit(0)
    L = [fiber_bracket(so3, e1, so3.unit(b)) for b in range(k)]
    theta = [contra_deriv_dx(so3, i, e1) for i in range(n)]
    zero = [Poly.zero(n)] * n
    assert m_membership_check(so3, L, zero, theta).ok
    rep = m_membership_check(so3, L, zero, [PolyVec.zero(n, k)] * n)
    assert not rep.passed("D-commutator")


def test_zero_triple_is_member(so3):
    n, k = 3, 3
    assert m_membership_check(so3, [PolyVec.zero(n, k)] * k, [Poly.zero(n)] * n, [PolyVec.zero(n, k)] * n).ok


def test_j_kernel_witness(matrix2):
    T = matrix2
    x = [Poly.var(3, i) for i in range(3)]
    p = ExtElem(Poly.zero(3), T.unit(0) * x[0])
    c = DerivTensor(3, 4, 1, {(i,): torsion_apply(T, p, i) for i in range(3)})
    w = j_kernel_witness(T, c, 1)
    assert w is not None
    assert all(torsion_apply(T, w, i) == c.value((i,)) for i in range(3))
    # a constant target cannot be a torsion of this module
    const = DerivTensor(3, 4, 1, {(0,): T.unit(0)})
    assert j_kernel_witness(T, const, 2) is None
