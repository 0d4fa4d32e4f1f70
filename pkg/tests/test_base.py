import random

import pytest

from ptx.base import (
    PoissonBase,
    anchor_apply,
    base_bracket,
    base_jacobi_check,
    differential,
    dx,
    koszul_bracket,
)
from ptx.poly import Poly, PolyVec, parse_poly

from conftest import rand_poly


def so3_base():
    x = [Poly.var(3, i) for i in range(3)]
    return PoissonBase(3, {(0, 1): x[2], (0, 2): -x[1], (1, 2): x[0]})


def test_lie_poisson_brackets():
    B = so3_base()
    x = [Poly.var(3, i) for i in range(3)]
    assert base_bracket(B, x[0], x[1]) == x[2]
    assert base_bracket(B, x[1], x[0]) == -x[2]
    casimir = x[0] ** 2 + x[1] ** 2 + x[2] ** 2
    for xi in x:
        assert base_bracket(B, casimir, xi).is_zero()


def test_jacobi_passes_and_fails():
    assert base_jacobi_check(so3_base()).ok
    x = [Poly.var(3, i) for i in range(3)]
    bad = PoissonBase(3, {(0, 1): x[2], (0, 2): x[0]})  # jacobiator is x3
    rep = base_jacobi_check(bad)
    assert not rep.ok
    assert rep.failures[0].condition == "Jacobi"


def test_skew_entries():
    B = so3_base()
    assert B.entry(1, 0) == -B.entry(0, 1)
    assert B.entry(2, 2).is_zero()


def test_leibniz_rule():
    B = so3_base()
    rng = random.Random(1)
    for _ in range(20):
        f, g, h = (rand_poly(rng, 3, 2, 3) for _ in range(3))
        assert base_bracket(B, f, g * h) == base_bracket(B, f, g) * h + g * base_bracket(B, f, h)


def test_anchor_and_koszul_on_exact_forms():
    B = so3_base()
    rng = random.Random(2)
    for _ in range(15):
        f, g, h = (rand_poly(rng, 3, 2, 3) for _ in range(3))
        # the anchor sends df to {f, .}
        assert anchor_apply(B, differential(B, f), g) == base_bracket(B, f, g)
        # Koszul bracket of exact forms is d of the bracket
        assert koszul_bracket(B, differential(B, f), differential(B, g)) == differential(B, base_bracket(B, f, g))
    assert koszul_bracket(B, dx(B, 0), dx(B, 1)) == differential(B, Poly.var(3, 2))


def test_koszul_on_non_exact_forms():
    B = so3_base()
    x = [Poly.var(3, i) for i in range(3)]
    alpha = PolyVec([x[1], Poly.zero(3), Poly.zero(3)], 3)  # x2 dx1
    beta = dx(B, 2)
    # [x2 dx1, dx3] = x2 d{x1,x3} - {x3, x2} dx1 = x1 dx1 - x2 dx2
    assert koszul_bracket(B, alpha, beta) == PolyVec([x[0], -x[1], Poly.zero(3)], 3)


def test_zero_base():
    B = PoissonBase.zero(2)
    assert base_jacobi_check(B).ok
    assert base_bracket(B, parse_poly("x1", 2), parse_poly("x2", 2)).is_zero()


def test_wrong_variable_count():
    with pytest.raises(ValueError):
        base_bracket(so3_base(), Poly.var(2, 0), Poly.var(3, 0))
