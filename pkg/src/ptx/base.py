"""Polynomial Poisson brackets given by a skew matrix of structure polynomials."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .poly import Poly, PolyVec, VariableCountError
from .report import Report

OneForm = PolyVec


@dataclass(frozen=True)
class PoissonBase:
    """``pi[(i, j)]`` for ``i < j`` holds ``{x_i, x_j}``; missing entries are zero."""

    n: int
    pi: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), p in self.pi.items():
            if not (0 <= i < j < self.n):
                raise ValueError(f"structure index ({i},{j}) must satisfy 0 <= i < j < {self.n}")
            if p.n != self.n:
                raise VariableCountError(f"pi[{i},{j}] has {p.n} variables, expected {self.n}")
            if p:
                clean[(i, j)] = p
        object.__setattr__(self, "pi", clean)
        full = [[Poly.zero(self.n)] * self.n for _ in range(self.n)]
        for (i, j), p in clean.items():
            full[i][j] = p
            full[j][i] = -p
        object.__setattr__(self, "_full", tuple(tuple(r) for r in full))

    def entry(self, i: int, j: int) -> Poly:
        """``{x_i, x_j}`` with the skew extension."""
        return self._full[i][j]

    def matrix(self):
        return self._full

    @classmethod
    def zero(cls, n: int) -> "PoissonBase":
        return cls(n, {})

    def __eq__(self, other):
        return isinstance(other, PoissonBase) and self.n == other.n and self.pi == other.pi

    def __hash__(self):
        return hash((self.n, frozenset(self.pi.items())))


def _check_n(B: PoissonBase, *ps):
    for p in ps:
        if p.n != B.n:
            raise VariableCountError(f"polynomial over {p.n} variables, base has {B.n}")


def base_bracket(B: PoissonBase, f: Poly, g: Poly) -> Poly:
    _check_n(B, f, g)
    if f.is_constant() or g.is_constant():
        return Poly.zero(B.n)
    df = f.gradient()
    dg = g.gradient()
    out = Poly.zero(B.n)
    for (i, j), p in B.pi.items():
        w = df[i] * dg[j] - df[j] * dg[i]
        if w:
            out = out + p * w
    return out


def differential(B: PoissonBase, f: Poly) -> OneForm:
    _check_n(B, f)
    return PolyVec(f.gradient(), B.n)


def dx(B: PoissonBase, i: int) -> OneForm:
    return PolyVec.unit(B.n, B.n, i)


def anchor_apply(B: PoissonBase, alpha: OneForm, g: Poly) -> Poly:
    """rho(alpha)(g) = sum_{i,j} alpha_i pi_ij d_j g."""
    if len(alpha) != B.n:
        raise ValueError(f"one-form has {len(alpha)} components, base has {B.n}")
    _check_n(B, g)
    dg = g.gradient()
    out = Poly.zero(B.n)
    for i, a in enumerate(alpha):
        if not a:
            continue
        s = Poly.zero(B.n)
        for j in range(B.n):
            pij = B.entry(i, j)
            if pij and dg[j]:
                s = s + pij * dg[j]
        if s:
            out = out + a * s
    return out


def koszul_bracket(B: PoissonBase, alpha: OneForm, beta: OneForm) -> OneForm:
    """Bracket of one-forms, expanded from the generator rule [[dx_i, dx_j]] = d pi_ij."""
    n = B.n
    if len(alpha) != n or len(beta) != n:
        raise ValueError("one-form length does not match the base")
    acc = [Poly.zero(n)] * n
    for i, a in enumerate(alpha):
        if not a:
            continue
        for j, b in enumerate(beta):
            if not b:
                continue
            pij = B.entry(i, j)
            if pij:
                ab = a * b
                for m, dp in enumerate(pij.gradient()):
                    if dp:
                        acc[m] = acc[m] + ab * dp
            # a_i rho(dx_i)(b_j) dx_j - b_j rho(dx_j)(a_i) dx_i
            t1 = base_bracket(B, Poly.var(n, i), b)
            if t1:
                acc[j] = acc[j] + a * t1
            t2 = base_bracket(B, Poly.var(n, j), a)
            if t2:
                acc[i] = acc[i] - b * t2
    return PolyVec(acc, n)


def base_jacobi_check(B: PoissonBase) -> Report:
    rep = Report("Jacobi")
    xs = [Poly.var(B.n, i) for i in range(B.n)]
    for i, j, k in combinations(range(B.n), 3):
        res = (
            base_bracket(B, xs[i], B.entry(j, k))
            + base_bracket(B, xs[j], B.entry(k, i))
            + base_bracket(B, xs[k], B.entry(i, j))
        )
        rep.record("Jacobi", f"(x{i + 1},x{j + 1},x{k + 1})", res)
    return rep
