"""Structure data on the free module P1 = P0^k: fiber bracket, contravariant
derivative and K-tensor, with the compatibility checks between them.

Index conventions (0-based):

* ``c[(a, b, g)]``      coefficient of ``e_a`` in ``[e_b, e_g]``, stored for ``b < g``
* ``gamma[(a, i, b)]``  coefficient of ``e_a`` in ``D_{dx_i} e_b``
* ``kk[(a, i, j)]``     coefficient of ``e_a`` in ``K(dx_i, dx_j)``, stored for ``i < j``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .base import OneForm, PoissonBase, base_bracket, dx, koszul_bracket
from .linalg import coefficient_rows, nullspace
from .poly import Poly, PolyVec, VariableCountError, monomials, monomials_upto, vec_sum
from .report import Report

FiberElem = PolyVec


def _normalize_skew(name, entries, n_outer, n_inner, nvars):
    out = {}
    for key, p in entries.items():
        a, s, t = key
        if not (0 <= a < n_outer and 0 <= s < n_inner and 0 <= t < n_inner):
            raise IndexError(f"{name} index {key} out of range")
        if p.n != nvars:
            raise VariableCountError(f"{name}{key} has {p.n} variables, expected {nvars}")
        if s == t:
            if p:
                raise ValueError(f"{name}{key}: diagonal entry of a skew tensor must vanish")
            continue
        if s > t:
            s, t, p = t, s, -p
        k = (a, s, t)
        if k in out and out[k] != p:
            raise ValueError(f"{name}: conflicting values for skew pair {key}")
        out[k] = p
    return {k: p for k, p in out.items() if p}


@dataclass(frozen=True, eq=False)
class TripleData:
    base: PoissonBase
    k: int
    c: dict = field(default_factory=dict)
    gamma: dict = field(default_factory=dict)
    kk: dict = field(default_factory=dict)

    def __post_init__(self):
        n, k = self.base.n, self.k
        if k < 0:
            raise ValueError("fiber rank must be nonnegative")
        c = _normalize_skew("c", self.c, k, k, n)
        kk = _normalize_skew("kk", self.kk, k, n, n)
        gamma = {}
        for key, p in self.gamma.items():
            a, i, b = key
            if not (0 <= a < k and 0 <= i < n and 0 <= b < k):
                raise IndexError(f"gamma index {key} out of range")
            if p.n != n:
                raise VariableCountError(f"gamma{key} has {p.n} variables, expected {n}")
            if p:
                gamma[key] = p
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "kk", kk)

        zero = PolyVec.zero(n, k)

        def table(rows, cols, entries, skew):
            acc = [[[Poly.zero(n)] * k for _ in range(cols)] for _ in range(rows)]
            for (a, s, t), p in entries.items():
                acc[s][t][a] = p
                if skew:
                    acc[t][s][a] = -p
            return tuple(tuple(PolyVec(v, n) if k else zero for v in r) for r in acc)

        object.__setattr__(self, "_brk", table(k, k, c, True))
        object.__setattr__(self, "_gam", table(n, k, gamma, False))
        object.__setattr__(self, "_kt", table(n, n, kk, True))

    # dense views
    @property
    def n(self) -> int:
        return self.base.n

    def bracket_basis(self, b: int, g: int) -> FiberElem:
        return self._brk[b][g]

    def gamma_basis(self, i: int, b: int) -> FiberElem:
        """Non-derivative part of D_{dx_i} e_b (equal to it, since e_b has constant coordinates)."""
        return self._gam[i][b]

    def k_basis(self, i: int, j: int) -> FiberElem:
        return self._kt[i][j]

    def zero_elem(self) -> FiberElem:
        return PolyVec.zero(self.n, self.k)

    def unit(self, a: int) -> FiberElem:
        return PolyVec.unit(self.n, self.k, a)

    @classmethod
    def from_tables(cls, base: PoissonBase, k: int, brk=None, gam=None, kt=None) -> "TripleData":
        """Build from dense tables ``brk[b][g]``, ``gam[i][b]``, ``kt[i][j]`` of FiberElems."""
        n = base.n
        c, gamma, kk = {}, {}, {}
        if brk is not None:
            for b in range(k):
                for g in range(k):
                    if brk[b][g] != -brk[g][b]:
                        raise ValueError(f"bracket table not skew at ({b},{g})")
                    if b < g:
                        for a, p in enumerate(brk[b][g]):
                            c[(a, b, g)] = p
        if gam is not None:
            for i in range(n):
                for b in range(k):
                    for a, p in enumerate(gam[i][b]):
                        gamma[(a, i, b)] = p
        if kt is not None:
            for i in range(n):
                for j in range(n):
                    if kt[i][j] != -kt[j][i]:
                        raise ValueError(f"K table not skew at ({i},{j})")
                    if i < j:
                        for a, p in enumerate(kt[i][j]):
                            kk[(a, i, j)] = p
        return cls(base, k, c, gamma, kk)

    @classmethod
    def zero(cls, base: PoissonBase, k: int) -> "TripleData":
        return cls(base, k)

    def replace(self, **kw) -> "TripleData":
        args = dict(base=self.base, k=self.k, c=self.c, gamma=self.gamma, kk=self.kk)
        args.update(kw)
        return TripleData(**args)

    def __eq__(self, other):
        if not isinstance(other, TripleData):
            return NotImplemented
        return (
            self.base == other.base
            and self.k == other.k
            and self.c == other.c
            and self.gamma == other.gamma
            and self.kk == other.kk
        )

    def __hash__(self):
        return hash((self.base, self.k, frozenset(self.c.items()), frozenset(self.gamma.items()),
                     frozenset(self.kk.items())))

    def all_polys(self):
        yield from self.base.pi.values()
        yield from self.c.values()
        yield from self.gamma.values()
        yield from self.kk.values()


def _check_elem(T: TripleData, eta):
    if len(eta) != T.k:
        raise ValueError(f"fiber element of length {len(eta)}, rank is {T.k}")
    if T.k and eta.n != T.n:
        raise VariableCountError(f"fiber element over {eta.n} variables, base has {T.n}")


def _check_form(T: TripleData, alpha):
    if len(alpha) != T.n:
        raise ValueError(f"one-form of length {len(alpha)}, base has {T.n} variables")


def fiber_bracket(T: TripleData, eta: FiberElem, xi: FiberElem) -> FiberElem:
    _check_elem(T, eta)
    _check_elem(T, xi)
    terms = []
    for b, eb in enumerate(eta):
        if not eb:
            continue
        for g, xg in enumerate(xi):
            if g == b or not xg:
                continue
            v = T.bracket_basis(b, g)
            if not v.is_zero():
                terms.append(v * (eb * xg))
    return vec_sum(terms, T.n, T.k)


def ad(T: TripleData, eta: FiberElem):
    return lambda xi: fiber_bracket(T, eta, xi)


def contra_deriv_dx(T: TripleData, i: int, eta: FiberElem) -> FiberElem:
    """D_{dx_i} eta = sum_b eta_b D_{dx_i} e_b + {x_i, eta_b} e_b."""
    xi_ = Poly.var(T.n, i)
    terms = []
    for b, eb in enumerate(eta):
        if not eb:
            continue
        g = T.gamma_basis(i, b)
        if not g.is_zero():
            terms.append(g * eb)
    terms.append(PolyVec([base_bracket(T.base, xi_, eb) for eb in eta], T.n))
    return vec_sum(terms, T.n, T.k)


def contra_deriv(T: TripleData, alpha: OneForm, eta: FiberElem) -> FiberElem:
    _check_form(T, alpha)
    _check_elem(T, eta)
    terms = []
    for i, a in enumerate(alpha):
        if a:
            terms.append(contra_deriv_dx(T, i, eta) * a)
    return vec_sum(terms, T.n, T.k)


def k_apply(T: TripleData, alpha: OneForm, beta: OneForm) -> FiberElem:
    _check_form(T, alpha)
    _check_form(T, beta)
    terms = []
    for i, a in enumerate(alpha):
        if not a:
            continue
        for j, b in enumerate(beta):
            if i == j or not b:
                continue
            v = T.k_basis(i, j)
            if not v.is_zero():
                terms.append(v * (a * b))
    return vec_sum(terms, T.n, T.k)


def curvature_apply(T: TripleData, alpha: OneForm, beta: OneForm, eta: FiberElem) -> FiberElem:
    """([D_alpha, D_beta] - D_[[alpha, beta]]) eta."""
    ab = contra_deriv(T, alpha, contra_deriv(T, beta, eta))
    ba = contra_deriv(T, beta, contra_deriv(T, alpha, eta))
    return ab - ba - contra_deriv(T, koszul_bracket(T.base, alpha, beta), eta)


def _pairs(n):
    return combinations(range(n), 2)


def fiber_jacobi_block(T: TripleData, rep: Report, label: str = "LieP1"):
    rep.declare(label)
    e = [T.unit(a) for a in range(T.k)]
    for a, b, g in combinations(range(T.k), 3):
        res = (
            fiber_bracket(T, e[a], T.bracket_basis(b, g))
            + fiber_bracket(T, e[b], T.bracket_basis(g, a))
            + fiber_bracket(T, e[g], T.bracket_basis(a, b))
        )
        rep.record(label, f"(e{a + 1},e{b + 1},e{g + 1})", res)


def pt1_block(T: TripleData, rep: Report, label: str = "EcPT1"):
    rep.declare(label)
    e = [T.unit(a) for a in range(T.k)]
    for i in range(T.n):
        De = [T.gamma_basis(i, a) for a in range(T.k)]
        for a, b in _pairs(T.k):
            res = (
                contra_deriv_dx(T, i, T.bracket_basis(a, b))
                - fiber_bracket(T, e[a], De[b])
                - fiber_bracket(T, De[a], e[b])
            )
            rep.record(label, f"(dx{i + 1},e{a + 1},e{b + 1})", res)


def pt2_block(T: TripleData, rep: Report, label: str = "EcPT2"):
    rep.declare(label)
    for i, j in _pairs(T.n):
        Kij = T.k_basis(i, j)
        for b in range(T.k):
            eb = T.unit(b)
            res = curvature_apply(T, dx(T.base, i), dx(T.base, j), eb) - fiber_bracket(T, Kij, eb)
            rep.record(label, f"(dx{i + 1},dx{j + 1},e{b + 1})", res)


def pt3_block(T: TripleData, rep: Report, label: str = "EcPT3"):
    rep.declare(label)
    B = T.base
    for i, j, l in combinations(range(T.n), 3):
        res = T.zero_elem()
        for a, b, c in ((i, j, l), (j, l, i), (l, i, j)):
            res = res + contra_deriv_dx(T, a, T.k_basis(b, c))
            res = res + k_apply(T, dx(B, a), koszul_bracket(B, dx(B, b), dx(B, c)))
        rep.record(label, f"(dx{i + 1},dx{j + 1},dx{l + 1})", res)


def triple_check(T: TripleData) -> Report:
    """EcPT1-EcPT3 on basis inputs, plus the Jacobi identity of the fiber bracket (LieP1)."""
    rep = Report("triple")
    pt1_block(T, rep)
    pt2_block(T, rep)
    pt3_block(T, rep)
    fiber_jacobi_block(T, rep)
    return rep


def _center_from_monomials(T: TripleData, exps) -> list[FiberElem]:
    n, k = T.n, T.k
    unknowns = []
    for a in range(k):
        for e in exps:
            unknowns.append(PolyVec.unit(n, k, a) * Poly.monomial(e))
    images = [[fiber_bracket(T, u, T.unit(g)) for g in range(k)] for u in unknowns]
    rows, _ = coefficient_rows(images)
    out = []
    for v in nullspace(rows, len(unknowns)):
        terms = [u * c for u, c in zip(unknowns, v) if c]
        out.append(vec_sum(terms, n, k))
    return out


def center_basis(T: TripleData, max_degree: int) -> list[FiberElem]:
    """Q-basis of center elements whose coordinates have degree <= max_degree."""
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    return _center_from_monomials(T, monomials_upto(T.n, max_degree))


def center_slice(T: TripleData, degree: int) -> list[FiberElem]:
    """Q-basis of center elements with homogeneous coordinates of the given degree."""
    if degree < 0:
        return []
    return _center_from_monomials(T, monomials(T.n, degree))


def is_central(T: TripleData, xi: FiberElem) -> bool:
    return all(fiber_bracket(T, xi, T.unit(g)).is_zero() for g in range(T.k))


def matrix_triple(base: PoissonBase, m: int) -> TripleData:
    """m x m matrices over the base: commutator bracket, entrywise D_{df} M = {f, M}, K = 0.

    Basis order is E_11, E_12, ..., E_mm (row-major).
    """
    n = base.n
    idx = {(r, s): r * m + s for r in range(m) for s in range(m)}
    one = Poly.one(n)
    c = {}
    for (i, j), b in idx.items():
        for (k, l), g in idx.items():
            if b >= g:
                continue
            acc = {}
            if j == k:
                acc[idx[(i, l)]] = acc.get(idx[(i, l)], 0) + 1
            if l == i:
                acc[idx[(k, j)]] = acc.get(idx[(k, j)], 0) - 1
            for a, v in acc.items():
                if v:
                    c[(a, b, g)] = one * v
    return TripleData(base, m * m, c)
