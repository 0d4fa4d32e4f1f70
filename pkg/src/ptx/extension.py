"""The trivial extension algebra P0 + P1 with the bracket induced by a triple.

Elements are pairs ``f (+) eta``; derivations are stored through their
values on the generators ``x_i (+) 0`` and ``0 (+) e_a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .base import base_bracket, differential, dx
from .linalg import coefficient_rows, nullspace
from .poly import Poly, PolyVec, VariableCountError, monomials_upto, vec_sum
from .report import Report
from .triple import (
    FiberElem,
    TripleData,
    contra_deriv,
    contra_deriv_dx,
    fiber_bracket,
    k_apply,
)


@dataclass(frozen=True)
class ExtElem:
    f: Poly
    eta: FiberElem

    def __post_init__(self):
        if not isinstance(self.eta, PolyVec):
            object.__setattr__(self, "eta", PolyVec(self.eta, self.f.n))
        if self.eta.n != self.f.n:
            raise VariableCountError("scalar and fiber parts use different variable counts")

    @property
    def n(self):
        return self.f.n

    @property
    def k(self):
        return len(self.eta)

    def __add__(self, other: "ExtElem") -> "ExtElem":
        return ExtElem(self.f + other.f, self.eta + other.eta)

    def __sub__(self, other: "ExtElem") -> "ExtElem":
        return ExtElem(self.f - other.f, self.eta - other.eta)

    def __neg__(self):
        return ExtElem(-self.f, -self.eta)

    def scale(self, c) -> "ExtElem":
        return ExtElem(self.f * c, self.eta * c)

    def is_zero(self) -> bool:
        return self.f.is_zero() and self.eta.is_zero()

    def to_str(self) -> str:
        return f"{self.f.to_str()} ; {self.eta.to_str()}"

    @classmethod
    def zero(cls, n: int, k: int) -> "ExtElem":
        return cls(Poly.zero(n), PolyVec.zero(n, k))

    @classmethod
    def scalar(cls, f: Poly, k: int) -> "ExtElem":
        return cls(f, PolyVec.zero(f.n, k))

    @classmethod
    def fiber(cls, eta: FiberElem) -> "ExtElem":
        return cls(Poly.zero(eta.n), eta)


def generators(T: TripleData) -> list[tuple[str, ExtElem]]:
    """Labelled generators x_i (+) 0 and 0 (+) e_a."""
    out = [(f"x{i + 1}", ExtElem.scalar(Poly.var(T.n, i), T.k)) for i in range(T.n)]
    out += [(f"e{a + 1}", ExtElem.fiber(T.unit(a))) for a in range(T.k)]
    return out


def _check(T: TripleData, *ps: ExtElem):
    for p in ps:
        if p.n != T.n or p.k != T.k:
            raise ValueError(f"element of shape (n={p.n}, k={p.k}) does not fit (n={T.n}, k={T.k})")


def ext_product(p1: ExtElem, p2: ExtElem) -> ExtElem:
    if p1.n != p2.n or p1.k != p2.k:
        raise ValueError("element shapes differ")
    return ExtElem(p1.f * p2.f, p2.eta * p1.f + p1.eta * p2.f)


def ext_bracket(T: TripleData, p1: ExtElem, p2: ExtElem) -> ExtElem:
    """{f+eta, g+xi} = {f,g} + (D_df xi - D_dg eta + [eta,xi] + K(df,dg))."""
    _check(T, p1, p2)
    df = differential(T.base, p1.f)
    dg = differential(T.base, p2.f)
    fib = (
        contra_deriv(T, df, p2.eta)
        - contra_deriv(T, dg, p1.eta)
        + fiber_bracket(T, p1.eta, p2.eta)
        + k_apply(T, df, dg)
    )
    return ExtElem(base_bracket(T.base, p1.f, p2.f), fib)


def jacobiator(T: TripleData, p: ExtElem, q: ExtElem, r: ExtElem) -> ExtElem:
    return (
        ext_bracket(T, p, ext_bracket(T, q, r))
        + ext_bracket(T, q, ext_bracket(T, r, p))
        + ext_bracket(T, r, ext_bracket(T, p, q))
    )


def jacobiator_generators(T: TripleData) -> Report:
    rep = Report("Jacobiator")
    rep.declare("Jacobiator")
    gens = generators(T)
    for (la, a), (lb, b), (lc, c) in combinations(gens, 3):
        rep.record("Jacobiator", f"({la},{lb},{lc})", jacobiator(T, a, b, c))
    return rep


def torsion_apply(T: TripleData, p: ExtElem, i: int) -> FiberElem:
    """T_{f+eta}(x_i) = K(df, dx_i) - D_{dx_i} eta."""
    _check(T, p)
    if not 0 <= i < T.n:
        raise IndexError(f"variable index {i} out of range")
    return k_apply(T, differential(T.base, p.f), dx(T.base, i)) - contra_deriv_dx(T, i, p.eta)


# ---------------------------------------------------------------------------
# derivations


@dataclass(frozen=True)
class ExtDerivation:
    """Block data of a derivation of the commutative extension algebra.

    ``x00[i] = X00(x_i)``, ``x01[a] = X01(e_a)``, ``x10[i] = X10(x_i)`` and
    ``x11[b] = X11(e_b)`` (the columns of the X11 matrix).
    """

    x00: tuple
    x01: tuple
    x10: tuple
    x11: tuple

    def __post_init__(self):
        object.__setattr__(self, "x00", tuple(self.x00))
        object.__setattr__(self, "x01", tuple(self.x01))
        n = len(self.x00)
        k = len(self.x01)
        if len(self.x10) != n or len(self.x11) != k:
            raise ValueError("derivation blocks have inconsistent sizes")
        nv = self.x00[0].n if n else None
        x10 = tuple(v if isinstance(v, PolyVec) else PolyVec(v, nv) for v in self.x10)
        x11 = tuple(v if isinstance(v, PolyVec) else PolyVec(v, nv) for v in self.x11)
        if any(len(v) != k for v in x10 + x11):
            raise ValueError("fiber values must have length equal to the rank")
        object.__setattr__(self, "x10", x10)
        object.__setattr__(self, "x11", x11)

    @property
    def n(self):
        return len(self.x00)

    @property
    def k(self):
        return len(self.x01)

    @classmethod
    def zero(cls, n: int, k: int) -> "ExtDerivation":
        z = Poly.zero(n)
        return cls((z,) * n, (z,) * k, (PolyVec.zero(n, k),) * n, (PolyVec.zero(n, k),) * k)

    def matrix(self) -> list[list[Poly]]:
        """X11 as a k x k matrix: entry [a][b] is the e_a coefficient of X11(e_b)."""
        return [[self.x11[b][a] for b in range(self.k)] for a in range(self.k)]

    def is_zero(self) -> bool:
        return (
            all(p.is_zero() for p in self.x00 + self.x01)
            and all(v.is_zero() for v in self.x10 + self.x11)
        )

    def __sub__(self, other: "ExtDerivation") -> "ExtDerivation":
        return ExtDerivation(
            [a - b for a, b in zip(self.x00, other.x00)],
            [a - b for a, b in zip(self.x01, other.x01)],
            [a - b for a, b in zip(self.x10, other.x10)],
            [a - b for a, b in zip(self.x11, other.x11)],
        )

    def to_str(self) -> str:
        return (
            "X00: " + ", ".join(p.to_str() for p in self.x00) + "\n"
            "X01: " + ", ".join(p.to_str() for p in self.x01) + "\n"
            "X10: " + " | ".join(v.to_str() for v in self.x10) + "\n"
            "X11: " + " | ".join(v.to_str() for v in self.x11)
        )


def apply_x00(X: ExtDerivation, g: Poly) -> Poly:
    out = Poly.zero(g.n)
    for i, dg in enumerate(g.gradient()):
        if dg and X.x00[i]:
            out = out + dg * X.x00[i]
    return out


def apply_x01(X: ExtDerivation, xi: FiberElem) -> Poly:
    out = Poly.zero(xi.n)
    for a, c in enumerate(xi):
        if c and X.x01[a]:
            out = out + c * X.x01[a]
    return out


def apply_x10(X: ExtDerivation, g: Poly, k: int) -> FiberElem:
    terms = [X.x10[i] * dg for i, dg in enumerate(g.gradient()) if dg]
    return vec_sum(terms, g.n, k)


def apply_x11(X: ExtDerivation, xi: FiberElem) -> FiberElem:
    """Generalized X00-derivation: X11(sum xi_b e_b) = sum xi_b X11(e_b) + X00(xi_b) e_b."""
    terms = [X.x11[b] * c for b, c in enumerate(xi) if c]
    terms.append(PolyVec([apply_x00(X, c) for c in xi], xi.n))
    return vec_sum(terms, xi.n, len(xi))


def derivation_apply(X: ExtDerivation, q: ExtElem) -> ExtElem:
    if X.n != q.n or X.k != q.k:
        raise ValueError("derivation and element shapes differ")
    return ExtElem(
        apply_x00(X, q.f) + apply_x01(X, q.eta),
        apply_x10(X, q.f, q.k) + apply_x11(X, q.eta),
    )


def derivation_from_generators(n: int, k: int, values: list[ExtElem]) -> ExtDerivation:
    """Block data from the images of x_1..x_n, e_1..e_k (in that order)."""
    xs, es = values[:n], values[n:]
    return ExtDerivation(
        [v.f for v in xs], [v.f for v in es], [v.eta for v in xs], [v.eta for v in es]
    )


def _gen_elems(n: int, k: int) -> list[ExtElem]:
    out = [ExtElem.scalar(Poly.var(n, i), k) for i in range(n)]
    out += [ExtElem.fiber(PolyVec.unit(n, k, a)) for a in range(k)]
    return out


def derivation_commutator(d1: ExtDerivation, d2: ExtDerivation) -> ExtDerivation:
    if d1.n != d2.n or d1.k != d2.k:
        raise ValueError("derivation shapes differ")
    vals = []
    for q in _gen_elems(d1.n, d1.k):
        vals.append(derivation_apply(d1, derivation_apply(d2, q)) - derivation_apply(d2, derivation_apply(d1, q)))
    return derivation_from_generators(d1.n, d1.k, vals)


def hamiltonian_derivation(T: TripleData, p: ExtElem) -> ExtDerivation:
    """Block form of {p, .}: (ad_h, 0; torsion of p, D_dh + ad_eta)."""
    _check(T, p)
    n, k = T.n, T.k
    h, eta = p.f, p.eta
    dh = differential(T.base, h)
    x00 = [base_bracket(T.base, h, Poly.var(n, i)) for i in range(n)]
    x10 = [torsion_apply(T, p, i) for i in range(n)]
    x11 = [contra_deriv(T, dh, T.unit(b)) + fiber_bracket(T, eta, T.unit(b)) for b in range(k)]
    return ExtDerivation(x00, [Poly.zero(n)] * k, x10, x11)


# ---------------------------------------------------------------------------
# Casimirs


def casimir_check(T: TripleData, p: ExtElem) -> Report:
    """Structural Casimir conditions, cross-checked against brackets with every generator."""
    _check(T, p)
    rep = Report("Casimir")
    dk = differential(T.base, p.f)
    for i in range(T.n):
        rep.record("base-casimir", f"x{i + 1}", base_bracket(T.base, p.f, Poly.var(T.n, i)))
    for i in range(T.n):
        rep.record("torsion", f"x{i + 1}", torsion_apply(T, p, i))
    for b in range(T.k):
        eb = T.unit(b)
        rep.record("D_dk+ad", f"e{b + 1}", contra_deriv(T, dk, eb) + fiber_bracket(T, p.eta, eb))
    structural = rep.ok
    direct = Report()
    for label, q in generators(T):
        direct.record("direct", label, ext_bracket(T, p, q))
    if structural != direct.ok:
        raise RuntimeError("structural and direct Casimir verdicts disagree")
    rep.notes.append(f"direct kernel check: {'pass' if direct.ok else 'fail'}")
    return rep


def _ext_basis(n: int, k: int, max_degree: int) -> list[ExtElem]:
    exps = monomials_upto(n, max_degree)
    out = [ExtElem.scalar(Poly.monomial(e), k) for e in exps]
    for a in range(k):
        for e in exps:
            out.append(ExtElem.fiber(PolyVec.unit(n, k, a) * Poly.monomial(e)))
    return out


def _combine(units: list[ExtElem], coeffs, n: int, k: int) -> ExtElem:
    f = Poly.zero(n)
    terms = []
    for u, c in zip(units, coeffs):
        if c:
            f = f + u.f * c
            terms.append(u.eta * c)
    return ExtElem(f, vec_sum(terms, n, k))


def casimir_solve(T: TripleData, max_degree: int) -> list[ExtElem]:
    """Q-basis of Casimirs whose components have total degree <= max_degree."""
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    units = _ext_basis(T.n, T.k, max_degree)
    gens = [q for _, q in generators(T)]
    images = [[(r.f, r.eta) for r in (ext_bracket(T, u, q) for q in gens)] for u in units]
    rows, _ = coefficient_rows(images)
    return [_combine(units, v, T.n, T.k) for v in nullspace(rows, len(units))]


# ---------------------------------------------------------------------------
# Poisson derivations

PD_LABELS_GENERAL = (
    "X00-bracket",
    "X11-bracket",
    "X01-bracket",
    "X01-D",
    "X10-bracket",
    "X11-D",
)
# names used when X01 = 0 (the block operator preserves P1)
PD_LABELS_PRESERVING = {
    "X00-bracket": "X00-poisson",
    "X11-bracket": "X11-derives-bracket",
    "X10-bracket": "X10-K-compat",
    "X11-D": "X11-D-compat",
}


def commutative_derivation_check(T: TripleData, X: ExtDerivation) -> Report:
    """Block constraint for a derivation of the commutative extension: X01(e_a) e_b + X01(e_b) e_a = 0."""
    rep = Report("commutative derivation")
    if X.n != T.n or X.k != T.k:
        rep.fail_precondition("shape", None, "derivation shape does not match the triple")
        return rep
    for a in range(T.k):
        for b in range(a, T.k):
            res = T.unit(b) * X.x01[a] + T.unit(a) * X.x01[b]
            rep.record("X01-symmetric", f"(e{a + 1},e{b + 1})", res)
    return rep


def _ad0(T, f, g):
    return base_bracket(T.base, f, g)


def poisson_derivation_check(T: TripleData, X: ExtDerivation) -> Report:
    """All six block conditions on generators plus the direct Leibniz defect on generator pairs."""
    rep = Report("Poisson derivation")
    pre = commutative_derivation_check(T, X)
    if not pre.ok:
        for f in pre.precondition + pre.failures:
            rep.fail_precondition(f.where, f.residual, "not a derivation of the commutative algebra")
        return rep
    n, k = T.n, T.k
    B = T.base
    preserving = all(p.is_zero() for p in X.x01)
    label = (lambda s: PD_LABELS_PRESERVING.get(s, s)) if preserving else (lambda s: s)
    for s in PD_LABELS_GENERAL:
        if not (preserving and s in ("X01-bracket", "X01-D")):
            rep.declare(label(s))
    xs = [Poly.var(n, i) for i in range(n)]
    es = [T.unit(a) for a in range(k)]

    def X00(g):
        return apply_x00(X, g)

    def X10(g):
        return apply_x10(X, g, k)

    def D(f, eta):
        return contra_deriv(T, differential(B, f), eta)

    def K(f, g):
        return k_apply(T, differential(B, f), differential(B, g))

    def torsion(h, zeta, g):
        # T_{h+zeta}(g) = K(dh, dg) - D_dg zeta
        return K(h, g) - D(g, zeta)

    for i, j in combinations(range(n), 2):
        f, g = xs[i], xs[j]
        fg = B.entry(i, j)
        Kfg = K(f, g)
        where = f"(x{i + 1},x{j + 1})"
        r1 = X00(fg) + apply_x01(X, Kfg) - _ad0(T, X00(f), g) - _ad0(T, f, X00(g))
        rep.record(label("X00-bracket"), where, r1)
        r5 = (
            X10(fg)
            + apply_x11(X, Kfg)
            - torsion(X00(f), X10(f), g)
            + torsion(X00(g), X10(g), f)
        )
        rep.record(label("X10-bracket"), where, r5)
    for a, b in combinations(range(k), 2):
        eta, xi = es[a], es[b]
        br = fiber_bracket(T, eta, xi)
        where = f"(e{a + 1},e{b + 1})"
        Xe, Xx = X.x11[a], X.x11[b]
        r2 = (
            apply_x11(X, br)
            - fiber_bracket(T, Xe, xi)
            - fiber_bracket(T, eta, Xx)
            - D(X.x01[a], xi)
            + D(X.x01[b], eta)
        )
        rep.record(label("X11-bracket"), where, r2)
        if not preserving:
            rep.record("X01-bracket", where, apply_x01(X, br))
    for i in range(n):
        f = xs[i]
        for a in range(k):
            eta = es[a]
            where = f"(x{i + 1},e{a + 1})"
            Df = D(f, eta)
            if not preserving:
                rep.record("X01-D", where, apply_x01(X, Df) - _ad0(T, f, X.x01[a]))
            r6 = (
                apply_x11(X, Df)
                - D(X00(f), eta)
                - fiber_bracket(T, X10(f), eta)
                + torsion(X.x01[a], X.x11[a], f)
            )
            rep.record(label("X11-D"), where, r6)

    # independent path: Leibniz defect of X against the extension bracket
    direct = Report()
    gens = generators(T)
    for (la, p), (lb, q) in combinations(gens, 2):
        res = (
            derivation_apply(X, ext_bracket(T, p, q))
            - ext_bracket(T, derivation_apply(X, p), q)
            - ext_bracket(T, p, derivation_apply(X, q))
        )
        direct.record("direct", f"({la},{lb})", (res.f, res.eta))
    if direct.ok != rep.ok:
        raise RuntimeError("block conditions and direct Leibniz check disagree")
    rep.notes.append(f"direct Leibniz check on generator pairs: {'pass' if direct.ok else 'fail'}")
    return rep
