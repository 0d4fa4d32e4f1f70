"""Gauge transformations with identity base map, deformations of the K-tensor,
bounded-degree exactness solving and the Poisson-module form of a triple.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .base import dx
from .cochains import (
    DerivTensor,
    FormTensor,
    d_contra,
    form_differential,
    graded_basis,
    is_center_valued,
    weight_shift,
)
from .extension import ExtElem
from .linalg import coefficient_rows, coefficient_vector, solve
from .poly import Poly, PolyVec, vec_sum
from .report import Report
from .triple import (
    FiberElem,
    TripleData,
    contra_deriv,
    contra_deriv_dx,
    curvature_apply,
    fiber_bracket,
    triple_check,
)
from .base import base_bracket


class GaugeError(ValueError):
    pass


def _identity(n: int, k: int):
    return [[Poly.one(n) if a == b else Poly.zero(n) for b in range(k)] for a in range(k)]


def mat_mul(A, B, n: int):
    k = len(A)
    out = []
    for a in range(k):
        row = []
        for b in range(k):
            s = Poly.zero(n)
            for c in range(k):
                if A[a][c] and B[c][b]:
                    s = s + A[a][c] * B[c][b]
            row.append(s)
        out.append(row)
    return out


def mat_apply(A, eta: FiberElem) -> FiberElem:
    """(A eta)_a = sum_b A[a][b] eta_b."""
    k = len(eta)
    return PolyVec(
        [sum((A[a][b] * eta[b] for b in range(k) if A[a][b] and eta[b]), Poly.zero(eta.n)) for a in range(k)],
        eta.n,
    )


@dataclass(frozen=True, eq=False)
class GaugeData:
    """``mu[i]`` is phi10(x_i); ``phi11[a][b]`` is the e_a coefficient of phi11(e_b)."""

    n: int
    k: int
    mu: tuple
    phi11: tuple = None
    phi11_inv: tuple = None

    def __post_init__(self):
        n, k = self.n, self.k
        mu = tuple(v if isinstance(v, PolyVec) else PolyVec(v, n) for v in self.mu)
        if len(mu) != n or any(len(v) != k for v in mu):
            raise GaugeError("mu must hold n fiber elements of length k")
        phi = self.phi11 if self.phi11 is not None else _identity(n, k)
        inv = self.phi11_inv if self.phi11_inv is not None else _identity(n, k)
        phi = tuple(tuple(r) for r in phi)
        inv = tuple(tuple(r) for r in inv)
        for M in (phi, inv):
            if len(M) != k or any(len(r) != k for r in M):
                raise GaugeError("phi11 and its inverse must be k x k")
        ident = _identity(n, k)
        if mat_mul(phi, inv, n) != ident or mat_mul(inv, phi, n) != ident:
            raise GaugeError("phi11_inv is not an inverse of phi11")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "phi11", phi)
        object.__setattr__(self, "phi11_inv", inv)

    def phi10(self, f: Poly) -> FiberElem:
        terms = [self.mu[i] * d for i, d in enumerate(f.gradient()) if d]
        return vec_sum(terms, self.n, self.k)

    def apply11(self, eta: FiberElem) -> FiberElem:
        return mat_apply(self.phi11, eta)

    def apply11_inv(self, eta: FiberElem) -> FiberElem:
        return mat_apply(self.phi11_inv, eta)

    @classmethod
    def identity(cls, n: int, k: int) -> "GaugeData":
        return cls(n, k, [PolyVec.zero(n, k)] * n)


def mu_gauge(mu) -> GaugeData:
    mu = list(mu)
    if not mu:
        raise GaugeError("mu must be nonempty; use GaugeData directly for n = 0")
    return GaugeData(mu[0].n, len(mu[0]), mu)


def inverse_gauge(G: GaugeData) -> GaugeData:
    """phi^-1(f + eta) = f + phi11^-1 (eta - phi10 f)."""
    mu = [-G.apply11_inv(v) for v in G.mu]
    return GaugeData(G.n, G.k, mu, G.phi11_inv, G.phi11)


def compose_gauges(G1: GaugeData, G2: GaugeData) -> GaugeData:
    """phi1 o phi2."""
    mu = [a + G1.apply11(b) for a, b in zip(G1.mu, G2.mu)]
    return GaugeData(G1.n, G1.k, mu, mat_mul(G1.phi11, G2.phi11, G1.n), mat_mul(G2.phi11_inv, G1.phi11_inv, G1.n))


def gauge_apply_elem(G: GaugeData, p: ExtElem) -> ExtElem:
    if p.n != G.n or p.k != G.k:
        raise ValueError("element shape does not match the gauge")
    return ExtElem(p.f, G.phi10(p.f) + G.apply11(p.eta))


def gauge_transport_triple(G: GaugeData, T: TripleData, validate: bool = True) -> TripleData:
    """Triple of the bracket {p, q}' = phi^-1 {phi p, phi q}."""
    if (G.n, G.k) != (T.n, T.k):
        raise ValueError("gauge shape does not match the triple")
    if validate:
        rep = triple_check(T)
        if not rep.ok:
            raise GaugeError("input triple fails its compatibility checks")
    n, k = T.n, T.k
    B = T.base
    img = [G.apply11(T.unit(b)) for b in range(k)]
    brk = [[G.apply11_inv(fiber_bracket(T, img[b], img[g])) for g in range(k)] for b in range(k)]
    gam = [
        [G.apply11_inv(contra_deriv_dx(T, i, img[b]) + fiber_bracket(T, G.mu[i], img[b])) for b in range(k)]
        for i in range(n)
    ]
    kt = [[PolyVec.zero(n, k)] * n for _ in range(n)]
    for i, j in combinations(range(n), 2):
        v = (
            T.k_basis(i, j)
            + contra_deriv_dx(T, i, G.mu[j])
            - contra_deriv_dx(T, j, G.mu[i])
            + fiber_bracket(T, G.mu[i], G.mu[j])
            - G.phi10(B.entry(i, j))
        )
        v = G.apply11_inv(v)
        kt[i][j] = v
        kt[j][i] = -v
    return TripleData.from_tables(B, k, brk, gam, kt)


def random_unimodular(n: int, k: int, rng: random.Random, steps: int = 3, max_degree: int = 1):
    """phi11 and its inverse as products of elementary matrices I + p E_ab."""
    from .poly import monomials_upto

    exps = monomials_upto(n, max_degree)
    phi = _identity(n, k)
    inv = _identity(n, k)
    if k < 2:
        return phi, inv
    for _ in range(steps):
        a, b = rng.sample(range(k), 2)
        p = Poly(n, {e: rng.randint(-2, 2) for e in rng.sample(exps, min(2, len(exps)))})
        E = _identity(n, k)
        E[a][b] = p
        Einv = _identity(n, k)
        Einv[a][b] = -p
        phi = mat_mul(phi, E, n)
        inv = mat_mul(Einv, inv, n)
    return phi, inv


# ---------------------------------------------------------------------------
# deformations


def deform_triple(T: TripleData, C: FormTensor, t) -> TripleData:
    """(bracket, D, K + t C) for a closed, center-valued rank-2 form C."""
    if C.rank != 2 or (C.n, C.k) != (T.n, T.k):
        raise ValueError("C must be a rank-2 form matching the triple")
    if not is_center_valued(T, C):
        raise ValueError("C is not center-valued")
    if not form_differential(T, C).is_zero():
        raise ValueError("C is not closed")
    kk = dict(T.kk)
    for (i, j), v in C.entries.items():
        for a, p in enumerate(v):
            kk[(a, i, j)] = kk.get((a, i, j), Poly.zero(T.n)) + p * t
    return T.replace(kk=kk)


def is_flat(T: TripleData) -> bool:
    B = T.base
    return all(
        curvature_apply(T, dx(B, i), dx(B, j), T.unit(b)).is_zero()
        for i, j in combinations(range(T.n), 2)
        for b in range(T.k)
    )


@dataclass
class ExactnessResult:
    q: DerivTensor | None
    max_degree: int
    certified: bool
    flat_verified: bool
    notes: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.q is not None

    def summary(self) -> str:
        if self.q is not None:
            head = f"primitive found: {self.q.to_str()}"
        elif self.certified:
            head = f"none up to degree {self.max_degree} (certified by the grading: no primitive of any degree)"
        else:
            head = f"none up to degree {self.max_degree} (inconclusive)"
        lines = [head]
        if not self.flat_verified:
            lines.append("warning: the connection is not flat; the equivalence statement assumes flatness")
        return "\n".join(lines + self.notes)


def exactness_solve(T: TripleData, Kdiff: DerivTensor, max_degree: int) -> ExactnessResult:
    """Look for a center-valued rank-1 Q with entries of degree <= max_degree and d Q = Kdiff."""
    if Kdiff.rank != 2 or (Kdiff.n, Kdiff.k) != (T.n, T.k):
        raise ValueError("Kdiff must be a rank-2 tensor matching the triple")
    s = weight_shift(T, center_valued=True)
    if not is_center_valued(T, Kdiff):
        raise ValueError("Kdiff is not center-valued")
    if not d_contra(T, Kdiff).is_zero():
        raise ValueError("Kdiff is not closed")
    flat = is_flat(T)
    top = max((p.degree() for v in Kdiff.entries.values() for p in v), default=-1)
    certified = top - s <= max_degree
    basis = []
    for d in range(max_degree + 1):
        basis.extend(graded_basis(T, 1, d, True))
    coords = lambda Q: [Q.value(I) for I in combinations(range(T.n), Q.rank)]
    if Kdiff.is_zero():
        return ExactnessResult(DerivTensor.zero(T.n, T.k, 1), max_degree, True, flat)
    images = [coords(d_contra(T, Q)) for Q in basis]
    rows, keys = coefficient_rows(images)
    rhs = coefficient_vector(coords(Kdiff), keys)
    sol = None
    if rhs is not None and basis:
        sol = solve(rows, rhs, len(basis))
    if sol is None:
        return ExactnessResult(None, max_degree, certified, flat)
    Q = DerivTensor.zero(T.n, T.k, 1)
    for b, c in zip(basis, sol):
        if c:
            Q = Q + b.scale(c)
    return ExactnessResult(Q, max_degree, True, flat)


def equivalence_gauge(T1: TripleData, T2: TripleData, max_degree: int):
    """A mu-gauge G with transport(G, T1) == T2 when the triples differ only in K
    by an exact center-valued term; returns (G or None, ExactnessResult)."""
    if T1.base != T2.base or T1.k != T2.k or T1.c != T2.c or T1.gamma != T2.gamma:
        raise ValueError("triples must share the base, bracket and connection")
    from .cochains import k_form, delta_map

    Kdiff = delta_map(k_form(T2)) - delta_map(k_form(T1))
    res = exactness_solve(T1, Kdiff, max_degree)
    if res.q is None:
        return None, res
    mu = [res.q.value((i,)) for i in range(T1.n)]
    return GaugeData(T1.n, T1.k, mu), res


# ---------------------------------------------------------------------------
# Poisson modules


@dataclass
class ModuleForm:
    report: Report
    obstructions: list
    lam: list | None  # lam[i][a] = lambda(x_i, e_a)

    @property
    def is_module(self) -> bool:
        return not self.obstructions and self.report.ok


def lambda_apply(T: TripleData, lam, f: Poly, eta: FiberElem) -> FiberElem:
    """lambda(f, eta) extended from the generator table by the module axioms."""
    n, k = T.n, T.k
    terms = []
    for i, df in enumerate(f.gradient()):
        if not df:
            continue
        inner = [lam[i][a] * c for a, c in enumerate(eta) if c]
        inner.append(PolyVec([base_bracket(T.base, Poly.var(n, i), c) for c in eta], n))
        terms.append(vec_sum(inner, n, k) * df)
    return vec_sum(terms, n, k)


def poisson_module_roundtrip(T: TripleData) -> ModuleForm:
    rep = Report("Poisson module")
    obstructions = []
    if T.c:
        obstructions.append("nonzero fiber bracket")
    if T.kk:
        obstructions.append("nonzero K-tensor")
    if obstructions:
        return ModuleForm(rep, obstructions, None)
    n, k = T.n, T.k
    B = T.base
    lam = [[contra_deriv(T, dx(B, i), T.unit(a)) for a in range(k)] for i in range(n)]
    xs = [Poly.var(n, i) for i in range(n)]
    for c in ("lambda-derivation-in-module", "lambda-multiplicative", "lambda-flat"):
        rep.declare(c)
    for i in range(n):
        for j in range(n):
            for a in range(k):
                ea = T.unit(a)
                where = f"(x{i + 1},x{j + 1},e{a + 1})"
                r1 = (
                    lambda_apply(T, lam, xs[i], ea * xs[j])
                    - lambda_apply(T, lam, xs[i], ea) * xs[j]
                    - ea * base_bracket(B, xs[i], xs[j])
                )
                rep.record("lambda-derivation-in-module", where, r1)
                r2 = (
                    lambda_apply(T, lam, xs[i] * xs[j], ea)
                    - lambda_apply(T, lam, xs[j], ea) * xs[i]
                    - lambda_apply(T, lam, xs[i], ea) * xs[j]
                )
                rep.record("lambda-multiplicative", where, r2)
                if i < j:
                    r3 = (
                        lambda_apply(T, lam, B.entry(i, j), ea)
                        - lambda_apply(T, lam, xs[i], lambda_apply(T, lam, xs[j], ea))
                        + lambda_apply(T, lam, xs[j], lambda_apply(T, lam, xs[i], ea))
                    )
                    rep.record("lambda-flat", where, r3)
    if rep.passed("lambda-flat") != is_flat(T):
        raise RuntimeError("module flatness axiom disagrees with the curvature of D")
    return ModuleForm(rep, obstructions, lam)
