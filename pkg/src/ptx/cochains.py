"""Skew multiderivations and multilinear forms valued in P1, their contravariant
differentials, graded cohomology dimensions and related condition checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations

from .base import dx, koszul_bracket
from .extension import ExtElem, torsion_apply
from .linalg import coefficient_rows, coefficient_vector, nullspace, rank, solve
from .poly import Poly, PolyVec, monomials, monomials_upto, vec_sum
from .report import Report
from .triple import (
    FiberElem,
    TripleData,
    center_slice,
    contra_deriv,
    contra_deriv_dx,
    curvature_apply,
    fiber_bracket,
    is_central,
    k_apply,
)


class NotGradedError(ValueError):
    """The structure polynomials do not define a weight grading."""


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _sort_sign(idx) -> tuple[int, tuple]:
    """Sign of the permutation sorting ``idx``; 0 if an index repeats."""
    if len(set(idx)) != len(idx):
        return 0, ()
    order = sorted(range(len(idx)), key=lambda s: idx[s])
    return _perm_sign(order), tuple(idx[s] for s in order)


@dataclass(frozen=True, eq=False)
class _SkewTensor:
    n: int
    k: int
    rank: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, v in self.entries.items():
            idx = tuple(idx)
            if len(idx) != self.rank or any(not 0 <= i < self.n for i in idx):
                raise IndexError(f"tensor index {idx} invalid for rank {self.rank}, n={self.n}")
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"tensor indices must be strictly increasing, got {idx}")
            if not isinstance(v, PolyVec):
                v = PolyVec(v, self.n)
            if len(v) != self.k:
                raise ValueError(f"entry {idx} has length {len(v)}, rank of fiber is {self.k}")
            if not v.is_zero():
                clean[idx] = v
        object.__setattr__(self, "entries", clean)

    def value(self, idx) -> FiberElem:
        """Entry at any index tuple, with the skew extension."""
        sign, key = _sort_sign(tuple(idx))
        if sign == 0:
            return PolyVec.zero(self.n, self.k)
        v = self.entries.get(key)
        if v is None:
            return PolyVec.zero(self.n, self.k)
        return v if sign > 0 else -v

    def index_set(self):
        return list(combinations(range(self.n), self.rank))

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and (self.n, self.k, self.rank) == (other.n, other.k, other.rank)
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((type(self).__name__, self.n, self.k, self.rank, frozenset(self.entries.items())))

    def _combine(self, other, op):
        if (self.n, self.k, self.rank) != (other.n, other.k, other.rank):
            raise ValueError("tensor shapes differ")
        keys = set(self.entries) | set(other.entries)
        return type(self)(self.n, self.k, self.rank, {i: op(self.value(i), other.value(i)) for i in keys})

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return type(self)(self.n, self.k, self.rank, {i: -v for i, v in self.entries.items()})

    def scale(self, c):
        return type(self)(self.n, self.k, self.rank, {i: v * c for i, v in self.entries.items()})

    @classmethod
    def zero(cls, n: int, k: int, rank: int):
        return cls(n, k, rank, {})

    def to_str(self) -> str:
        if not self.entries:
            return "0"
        parts = []
        for idx in sorted(self.entries):
            name = ",".join(str(i + 1) for i in idx)
            parts.append(f"[{name}] {self.entries[idx].to_str()}")
        return "; ".join(parts)


class DerivTensor(_SkewTensor):
    """Skew r-multiderivation P0^r -> P1 given by its values on generator tuples."""


class FormTensor(_SkewTensor):
    """Skew P0-multilinear map on one-forms given by its values on dx-tuples."""


def _alt_contract(T_entries_value, rows, n, k, rank):
    """sum over increasing I of det[rows[m][I_s]] * value(I)."""
    terms = []
    for I in combinations(range(n), rank):
        v = T_entries_value(I)
        if v is None:
            continue
        det = Poly.zero(rows[0][0].n) if rank else None
        for perm in permutations(range(rank)):
            prod = None
            for m in range(rank):
                c = rows[m][I[perm[m]]]
                if not c:
                    prod = None
                    break
                prod = c if prod is None else prod * c
            if prod is not None:
                det = det + prod * _perm_sign(perm)
        if det:
            terms.append(v * det)
    return terms


def multideriv_apply(Q: DerivTensor, fs) -> FiberElem:
    if len(fs) != Q.rank:
        raise ValueError(f"expected {Q.rank} arguments, got {len(fs)}")
    if Q.rank == 0:
        return Q.value(())
    grads = [f.gradient() for f in fs]
    terms = _alt_contract(lambda I: Q.entries.get(I), grads, Q.n, Q.k, Q.rank)
    return vec_sum(terms, Q.n, Q.k)


def form_apply(Qbar: FormTensor, alphas) -> FiberElem:
    if len(alphas) != Qbar.rank:
        raise ValueError(f"expected {Qbar.rank} arguments, got {len(alphas)}")
    if Qbar.rank == 0:
        return Qbar.value(())
    terms = _alt_contract(lambda I: Qbar.entries.get(I), alphas, Qbar.n, Qbar.k, Qbar.rank)
    return vec_sum(terms, Qbar.n, Qbar.k)


def _shape_check(T: TripleData, Q: _SkewTensor):
    if Q.n != T.n or Q.k != T.k:
        raise ValueError(f"tensor shape (n={Q.n}, k={Q.k}) does not match triple (n={T.n}, k={T.k})")


def d_contra(T: TripleData, Q: DerivTensor) -> DerivTensor:
    """Contravariant differential of a multiderivation, evaluated on generator tuples."""
    _shape_check(T, Q)
    B = T.base
    r = Q.rank
    out = {}
    if r + 1 > T.n:
        return DerivTensor(T.n, T.k, r + 1, {})
    for I in combinations(range(T.n), r + 1):
        terms = []
        for s in range(r + 1):
            rest = I[:s] + I[s + 1:]
            v = contra_deriv_dx(T, I[s], Q.value(rest))
            terms.append(v if s % 2 == 0 else -v)
        for s, t in combinations(range(r + 1), 2):
            pst = B.entry(I[s], I[t])
            if not pst:
                continue
            rest = [Poly.var(T.n, i) for m, i in enumerate(I) if m not in (s, t)]
            v = multideriv_apply(Q, [pst] + rest)
            terms.append(v if (s + t) % 2 == 0 else -v)
        out[I] = vec_sum(terms, T.n, T.k)
    return DerivTensor(T.n, T.k, r + 1, out)


def d_contra_eval(T: TripleData, Q: DerivTensor, fs) -> FiberElem:
    """Contravariant differential evaluated directly on arbitrary polynomials."""
    from .base import base_bracket, differential

    r = Q.rank
    if len(fs) != r + 1:
        raise ValueError(f"expected {r + 1} arguments")
    terms = []
    for s in range(r + 1):
        rest = fs[:s] + fs[s + 1:]
        v = contra_deriv(T, differential(T.base, fs[s]), multideriv_apply(Q, rest))
        terms.append(v if s % 2 == 0 else -v)
    for s, t in combinations(range(r + 1), 2):
        rest = [f for m, f in enumerate(fs) if m not in (s, t)]
        v = multideriv_apply(Q, [base_bracket(T.base, fs[s], fs[t])] + rest)
        terms.append(v if (s + t) % 2 == 0 else -v)
    return vec_sum(terms, T.n, T.k)


def form_differential(T: TripleData, Qbar: FormTensor) -> FormTensor:
    """Contravariant differential of a P0-multilinear form, using the Koszul bracket."""
    _shape_check(T, Qbar)
    B = T.base
    r = Qbar.rank
    if r + 1 > T.n:
        return FormTensor(T.n, T.k, r + 1, {})
    out = {}
    for I in combinations(range(T.n), r + 1):
        forms = [dx(B, i) for i in I]
        terms = []
        for s in range(r + 1):
            v = contra_deriv(T, forms[s], form_apply(Qbar, forms[:s] + forms[s + 1:]))
            terms.append(v if s % 2 == 0 else -v)
        for s, t in combinations(range(r + 1), 2):
            rest = [a for m, a in enumerate(forms) if m not in (s, t)]
            v = form_apply(Qbar, [koszul_bracket(B, forms[s], forms[t])] + rest)
            terms.append(v if (s + t) % 2 == 0 else -v)
        out[I] = vec_sum(terms, T.n, T.k)
    return FormTensor(T.n, T.k, r + 1, out)


def k_form(T: TripleData) -> FormTensor:
    """The K-tensor of a triple as a rank-2 form."""
    entries = {(i, j): T.k_basis(i, j) for i, j in combinations(range(T.n), 2)}
    return FormTensor(T.n, T.k, 2, entries)


def delta_map(Qbar: FormTensor) -> DerivTensor:
    """Q(f_1..f_r) := Qbar(df_1..df_r); the same components, read as a multiderivation."""
    return DerivTensor(Qbar.n, Qbar.k, Qbar.rank, dict(Qbar.entries))


def form_of(Q: DerivTensor) -> FormTensor:
    """Inverse of delta_map (components are shared because one-forms are free on dx_i)."""
    return FormTensor(Q.n, Q.k, Q.rank, dict(Q.entries))


def d_squared_check(T: TripleData, Q: DerivTensor) -> Report:
    """Compare d(dQ) with the curvature contraction sum_{s<t} (-1)^(s+t+1) R(dx_s, dx_t) Q(rest)."""
    _shape_check(T, Q)
    rep = Report("d squared")
    rep.declare("d2-curvature")
    ddQ = d_contra(T, d_contra(T, Q))
    B = T.base
    r = Q.rank
    for I in combinations(range(T.n), r + 2):
        terms = []
        for s, t in combinations(range(r + 2), 2):
            rest = tuple(i for m, i in enumerate(I) if m not in (s, t))
            v = curvature_apply(T, dx(B, I[s]), dx(B, I[t]), Q.value(rest))
            terms.append(v if (s + t + 1) % 2 == 0 else -v)
        rhs = vec_sum(terms, T.n, T.k)
        where = "(" + ",".join(f"x{i + 1}" for i in I) + ")"
        rep.record("d2-curvature", where, ddQ.value(I) - rhs)
    return rep


def is_center_valued(T: TripleData, Q: _SkewTensor) -> bool:
    return all(is_central(T, v) for v in Q.entries.values())


# ---------------------------------------------------------------------------
# grading and cohomology


def _common_degree(polys):
    degs = set()
    for p in polys:
        if not p.is_homogeneous():
            return False, None
        degs.add(p.degree())
    if len(degs) > 1:
        return False, None
    return True, (degs.pop() if degs else None)


def weight_shift(T: TripleData, center_valued: bool = False) -> int:
    """Degree shift of the contravariant differential on homogeneous tensors.

    Requires pi homogeneous of one degree p and Gamma homogeneous of degree p - 1.
    For center-valued computations the fiber bracket must be homogeneous too.
    """
    ok, p = _common_degree(T.base.pi.values())
    if not ok:
        raise NotGradedError("Poisson structure polynomials are not homogeneous of a common degree")
    ok, q = _common_degree(T.gamma.values())
    if not ok:
        raise NotGradedError("connection coefficients are not homogeneous of a common degree")
    if p is not None and q is not None and q != p - 1:
        raise NotGradedError(f"connection degree {q} does not match Poisson degree {p} minus one")
    if center_valued:
        ok, _ = _common_degree(T.c.values())
        if not ok:
            raise NotGradedError("fiber bracket coefficients are not homogeneous of a common degree")
    if p is not None:
        return p - 1
    if q is not None:
        return q
    return 0


def graded_basis(T: TripleData, rank_: int, degree: int, center_valued: bool) -> list[DerivTensor]:
    """Basis of rank-r tensors whose entries are homogeneous of the given degree."""
    if degree < 0 or rank_ < 0 or rank_ > T.n:
        return []
    if center_valued:
        fibers = center_slice(T, degree)
    else:
        fibers = [PolyVec.unit(T.n, T.k, a) * Poly.monomial(e)
                  for a in range(T.k) for e in monomials(T.n, degree)]
    out = []
    for I in combinations(range(T.n), rank_):
        for v in fibers:
            out.append(DerivTensor(T.n, T.k, rank_, {I: v}))
    return out


def _tensor_coords(Q: _SkewTensor):
    return [Q.value(I) for I in combinations(range(Q.n), Q.rank)]


def differential_matrix(T: TripleData, basis: list[DerivTensor]):
    images = [_tensor_coords(d_contra(T, Q)) for Q in basis]
    rows, keys = coefficient_rows(images)
    return rows, keys, images


@dataclass(frozen=True)
class CohomologyDims:
    cocycles: int
    coboundaries: int
    cohomology: int

    def as_tuple(self):
        return (self.cocycles, self.coboundaries, self.cohomology)


def cohomology_dims(T: TripleData, r: int, degree: int, center_valued: bool = False) -> CohomologyDims:
    """Per-degree dimensions of cocycles, coboundaries and cohomology for rank-r tensors."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if r < 0:
        raise ValueError("rank must be nonnegative")
    s = weight_shift(T, center_valued)
    V = graded_basis(T, r, degree, center_valued)
    if V:
        rows, _, _ = differential_matrix(T, V)
        cocycles = len(V) - rank(rows, len(V))
    else:
        cocycles = 0
    coboundaries = 0
    if r >= 1:
        W = graded_basis(T, r - 1, degree - s, center_valued)
        if W:
            images = [d_contra(T, Q) for Q in W]
            rows, _ = coefficient_rows([_tensor_coords(Q) for Q in images])
            coboundaries = rank(rows, len(W))
            for Q in images:
                if center_valued and not is_center_valued(T, Q):
                    raise ValueError("differential left the center-valued subcomplex; triple is not valid")
                if not d_contra(T, Q).is_zero():
                    raise ValueError("the differential does not square to zero on this slice")
    return CohomologyDims(cocycles, coboundaries, cocycles - coboundaries)


def filtered_bounds(T: TripleData, r: int, max_degree: int, center_valued: bool = False) -> tuple[int, int]:
    """For data without a grading: cocycle and coboundary dimensions inside the
    degree filtration (entries of degree <= max_degree).  These are bounds, not H."""
    def basis(rank_):
        out = []
        for d in range(max_degree + 1):
            out.extend(graded_basis(T, rank_, d, False))
        if center_valued:
            return _central_span(T, out)
        return out

    V = basis(r)
    cocycles = 0
    if V:
        rows, _ = coefficient_rows([_tensor_coords(d_contra(T, Q)) for Q in V])
        cocycles = len(V) - rank(rows, len(V))
    coboundaries = 0
    if r >= 1:
        W = basis(r - 1)
        if W:
            images = [_tensor_coords(d_contra(T, Q)) for Q in W]
            rows, _ = coefficient_rows(images)
            coboundaries = rank(rows, len(W))
    return cocycles, coboundaries


def _central_span(T: TripleData, basis: list[DerivTensor]) -> list[DerivTensor]:
    """Subspace of span(basis) consisting of center-valued tensors."""
    if not basis:
        return []
    images = [[fiber_bracket(T, Q.value(I), T.unit(g)) for I in combinations(range(T.n), Q.rank)
               for g in range(T.k)] for Q in basis]
    rows, _ = coefficient_rows(images)
    out = []
    for v in nullspace(rows, len(basis)):
        acc = DerivTensor.zero(T.n, T.k, basis[0].rank)
        for Q, c in zip(basis, v):
            if c:
                acc = acc + Q.scale(c)
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# checks for the triples attached to generalized derivations


def _apply_l(L, ell, xi: FiberElem) -> FiberElem:
    """L(sum xi_b e_b) = sum xi_b L(e_b) + ell(xi_b) e_b with ell extended as a derivation."""
    n, k = xi.n, len(xi)

    def ell_of(g):
        out = Poly.zero(n)
        for i, dg in enumerate(g.gradient()):
            if dg and ell[i]:
                out = out + dg * ell[i]
        return out

    terms = [L[b] * c for b, c in enumerate(xi) if c]
    terms.append(PolyVec([ell_of(c) for c in xi], n))
    return vec_sum(terms, n, k)


def m_membership_check(T: TripleData, L, ell, theta) -> Report:
    """Conditions tying (L, ell, theta) to the triple.

    ``L[b]`` is L(e_b), ``ell[i]`` is ell(x_i) and ``theta[i]`` is theta(x_i).
    """
    from .base import base_bracket, differential

    n, k = T.n, T.k
    if len(L) != k or len(ell) != n or len(theta) != n:
        raise ValueError("L, ell and theta must have lengths k, n and n")
    L = [v if isinstance(v, PolyVec) else PolyVec(v, n) for v in L]
    theta = [v if isinstance(v, PolyVec) else PolyVec(v, n) for v in theta]
    B = T.base
    rep = Report("derivation triple")
    for c in ("ell-poisson", "L-derives-bracket", "D-commutator", "K-compat"):
        rep.declare(c)
    xs = [Poly.var(n, i) for i in range(n)]

    def ell_of(g):
        out = Poly.zero(n)
        for i, dg in enumerate(g.gradient()):
            if dg and ell[i]:
                out = out + dg * ell[i]
        return out

    for i, j in combinations(range(n), 2):
        res = ell_of(B.entry(i, j)) - base_bracket(B, ell[i], xs[j]) - base_bracket(B, xs[i], ell[j])
        rep.record("ell-poisson", f"(x{i + 1},x{j + 1})", res)
    for a, b in combinations(range(k), 2):
        ea, eb = T.unit(a), T.unit(b)
        res = (
            _apply_l(L, ell, fiber_bracket(T, ea, eb))
            - fiber_bracket(T, L[a], eb)
            - fiber_bracket(T, ea, L[b])
        )
        rep.record("L-derives-bracket", f"(e{a + 1},e{b + 1})", res)
    for i in range(n):
        for b in range(k):
            eb = T.unit(b)
            res = (
                contra_deriv_dx(T, i, L[b])
                - _apply_l(L, ell, contra_deriv_dx(T, i, eb))
                + contra_deriv(T, differential(B, ell[i]), eb)
                - fiber_bracket(T, theta[i], eb)
            )
            rep.record("D-commutator", f"(dx{i + 1},e{b + 1})", res)
    dtheta = d_contra(T, DerivTensor(n, k, 1, {(i,): theta[i] for i in range(n)}))
    for i, j in combinations(range(n), 2):
        res = (
            _apply_l(L, ell, T.k_basis(i, j))
            - k_apply(T, differential(B, ell[i]), dx(B, j))
            - k_apply(T, dx(B, i), differential(B, ell[j]))
            + dtheta.value((i, j))
        )
        rep.record("K-compat", f"(x{i + 1},x{j + 1})", res)
    return rep


def j_kernel_witness(T: TripleData, c: DerivTensor, max_degree: int) -> ExtElem | None:
    """Search for k (+) eta of degree <= max_degree with {k, .} = 0 on P0,
    D_dk + ad_eta = 0 and torsion equal to ``c`` on generators.

    Returns one witness or None (inconclusive beyond the degree bound).
    """
    from .base import base_bracket, differential

    n, k = T.n, T.k
    if c.rank != 1:
        raise ValueError("c must be a rank-1 tensor")
    _shape_check(T, c)
    exps = monomials_upto(n, max_degree)
    units = [ExtElem.scalar(Poly.monomial(e), k) for e in exps]
    units += [ExtElem.fiber(PolyVec.unit(n, k, a) * Poly.monomial(e)) for a in range(k) for e in exps]

    def image(p: ExtElem):
        dk = differential(T.base, p.f)
        return (
            [base_bracket(T.base, p.f, Poly.var(n, i)) for i in range(n)],
            [contra_deriv(T, dk, T.unit(b)) + fiber_bracket(T, p.eta, T.unit(b)) for b in range(k)],
            [torsion_apply(T, p, i) for i in range(n)],
        )

    images = [image(u) for u in units]
    rows, keys = coefficient_rows(images)
    zero_scalars = [Poly.zero(n)] * n
    zero_fibers = [PolyVec.zero(n, k)] * k
    target = (zero_scalars, zero_fibers, [c.value((i,)) for i in range(n)])
    rhs = coefficient_vector(target, keys)
    if rhs is None:
        return None
    sol = solve(rows, rhs, len(units))
    if sol is None:
        return None
    f = Poly.zero(n)
    terms = []
    for u, v in zip(units, sol):
        if v:
            f = f + u.f * v
            terms.append(u.eta * v)
    return ExtElem(f, vec_sum(terms, n, k))
