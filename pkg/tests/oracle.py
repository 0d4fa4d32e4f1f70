"""Independent sympy computations used to freeze derived values.

Nothing here imports the package's arithmetic: polynomials are rebuilt as
sympy expressions from their exponent/coefficient pairs and everything else
is recomputed from the defining formulas.
"""

from itertools import combinations

import sympy as sp


def symbols(n):
    return sp.symbols(" ".join(f"x{i + 1}" for i in range(n)), seq=True)


def to_sympy(p, xs):
    return sp.Add(*[sp.Rational(c.numerator, c.denominator) * sp.Mul(*[x**e for x, e in zip(xs, exp)])
                    for exp, c in p.sorted_terms()])


def base_matrix(T, xs):
    n = T.n
    P = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            P[i, j] = to_sympy(T.base.entry(i, j), xs)
    return P


def gamma_table(T, xs):
    return {(a, i, b): to_sympy(p, xs) for (a, i, b), p in T.gamma.items()}


def casimir_dim(T, max_degree):
    """dim of {f : {f, x_i} = 0 for all i, deg f <= max_degree} by a dense solve."""
    xs = symbols(T.n)
    P = base_matrix(T, xs)
    mons = sorted(sp.itermonomials(list(xs), max_degree), key=sp.default_sort_key)
    cs = sp.symbols(f"c0:{len(mons)}")
    f = sum(c * m for c, m in zip(cs, mons))
    eqs = []
    for i in range(T.n):
        br = sp.expand(sum(sp.diff(f, xs[j]) * P[j, i] for j in range(T.n)))
        eqs.extend(sp.Poly(br, *xs).coeffs())
    if not eqs:
        return len(mons)
    A, _ = sp.linear_eq_to_matrix(eqs, cs)
    return len(mons) - A.rank()


class DenseComplex:
    """Contravariant differential on fiber-valued skew tensors, recomputed in sympy."""

    def __init__(self, T):
        self.n, self.k = T.n, T.k
        self.xs = symbols(T.n)
        self.P = base_matrix(T, self.xs)
        self.G = gamma_table(T, self.xs)

    def bracket(self, f, g):
        xs, P = self.xs, self.P
        return sp.expand(sum(sp.diff(f, xs[i]) * P[i, j] * sp.diff(g, xs[j])
                             for i in range(self.n) for j in range(self.n)))

    def conn(self, i, eta):
        out = []
        for a in range(self.k):
            v = self.bracket(self.xs[i], eta[a])
            v += sum(eta[b] * self.G.get((a, i, b), 0) for b in range(self.k))
            out.append(sp.expand(v))
        return out

    @staticmethod
    def value(Q, idx):
        idx = list(idx)
        sign = 1
        for s in range(len(idx)):
            for t in range(len(idx) - 1 - s):
                if idx[t] > idx[t + 1]:
                    idx[t], idx[t + 1] = idx[t + 1], idx[t]
                    sign = -sign
        if len(set(idx)) != len(idx):
            return None
        v = Q.get(tuple(idx))
        return None if v is None else [sign * c for c in v]

    def apply_first(self, Q, f, rest):
        """Q(f, x_rest) extended as a derivation in the first slot."""
        out = [0] * self.k
        for m in range(self.n):
            dm = sp.diff(f, self.xs[m])
            if dm == 0:
                continue
            v = self.value(Q, (m,) + tuple(rest))
            if v is not None:
                out = [o + dm * c for o, c in zip(out, v)]
        return out

    def d(self, Q, r):
        out = {}
        for I in combinations(range(self.n), r + 1):
            acc = [0] * self.k
            for s in range(r + 1):
                rest = I[:s] + I[s + 1:]
                v = self.value(Q, rest) if r else Q.get((), None)
                if v is None:
                    continue
                w = self.conn(I[s], v)
                acc = [a + (-1) ** s * b for a, b in zip(acc, w)]
            for s, t in combinations(range(r + 1), 2):
                rest = [i for m, i in enumerate(I) if m not in (s, t)]
                w = self.apply_first(Q, self.P[I[s], I[t]], rest)
                acc = [a + (-1) ** (s + t) * b for a, b in zip(acc, w)]
            out[I] = [sp.expand(a) for a in acc]
        return out

    def basis(self, r, degree):
        if degree < 0 or r > self.n:
            return []
        mons = [m for m in sp.itermonomials(list(self.xs), degree, degree)]
        mons = sorted(mons, key=sp.default_sort_key)
        out = []
        for I in combinations(range(self.n), r):
            for a in range(self.k):
                for m in mons:
                    v = [0] * self.k
                    v[a] = m
                    out.append({I: v})
        return out

    def rank_of_d(self, basis, r):
        images = [self.d(Q, r) for Q in basis]
        keys = {}
        cols = []
        for img in images:
            col = {}
            for I, v in img.items():
                for a, p in enumerate(v):
                    if p == 0:
                        continue
                    for mon, c in sp.Poly(p, *self.xs).terms():
                        key = (I, a, mon)
                        keys.setdefault(key, len(keys))
                        col[keys[key]] = c
            cols.append(col)
        if not keys or not cols:
            return 0
        M = sp.zeros(len(keys), len(cols))
        for j, col in enumerate(cols):
            for i, c in col.items():
                M[i, j] = c
        return M.rank()

    def dims(self, r, degree, shift):
        V = self.basis(r, degree)
        z = len(V) - self.rank_of_d(V, r) if V else 0
        b = 0
        if r >= 1:
            W = self.basis(r - 1, degree - shift)
            if W:
                b = self.rank_of_d(W, r - 1)
        return (z, b, z - b)
