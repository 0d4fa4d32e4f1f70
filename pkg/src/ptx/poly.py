"""Sparse multivariate polynomials over the rationals.

A :class:`Poly` maps exponent tuples to nonzero :class:`fractions.Fraction`
coefficients.  Variables are indexed from 0 in the Python API and printed
as ``x1 .. xn``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from numbers import Rational
from typing import Iterable, Iterator, Mapping

Exp = tuple[int, ...]


class VariableCountError(ValueError):
    pass


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not a rational coefficient: {c!r}")


def _norm(c):
    # integral values are kept as int: same value and hash as the Fraction, much faster arithmetic
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class Poly:
    """Immutable polynomial in ``n`` variables with rational coefficients."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Exp, object] | None = None):
        if n < 0:
            raise ValueError("variable count must be nonnegative")
        clean: dict[Exp, Fraction] = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != n or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent vector {exp} for n={n}")
                c = _as_fraction(c)
                if c:
                    v = _norm(clean.get(exp, 0) + c)
                    if v:
                        clean[exp] = v
                    else:
                        del clean[exp]
        self.n = n
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict[Exp, Fraction]) -> "Poly":
        # terms must already be canonical
        p = object.__new__(cls)
        p.n = n
        p.terms = terms
        p._hash = None
        return p

    # constructors
    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, c) -> "Poly":
        c = _norm(_as_fraction(c))
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def one(cls, n: int) -> "Poly":
        return cls.const(n, 1)

    @classmethod
    def var(cls, n: int, i: int) -> "Poly":
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        exp = [0] * n
        exp[i] = 1
        return cls._raw(n, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exp: Exp, c=1) -> "Poly":
        return cls(len(exp), {tuple(exp): c})

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly._raw(self.n, {e: c for e, c in self.terms.items() if sum(e) == d})

    def constant_term(self) -> Fraction:
        return Fraction(self.terms.get((0,) * self.n, 0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    # arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.n != self.n:
                raise VariableCountError(f"variable counts differ: {self.n} vs {other.n}")
            return other
        return Poly.const(self.n, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = _norm(out.get(e, 0) + c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, Poly):
            if other.n != self.n:
                raise VariableCountError(f"variable counts differ: {self.n} vs {other.n}")
            if not self.terms or not other.terms:
                return Poly._raw(self.n, {})
            if len(other.terms) == 1 and other.terms.get((0,) * self.n) == 1:
                return self
            if len(self.terms) == 1 and self.terms.get((0,) * self.n) == 1:
                return other
            out: dict[Exp, Fraction] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
            return Poly._raw(self.n, {e: _norm(c) for e, c in out.items() if c})
        try:
            c = _norm(_as_fraction(other))
        except TypeError:
            return NotImplemented
        if not c:
            return Poly._raw(self.n, {})
        if c == 1:
            return self
        return Poly._raw(self.n, {e: _norm(v * c) for e, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out = Poly.one(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def partial(self, i: int) -> "Poly":
        """Formal partial derivative with respect to variable ``i`` (0-based)."""
        if not 0 <= i < self.n:
            raise IndexError(f"variable index {i} out of range for n={self.n}")
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = _norm(c * e[i])
        return Poly._raw(self.n, out)

    def gradient(self) -> tuple["Poly", ...]:
        return tuple(self.partial(i) for i in range(self.n))

    # comparison
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        try:
            c = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * self.n: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    # printing
    def sorted_terms(self) -> list[tuple[Exp, Fraction]]:
        """Terms in graded lexicographic order, leading term first."""
        items = sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-a for a in t[0])))
        return [(e, Fraction(c)) for e, c in items]

    def to_str(self, names: Iterable[str] | None = None) -> str:
        names = list(names) if names is not None else [f"x{i + 1}" for i in range(self.n)]
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            factors = []
            for name, e in zip(names, exp):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Poly({self.n}, {self.to_str()!r})"


def monomials(n: int, degree: int) -> list[Exp]:
    """Exponent vectors of total degree exactly ``degree`` in graded-lex order."""
    if degree < 0:
        return []
    if n == 0:
        return [()] if degree == 0 else []
    out = []
    for combo in combinations_with_replacement(range(n), degree):
        exp = [0] * n
        for i in combo:
            exp[i] += 1
        out.append(tuple(exp))
    out.sort(key=lambda e: tuple(-a for a in e))
    return out


def monomials_upto(n: int, max_degree: int) -> list[Exp]:
    out = []
    for d in range(max_degree + 1):
        out.extend(monomials(n, d))
    return out


class PolyVec(tuple):
    """Fixed-length vector of :class:`Poly` sharing one variable count.

    Used for fiber elements (coordinates in the basis ``e_a``) and for
    one-forms (coefficients of ``dx_i``).
    """

    def __new__(cls, items: Iterable[Poly], n: int | None = None):
        items = tuple(items)
        self = super().__new__(cls, items)
        if items:
            n0 = items[0].n
            if any(p.n != n0 for p in items):
                raise VariableCountError("mixed variable counts in vector")
            if n is not None and n != n0:
                raise VariableCountError(f"vector over {n0} variables, expected {n}")
            self.n = n0
        else:
            if n is None:
                raise ValueError("empty vector needs an explicit variable count")
            self.n = n
        return self

    @classmethod
    def zero(cls, n: int, k: int) -> "PolyVec":
        z = Poly.zero(n)
        return cls([z] * k, n)

    @classmethod
    def unit(cls, n: int, k: int, a: int) -> "PolyVec":
        if not 0 <= a < k:
            raise IndexError(f"basis index {a} out of range for rank {k}")
        return cls([Poly.one(n) if b == a else Poly.zero(n) for b in range(k)], n)

    def _check(self, other: "PolyVec"):
        if len(other) != len(self):
            raise ValueError(f"length mismatch: {len(self)} vs {len(other)}")
        if other.n != self.n:
            raise VariableCountError(f"variable counts differ: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, PolyVec):
            return NotImplemented
        self._check(other)
        return PolyVec([a + b for a, b in zip(self, other)], self.n)

    def __sub__(self, other):
        if not isinstance(other, PolyVec):
            return NotImplemented
        self._check(other)
        return PolyVec([a - b for a, b in zip(self, other)], self.n)

    def __neg__(self):
        return PolyVec([-a for a in self], self.n)

    def __mul__(self, s):
        if isinstance(s, PolyVec):
            return NotImplemented
        return PolyVec([a * s for a in self], self.n)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self)

    def __eq__(self, other):
        if isinstance(other, PolyVec):
            return len(self) == len(other) and tuple.__eq__(self, other)
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = tuple.__hash__

    def __repr__(self) -> str:
        return "PolyVec(" + ", ".join(p.to_str() for p in self) + ")"

    def to_str(self) -> str:
        return ",".join(p.to_str() for p in self)


def vec_sum(vs: Iterable[PolyVec], n: int, k: int) -> PolyVec:
    acc: list[dict[Exp, Fraction]] = [dict() for _ in range(k)]
    for v in vs:
        for a, p in enumerate(v):
            d = acc[a]
            for e, c in p.terms.items():
                d[e] = d.get(e, 0) + c
    return PolyVec([Poly._raw(n, {e: _norm(c) for e, c in d.items() if c}) for d in acc], n)


def iter_coeffs(obj, prefix=()) -> Iterator[tuple[tuple, Fraction]]:
    """Flatten nested sequences of polynomials into ``(key, coeff)`` pairs."""
    if isinstance(obj, Poly):
        for e, c in obj.terms.items():
            yield prefix + (e,), Fraction(c)
    else:
        for i, item in enumerate(obj):
            yield from iter_coeffs(item, prefix + (i,))


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    """Syntax error in polynomial text; ``pos`` is a 0-based character offset."""

    def __init__(self, msg: str, src: str, pos: int):
        self.src = src
        self.pos = pos
        self.msg = msg
        super().__init__(f"{msg} at column {pos + 1} in {src!r}")


_NUM, _IDENT, _OP, _END = "num", "ident", "op", "end"


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    toks = []
    i = 0
    while i < len(src):
        ch = src[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            toks.append((_NUM, src[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append((_IDENT, src[i:j], i))
            i = j
        elif ch in "+-*^()/":
            toks.append((_OP, ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", src, i)
    toks.append((_END, "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str, n: int | None, params: Mapping[str, Fraction] | None):
        self.src = src
        self.toks = _tokenize(src)
        self.k = 0
        self.params = dict(params or {})
        # variable count is fixed after a full pass when n is None
        self.n = n
        self.max_var = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, kind, text=None):
        t = self.peek()
        if t[0] != kind or (text is not None and t[1] != text):
            want = text if text is not None else kind
            got = t[1] if t[0] != _END else "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", self.src, t[2])
        return self.take()

    # the tree is a tiny sum-of-products over dict monomials keyed by var index
    def expr(self):
        acc = self.term()
        while self.peek()[0] == _OP and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            acc = _padd(acc, rhs if op == "+" else _pscale(rhs, -1))
        return acc

    def term(self):
        acc = self.factor()
        while self.peek()[0] == _OP and self.peek()[1] == "*":
            self.take()
            acc = _pmul(acc, self.factor())
        t = self.peek()
        if t[0] == _OP and t[1] == "/":
            raise ParseError("division by an expression is not allowed", self.src, t[2])
        return acc

    def posint(self):
        t = self.peek()
        if t[0] != _NUM:
            raise ParseError("expected a positive integer", self.src, t[2])
        self.take()
        v = int(t[1])
        if v <= 0:
            raise ParseError("expected a positive integer", self.src, t[2])
        return v

    def factor(self):
        t = self.peek()
        if t[0] == _OP and t[1] == "-":
            self.take()
            return _pscale(self.factor(), -1)
        if t[0] == _OP and t[1] == "(":
            self.take()
            inner = self.expr()
            self.expect(_OP, ")")
            return inner
        if t[0] == _NUM:
            self.take()
            num = int(t[1])
            nxt = self.peek()
            if nxt[0] == _OP and nxt[1] == "/":
                self.take()
                after = self.peek()
                if after[0] != _NUM:
                    raise ParseError("division by an expression is not allowed", self.src, nxt[2])
                den = self.posint()
                return {(): Fraction(num, den)}
            return {(): Fraction(num)}
        if t[0] == _IDENT:
            self.take()
            name = t[1]
            if name in self.params:
                return {(): self.params[name]}
            if name[0] == "x" and name[1:].isdigit():
                idx = int(name[1:])
                if idx < 1 or name[1] == "0":
                    raise ParseError(f"bad variable name {name!r}", self.src, t[2])
                if self.n is not None and idx > self.n:
                    raise ParseError(f"variable {name} out of range for n={self.n}", self.src, t[2])
                self.max_var = max(self.max_var, idx)
                power = 1
                if self.peek()[0] == _OP and self.peek()[1] == "^":
                    self.take()
                    power = self.posint()
                return {((idx - 1, power),): Fraction(1)}
            raise ParseError(f"unknown name {name!r}", self.src, t[2])
        got = t[1] if t[0] != _END else "end of input"
        raise ParseError(f"unexpected {got!r}", self.src, t[2])


def _mono_mul(m1, m2):
    d = dict(m1)
    for i, e in m2:
        d[i] = d.get(i, 0) + e
    return tuple(sorted(d.items()))


def _padd(p, q):
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, 0) + c
    return {m: c for m, c in out.items() if c}


def _pscale(p, s):
    return {m: c * s for m, c in p.items()}


def _pmul(p, q):
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def parse_poly(src: str, n: int | None = None, params: Mapping[str, object] | None = None) -> Poly:
    """Parse polynomial text such as ``"2*x1^2 - 1/3"``.

    ``n`` fixes the variable count (default: the largest index used).
    ``params`` maps extra names to rational values substituted on the spot.
    """
    fparams = {k: _as_fraction(v) for k, v in (params or {}).items()}
    for name in fparams:
        if name[0] == "x" and name[1:].isdigit():
            raise ValueError(f"parameter name {name!r} clashes with a variable name")
    p = _Parser(src, n, fparams)
    tree = p.expr()
    t = p.peek()
    if t[0] != _END:
        if t[0] == _OP and t[1] == "/":
            raise ParseError("division by an expression is not allowed", src, t[2])
        raise ParseError(f"unexpected {t[1]!r}", src, t[2])
    nvars = n if n is not None else p.max_var
    terms = {}
    for mono, c in tree.items():
        exp = [0] * nvars
        for i, e in mono:
            exp[i] += e
        terms[tuple(exp)] = c
    return Poly(nvars, terms)
