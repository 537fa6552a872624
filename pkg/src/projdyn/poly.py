"""Exact sparse multivariate polynomials over the rationals.

A :class:`Poly` maps exponent tuples to nonzero rational coefficients.  Integral
coefficients are stored as ``int`` and everything else as
:class:`fractions.Fraction`, which keeps the common all-integer case fast while
staying exact.

Terms iterate in graded lexicographic order (total degree first, then
lexicographic with the first declared variable most significant), largest
first.  Two equal polynomials therefore print identically.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]
Coeff = int | Fraction


class BudgetExceeded(RuntimeError):
    """A multiplication would exceed the configured term budget."""


def as_coeff(value) -> Coeff:
    """Coerce an int, Fraction or rational string to the canonical coefficient type."""
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, (Rational, str)):
        value = Fraction(value)
        return value.numerator if value.denominator == 1 else value
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def _div(a: Coeff, b: Coeff) -> Coeff:
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r == 0:
            return q
    return as_coeff(Fraction(a) / b)


def grlex_key(e: Exponent) -> tuple:
    return (sum(e), e)


class _Packer:
    """Packs exponent vectors into ints whose natural order is grlex.

    The top field holds the total degree, so integer comparison is graded
    lexicographic and monomial multiplication is integer addition.  Every field
    keeps a spare high bit, which makes componentwise ``a >= b`` a single
    subtraction test.
    """

    __slots__ = ("n", "bits", "mask", "guards")

    def __init__(self, n: int, max_degree: int):
        self.n = n
        self.bits = max(max_degree, 1).bit_length() + 1
        self.mask = (1 << self.bits) - 1
        high = 1 << (self.bits - 1)
        self.guards = sum(high << (self.bits * i) for i in range(n + 1))

    def pack(self, e: Exponent) -> int:
        key = sum(e)
        for x in e:
            key = (key << self.bits) | x
        return key

    def unpack(self, key: int) -> Exponent:
        out = []
        for _ in range(self.n):
            out.append(key & self.mask)
            key >>= self.bits
        return tuple(reversed(out))

    def divides(self, small: int, big: int) -> bool:
        return ((big | self.guards) - small) & self.guards == self.guards


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables with exact coefficients."""

    __slots__ = ("nvars", "_d", "_sorted")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | Iterable = ()):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        items = terms.items() if isinstance(terms, Mapping) else terms
        d: dict[Exponent, Coeff] = {}
        for e, c in items:
            e = tuple(e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {nvars}")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            c = as_coeff(c)
            if c:
                c = d.get(e, 0) + c
                if c:
                    d[e] = c
                else:
                    d.pop(e, None)
        self._d = d
        self._sorted = None

    @classmethod
    def _raw(cls, nvars: int, d: dict) -> "Poly":
        # trusted constructor: d already canonical
        p = object.__new__(cls)
        p.nvars = nvars
        p._d = d
        p._sorted = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        c = as_coeff(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> tuple[tuple[Exponent, Coeff], ...]:
        """Terms in canonical (descending grlex) order."""
        if self._sorted is None:
            self._sorted = tuple(sorted(self._d.items(), key=lambda t: grlex_key(t[0]), reverse=True))
        return self._sorted

    def as_dict(self) -> dict[Exponent, Coeff]:
        return dict(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __bool__(self) -> bool:
        return bool(self._d)

    def __iter__(self):
        return iter(self.terms)

    def coeff(self, e: Exponent) -> Coeff:
        return self._d.get(tuple(e), 0)

    @property
    def is_zero(self) -> bool:
        return not self._d

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._d), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self._d), default=-1)

    @property
    def is_constant(self) -> bool:
        return all(not any(e) for e in self._d)

    @property
    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._d}) <= 1

    @property
    def leading_term(self) -> tuple[Exponent, Coeff]:
        if not self._d:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0]

    @property
    def leading_coeff(self) -> Coeff:
        return self.leading_term[1]

    def constant_value(self) -> Coeff:
        if not self.is_constant:
            raise ValueError("polynomial is not constant")
        return self._d.get((0,) * self.nvars, 0)

    def used_vars(self) -> list[int]:
        return [i for i in range(self.nvars) if any(e[i] for e in self._d)]

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError(f"variable-count mismatch: {self.nvars} vs {other.nvars}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        d = dict(self._d)
        for e, c in other._d.items():
            s = d.get(e, 0) + c
            if s:
                d[e] = as_coeff(s) if isinstance(s, Fraction) else s
            else:
                d.pop(e, None)
        return Poly._raw(self.nvars, d)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {e: -c for e, c in self._d.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def scale(self, c) -> "Poly":
        c = as_coeff(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {e: as_coeff(v * c) for e, v in self._d.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        return mul(self, other)

    def __rmul__(self, other) -> "Poly":
        return self.scale(other)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._d.items())))

    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point: Sequence) -> Coeff:
        """Exact value at a point of rationals."""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(point)}")
        point = [as_coeff(x) for x in point]
        total = 0
        for e, c in self._d.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x**k
            total += t
        return as_coeff(total) if isinstance(total, Fraction) else total

    def diff(self, i: int) -> "Poly":
        d = {}
        for e, c in self._d.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                d[tuple(f)] = c * e[i]
        return Poly._raw(self.nvars, d)

    def homogeneous_part(self, deg: int) -> "Poly":
        return Poly._raw(self.nvars, {e: c for e, c in self._d.items() if sum(e) == deg})

    def to_str(self, names: Sequence[str] | None = None) -> str:
        return format_poly(self, names)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {format_poly(self)!r})"


def default_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


def format_poly(p: Poly, names: Sequence[str] | None = None) -> str:
    """Canonical text form, parseable by :func:`projdyn.parser.parse_poly`."""
    names = list(names) if names is not None else default_names(p.nvars)
    if len(names) != p.nvars:
        raise ValueError("wrong number of variable names")
    if not p:
        return "0"
    out = []
    for e, c in p.terms:
        mono = "*".join(
            names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
        )
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if out:
            out.append(f" - {body}" if neg else f" + {body}")
        else:
            out.append(f"-{body}" if neg else body)
    return "".join(out)


# -- core operations --------------------------------------------------------


def _max_degree(p: Poly) -> int:
    return max((sum(e) for e in p._d), default=0)


def mul(p: Poly, q: Poly, max_terms: int | None = None) -> Poly:
    """Exact product.  ``max_terms`` bounds the number of term products."""
    p._check(q)
    if not p or not q:
        return Poly.zero(p.nvars)
    if max_terms is not None and len(p) * len(q) > max_terms:
        raise BudgetExceeded(f"multiplication of {len(p)} x {len(q)} terms exceeds budget {max_terms}")
    if len(p) < len(q):
        p, q = q, p
    if len(q) == 1:
        ((eq, cq),) = q._d.items()
        return Poly._raw(
            p.nvars,
            {tuple(a + b for a, b in zip(e, eq)): as_coeff(c * cq) for e, c in p._d.items()},
        )
    pk = _Packer(p.nvars, _max_degree(p) + _max_degree(q))
    qs = [(pk.pack(e), c) for e, c in q._d.items()]
    acc: dict[int, Coeff] = {}
    get = acc.get
    for e, c in p._d.items():
        k = pk.pack(e)
        for kq, cq in qs:
            key = k + kq
            acc[key] = get(key, 0) + c * cq
    d = {}
    for key, c in acc.items():
        if c:
            d[pk.unpack(key)] = as_coeff(c) if isinstance(c, Fraction) else c
    return Poly._raw(p.nvars, d)


def poly_arith(p: Poly, q: Poly, op: str) -> Poly:
    p._check(q)
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return mul(p, q)
    raise ValueError(f"unknown operation {op!r}")


def divide_exact(p: Poly, q: Poly) -> Poly | None:
    """Return ``r`` with ``q * r == p``, or ``None`` if ``q`` does not divide ``p``."""
    p._check(q)
    if not q:
        raise ZeroDivisionError("division by the zero polynomial")
    if not p:
        return Poly.zero(p.nvars)
    if len(q) == 1:
        ((eq, cq),) = q._d.items()
        d = {}
        for e, c in p._d.items():
            f = tuple(a - b for a, b in zip(e, eq))
            if min(f) < 0:
                return None
            d[f] = _div(c, cq)
        return Poly._raw(p.nvars, d)
    dq, dp = _max_degree(q), _max_degree(p)
    if dq > dp:
        return None
    pk = _Packer(p.nvars, dp + dq)
    qterms = sorted(((pk.pack(e), c) for e, c in q._d.items()), reverse=True)
    lq, lc = qterms[0]
    rest = qterms[1:]
    rem = {pk.pack(e): c for e, c in p._d.items()}
    heap = [-k for k in rem]
    heapq.heapify(heap)
    quot = {}
    while heap:
        k = -heapq.heappop(heap)
        c = rem.pop(k, 0)
        if not c:
            continue
        if not pk.divides(lq, k):
            return None
        t = k - lq
        a = _div(c, lc)
        quot[t] = a
        for kq, cq in rest:
            nk = t + kq
            old = rem.get(nk)
            if old is None:
                rem[nk] = -a * cq
                heapq.heappush(heap, -nk)
            else:
                v = old - a * cq
                if v:
                    rem[nk] = v
                else:
                    del rem[nk]
    return Poly._raw(p.nvars, {pk.unpack(k): as_coeff(c) for k, c in quot.items()})


def content_and_primitive(p: Poly) -> tuple[Fraction, Poly]:
    """Split ``p`` as ``content * primitive`` with a primitive integer polynomial.

    The primitive part has coprime integer coefficients and a positive leading
    coefficient; the sign goes into the content.
    """
    if not p:
        raise ValueError("content of the zero polynomial is undefined")
    coeffs = list(p._d.values())
    den = lcm(*(Fraction(c).denominator for c in coeffs))
    num = gcd(*(int(c * den) for c in coeffs))
    content = Fraction(num, den)
    if p.leading_coeff < 0:
        content = -content
    prim = Poly._raw(p.nvars, {e: int(c / content) for e, c in p._d.items()})
    return content, prim


def primitive(p: Poly) -> Poly:
    return content_and_primitive(p)[1] if p else p


def substitute(
    p: Poly,
    images: Sequence[Poly],
    max_terms: int | None = None,
    cache: dict | None = None,
    homogeneous: bool = False,
) -> Poly:
    """Compose ``p`` with ``images``: replace variable ``i`` by ``images[i]``.

    ``cache`` may be shared between calls with the same ``images`` (for example
    across the coordinates of a map) to reuse powers and partial products.
    With ``homogeneous=True`` the images of the variables in use must be forms
    of one common degree, so a form of degree a maps to a form of degree a*b.
    """
    if len(images) != p.nvars:
        raise ValueError(f"expected {p.nvars} images, got {len(images)}")
    if not images:
        return p
    m = images[0].nvars
    if any(q.nvars != m for q in images):
        raise ValueError("images must share a common number of variables")
    if homogeneous and p.degree > 0:
        if not p.is_homogeneous:
            raise ValueError("polynomial flagged homogeneous is not")
        used = [images[i] for i in p.used_vars() if images[i]]
        degs = {q.degree for q in used}
        if any(not q.is_homogeneous for q in used) or len(degs) > 1:
            raise ValueError("images of a homogeneous polynomial must be homogeneous of one degree")
    if cache is None:
        cache = {}
    one = Poly.const(m, 1)

    def power(i: int, k: int) -> Poly:
        key = ("pow", i, k)
        r = cache.get(key)
        if r is None:
            if k == 0:
                r = one
            elif k == 1:
                r = images[i]
            else:
                h = power(i, k // 2)
                r = mul(h, h, max_terms)
                if k % 2:
                    r = mul(r, images[i], max_terms)
            cache[key] = r
        return r

    def prefix(e: Exponent) -> Poly:
        # product of images[i]**e[i] over the leading positions of e
        if not e:
            return one
        key = ("pre", e)
        r = cache.get(key)
        if r is None:
            head = prefix(e[:-1])
            k = e[-1]
            if k == 0:
                r = head
            elif head is one:
                r = power(len(e) - 1, k)
            else:
                r = mul(head, power(len(e) - 1, k), max_terms)
            cache[key] = r
        return r

    acc: dict[Exponent, Coeff] = {}
    for e, c in p.terms:
        last = max((i for i, k in enumerate(e) if k), default=-1)
        term = prefix(e[: last + 1])
        for f, v in term._d.items():
            s = acc.get(f, 0) + c * v
            if s:
                acc[f] = s
            else:
                del acc[f]
    return Poly._raw(m, {f: as_coeff(c) for f, c in acc.items()})


def determinant(matrix: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a square matrix of polynomials by minor expansion."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix is not square")
    if n == 0:
        raise ValueError("empty matrix")
    nv = matrix[0][0].nvars
    memo: dict[int, Poly] = {}

    def minor(row: int, cols: int) -> Poly:
        # determinant of rows row..n-1 restricted to the column bitmask cols
        if row == n:
            return Poly.const(nv, 1)
        if cols in memo:
            return memo[cols]
        total = Poly.zero(nv)
        sign = 1
        for j in range(n):
            if cols >> j & 1:
                a = matrix[row][j]
                if a:
                    sub = minor(row + 1, cols & ~(1 << j))
                    term = a * sub
                    total = total + term if sign > 0 else total - term
                sign = -sign
        memo[cols] = total
        return total

    return minor(0, (1 << n) - 1)


def jacobian_det(coords: Sequence[Poly]) -> Poly:
    """Determinant of the Jacobian matrix of k+1 homogeneous forms in k+1 variables."""
    n = len(coords)
    if any(c.nvars != n for c in coords):
        raise ValueError("jacobian_det needs k+1 forms in k+1 variables")
    degs = {c.degree for c in coords if c}
    if len(degs) > 1 or any(c and not c.is_homogeneous for c in coords):
        raise ValueError("coordinates must be homogeneous of one common degree")
    return determinant([[c.diff(j) for j in range(n)] for c in coords])
