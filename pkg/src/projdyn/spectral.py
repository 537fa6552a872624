"""Characteristic polynomials, certified root enclosures and dynamical degrees.

Everything exact is done with Python integers and :class:`fractions.Fraction`.
The only floating-point step is the numeric eigenvalue guess inside
:func:`spectral_radius`, which is then checked exactly by a Schur-Cohn count of
the roots inside a disk.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .parser import parse_poly_with_names
from .poly import as_coeff


class NoRealRoot(ValueError):
    pass


IntMatrix = list[list[int]]


def as_int_matrix(rows: Sequence[Sequence]) -> IntMatrix:
    m = [[int(x) for x in row] for row in rows]
    n = len(m)
    if n == 0 or any(len(row) != n for row in m):
        raise ValueError("matrix must be square and nonempty")
    return m


@dataclass(frozen=True)
class CharPolynomial:
    """Polynomial with exact coefficients, highest degree first."""

    coeffs: tuple

    def __post_init__(self):
        c = [as_coeff(x) for x in self.coeffs]
        while len(c) > 1 and c[0] == 0:
            c.pop(0)
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def ascending(self) -> list[Fraction]:
        return [Fraction(c) for c in reversed(self.coeffs)]

    def __call__(self, x):
        r = 0
        for c in self.coeffs:
            r = r * x + c
        return r

    def __str__(self) -> str:
        parts = []
        n = self.degree
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            k = n - i
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            a = abs(c)
            body = str(a) if not mono else (mono if a == 1 else f"{a}*{mono}")
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        if not parts:
            return "0"
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    @classmethod
    def parse(cls, text: str) -> "CharPolynomial":
        p, names = parse_poly_with_names(text)
        if len(names) > 1:
            raise ValueError(f"expected a univariate polynomial, found variables {names}")
        if not names:
            return cls((p.constant_value() if p else 0,))
        deg = p.degree
        return cls(tuple(p.coeff((k,)) for k in range(deg, -1, -1)))


@dataclass(frozen=True)
class RootEnclosure:
    lower: Fraction
    upper: Fraction
    certified: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lower", Fraction(self.lower))
        object.__setattr__(self, "upper", Fraction(self.upper))
        if self.lower > self.upper:
            raise ValueError("lower endpoint exceeds upper endpoint")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, x) -> bool:
        return self.lower <= Fraction(x) <= self.upper

    def __float__(self) -> float:
        return float(self.midpoint)

    def to_json(self) -> dict:
        return {
            "lower": str(self.lower),
            "upper": str(self.upper),
            "decimal": f"{float(self.midpoint):.10f}",
            "certified": self.certified,
        }


# -- characteristic polynomial --------------------------------------------------


def char_poly(M: Sequence[Sequence[int]]) -> CharPolynomial:
    """det(zI - M) by the Faddeev-LeVerrier recurrence with exact division."""
    A = as_int_matrix(M)
    n = len(A)
    coeffs = [1]  # c_n
    Mk = [[0] * n for _ in range(n)]
    c_prev = 1
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        Mk = [[sum(A[i][t] * Mk[t][j] for t in range(n)) + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
        tr = sum(sum(A[i][t] * Mk[t][i] for t in range(n)) for i in range(n))
        q, r = divmod(-tr, k)
        if r:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        coeffs.append(q)
        c_prev = q
    return CharPolynomial(tuple(coeffs))


def int_det(M: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    m = [list(map(int, row)) for row in M]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def exterior_power(M: Sequence[Sequence[int]], p: int) -> IntMatrix:
    """Matrix of p x p minors, rows and columns indexed by sorted subsets."""
    A = as_int_matrix(M)
    n = len(A)
    if not 1 <= p <= n:
        raise ValueError(f"p must lie in 1..{n}")
    subsets = list(itertools.combinations(range(n), p))
    return [[int_det([[A[i][j] for j in cols] for i in rows]) for cols in subsets] for rows in subsets]


def mat_mul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    n = len(A)
    return [[sum(A[i][t] * B[t][j] for t in range(n)) for j in range(len(B[0]))] for i in range(n)]


# -- univariate helpers (ascending Fraction lists) ------------------------------


def _strip(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _peval(a, x):
    r = Fraction(0)
    for c in reversed(a):
        r = r * x + c
    return r


def _pdivmod(a, b):
    a = [Fraction(x) for x in a]
    b = _strip(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / b[-1]
        q[shift] = c
        for i, x in enumerate(b):
            a[i + shift] -= c * x
        a = _strip(a[:-1]) if a[-1] == 0 else _strip(a)
    return _strip(q), a


def _pgcd(a, b):
    a, b = _strip(a), _strip(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return [x / a[-1] for x in a]


def _deriv(a):
    return [i * c for i, c in enumerate(a)][1:]


def squarefree_part(a):
    a = _strip([Fraction(x) for x in a])
    g = _pgcd(a, _deriv(a))
    return _pdivmod(a, g)[0] if len(g) > 1 else a


def _sturm(a):
    seq = [a, _deriv(a)]
    while True:
        r = _pdivmod(seq[-2], seq[-1])[1]
        if not r:
            return seq
        seq.append([-x for x in r])


def _variations(seq, x):
    signs = [v for v in (_peval(s, x) for s in seq) if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u < 0) != (v < 0))


def _cauchy_bound(a) -> Fraction:
    lead = abs(a[-1])
    return 1 + max(abs(Fraction(c)) / lead for c in a[:-1]) if len(a) > 1 else Fraction(1)


def real_root_count(p: CharPolynomial, lo, hi) -> int:
    """Number of distinct real roots in (lo, hi] for lo, hi not roots."""
    q = squarefree_part(p.ascending())
    seq = _sturm(q)
    return _variations(seq, Fraction(lo)) - _variations(seq, Fraction(hi))


_OFFSETS = [Fraction(1, 2), Fraction(3, 7), Fraction(4, 7), Fraction(5, 11), Fraction(6, 11)]


def _split_point(q, lo, hi):
    # a split point that is not itself a root keeps the Sturm counts unambiguous
    for t in _OFFSETS:
        m = lo + (hi - lo) * t
        if _peval(q, m) != 0:
            return m
    return lo + (hi - lo) / 2


def largest_real_root(p: CharPolynomial, eps) -> RootEnclosure:
    """Certified enclosure of width <= eps around the largest real root.

    Sturm sequences of the squarefree part isolate the largest root; sign-change
    bisection then shrinks the isolating interval.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if p.degree < 1:
        raise ValueError("polynomial must be nonconstant")
    q = squarefree_part(p.ascending())
    B = _cauchy_bound(q)
    seq = _sturm(q)
    vb = _variations(seq, B)
    if _variations(seq, -B) - vb == 0:
        raise NoRealRoot(f"{p} has no real roots")
    lo, hi = -B, B
    # invariant: exactly the largest root lies in (lo, hi] once isolated
    while _variations(seq, lo) - vb > 1:
        m = _split_point(q, lo, hi)
        if _variations(seq, m) - vb >= 1:
            lo = m
        else:
            hi = m
    # sign-change bisection on the isolating interval
    flo, fhi = _peval(q, lo), _peval(q, hi)
    if fhi == 0:
        return RootEnclosure(hi, hi)
    while hi - lo > eps:
        m = (lo + hi) / 2
        fm = _peval(q, m)
        if fm == 0:
            return RootEnclosure(m, m)
        if (fm < 0) == (flo < 0):
            lo, flo = m, fm
        else:
            hi, fhi = m, fm
    return RootEnclosure(lo, hi)


# -- spectral radius --------------------------------------------------------------


def roots_in_unit_disk(a) -> int | None:
    """Number of roots strictly inside |z| < 1 (Schur-Cohn), or None if undecided.

    ``a`` is an ascending list of real rational coefficients.  None is returned
    when the reduction hits |a_0| = |a_n|, which in particular happens whenever a
    root lies on the unit circle.
    """
    a = _strip([Fraction(x) for x in a])
    if not a:
        raise ValueError("zero polynomial")
    count = 0
    while len(a) > 1:
        a0, an = a[0], a[-1]
        rev = a[::-1]
        if abs(an) > abs(a0):
            g = [an * x - a0 * y for x, y in zip(a, rev)]
            a = _strip(g[1:])
            count += 1
        elif abs(a0) > abs(an):
            a = _strip([a0 * x - an * y for x, y in zip(a, rev)])
        else:
            return None
    return count


def _scaled(a, r):
    return [c * Fraction(r) ** i for i, c in enumerate(a)]


def spectral_radius(M: Sequence[Sequence[int]], eps) -> RootEnclosure:
    """Enclosure of max |eigenvalue| of width eps.

    A numeric eigenvalue solve gives the centre; the enclosure is certified when
    an exact Schur-Cohn count shows that every root of the characteristic
    polynomial lies strictly inside radius ``upper`` and at least one lies
    outside radius ``lower``.
    """
    eps = Fraction(eps)
    A = as_int_matrix(M)
    n = len(A)
    rho = float(np.max(np.abs(np.linalg.eigvals(np.array(A, dtype=float))))) if n else 0.0
    a = char_poly(A).ascending()
    centre = Fraction(rho)
    half = eps / 2
    lo = max(Fraction(0), centre - half)
    hi = lo + eps if lo == 0 else centre + half
    # nudging a radius inside the enclosure sidesteps the undecided |a_0| = |a_n|
    # case of the Schur-Cohn reduction
    nudges = [Fraction(0), Fraction(1, 7), Fraction(2, 9), Fraction(3, 11)]
    upper_ok = any(roots_in_unit_disk(_scaled(a, hi - t * half)) == n for t in nudges)
    if lo == 0:
        lower_ok = True
    else:
        lower_ok = False
        for t in nudges:
            inside = roots_in_unit_disk(_scaled(a, lo + t * half))
            if inside is not None:
                lower_ok = inside < n
                break
    return RootEnclosure(lo, hi, upper_ok and lower_ok)


def monomial_dynamical_degrees(M: Sequence[Sequence[int]], eps) -> list[RootEnclosure]:
    """lambda_p = spectral radius of the p-th exterior power of the exponent matrix."""
    A = as_int_matrix(M)
    if int_det(A) == 0:
        raise ValueError("exponent matrix is singular: the monomial map is not dominant")
    return [spectral_radius(exterior_power(A, p), eps) for p in range(1, len(A) + 1)]


# -- growth of degree sequences ----------------------------------------------------


def nth_root_enclosure(value: int, n: int, eps) -> RootEnclosure:
    """Exact bisection enclosure of value ** (1/n)."""
    if value < 0 or n < 1:
        raise ValueError("need value >= 0 and n >= 1")
    eps = Fraction(eps)
    r = round(value ** (1.0 / n)) if value else 0
    if r**n == value:
        return RootEnclosure(r, r)
    lo, hi = Fraction(0), Fraction(max(value, 1))
    while hi - lo > eps:
        m = (lo + hi) / 2
        if m**n <= value:
            lo = m
        else:
            hi = m
    return RootEnclosure(lo, hi)


@dataclass
class DegreeGrowthEstimate:
    per_n: list[tuple[int, RootEnclosure]]
    fekete_min: RootEnclosure
    ratios: list[Fraction]

    @property
    def last_ratio(self) -> Fraction | None:
        return self.ratios[-1] if self.ratios else None

    def to_json(self) -> dict:
        return {
            "per_n": [{"n": n, "root": e.to_json()} for n, e in self.per_n],
            "fekete_min": self.fekete_min.to_json(),
            "ratios": [str(r) for r in self.ratios],
            "last_ratio": str(self.last_ratio) if self.last_ratio is not None else None,
        }


def lambda1_from_degrees(seq, eps) -> DegreeGrowthEstimate:
    """deg(f^n)^(1/n) for each n, their minimum, and the successive ratios.

    ``seq`` is a DegreeSequence or a plain list of degrees for n = 1, 2, ...
    """
    degs = seq.degrees if hasattr(seq, "degrees") else list(seq)
    if not degs:
        raise ValueError("empty degree sequence")
    per_n = [(n, nth_root_enclosure(d, n, eps)) for n, d in enumerate(degs, start=1)]
    best = min((e for _, e in per_n), key=lambda e: e.upper)
    ratios = [Fraction(b, a) for a, b in zip(degs, degs[1:])]
    return DegreeGrowthEstimate(per_n, best, ratios)
