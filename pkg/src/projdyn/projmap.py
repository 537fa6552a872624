"""Rational maps of projective space.

A map of P^k is stored as a reduced tuple of k+1 homogeneous forms of one
degree in k+1 variables.  Composition substitutes coordinates and removes the
common factor of the result; that factor is the degree-drop witness.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .gcd import gcd_list
from .poly import BudgetExceeded, Coeff, Poly, as_coeff, default_names, divide_exact, format_poly, substitute
from .parser import parse_poly

CONVENTION = "compose(f, g) = g o f: f is applied first"
DEFAULT_TERM_BUDGET = 10**7


def default_term_budget() -> int:
    return int(os.environ.get("PROJDYN_TERM_BUDGET", DEFAULT_TERM_BUDGET))


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^k scaled so that its first nonzero coordinate is 1."""

    coords: tuple[Coeff, ...]

    def __post_init__(self):
        vals = [as_coeff(c) for c in self.coords]
        lead = next((c for c in vals if c), None)
        if lead is None:
            raise ValueError("all coordinates of a projective point are zero")
        object.__setattr__(self, "coords", tuple(as_coeff(Fraction(c) / lead) for c in vals))

    @classmethod
    def of(cls, *coords) -> "ProjPoint":
        return cls(tuple(coords))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __str__(self) -> str:
        return "[" + ":".join(str(c) for c in self.coords) + "]"


@dataclass(frozen=True)
class IndeterminateAt:
    """Returned by :func:`evaluate` when every coordinate vanishes at ``point``."""

    point: ProjPoint


@dataclass(frozen=True, eq=False)
class RationalMapPk:
    """A reduced rational map of P^k.

    Build instances with :func:`normalize` (or :meth:`from_strings`); the raw
    constructor trusts its input to be reduced and canonically scaled.
    """

    coords: tuple[Poly, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.coords)
        if n < 2:
            raise ValueError("a map of P^k needs at least two coordinates")
        if any(c.nvars != n for c in self.coords):
            raise ValueError(f"coordinates of a map of P^{n - 1} must be forms in {n} variables")
        if not self.names:
            object.__setattr__(self, "names", tuple(default_names(n)))
        elif len(self.names) != n:
            raise ValueError("wrong number of variable names")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.coords)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMapPk) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def strings(self) -> list[str]:
        return [format_poly(c, self.names) for c in self.coords]

    def __str__(self) -> str:
        return "[" + " : ".join(self.strings()) + "]"

    def to_json(self) -> dict:
        return {"dim": self.dim, "vars": list(self.names), "coords": self.strings()}

    @classmethod
    def from_json(cls, data: dict) -> "RationalMapPk":
        names = list(data["vars"])
        coords = [parse_poly(s, names) for s in data["coords"]]
        if "dim" in data and data["dim"] != len(coords) - 1:
            raise ValueError("dim does not match the number of coordinates")
        return normalize(coords, names)

    @classmethod
    def from_strings(cls, coords: Sequence[str], names: Sequence[str] | None = None) -> "RationalMapPk":
        names = list(names) if names else default_names(len(coords))
        return normalize([parse_poly(s, names) for s in coords], names)


def identity_map(k: int, names: Sequence[str] | None = None) -> RationalMapPk:
    n = k + 1
    return RationalMapPk(tuple(Poly.var(n, i) for i in range(n)), tuple(names or ()))


def _scale_jointly(coords: Sequence[Poly]) -> tuple[Poly, ...]:
    # one common rational factor for all coordinates: integer, coprime, first
    # nonzero coordinate with positive leading coefficient
    from math import gcd, lcm

    vals = [c for p in coords for _, c in p.terms]
    den = lcm(*(Fraction(c).denominator for c in vals))
    num = gcd(*(int(c * den) for c in vals))
    s = Fraction(num, den)
    first = next(p for p in coords if p)
    if first.leading_coeff < 0:
        s = -s
    return tuple(p.scale(1 / s) for p in coords)


def _check_forms(coords: Sequence[Poly]) -> int:
    if not coords:
        raise ValueError("no coordinates")
    nz = [c for c in coords if c]
    if not nz:
        raise ValueError("all coordinates are zero")
    degs = {c.degree for c in nz}
    if len(degs) != 1 or any(not c.is_homogeneous for c in nz):
        raise ValueError(f"coordinates must be homogeneous of one degree, got degrees {sorted(degs)}")
    return degs.pop()


def normalize(coords: Sequence[Poly], names: Sequence[str] | None = None) -> RationalMapPk:
    """Divide out the common factor and content of a coordinate tuple."""
    coords = list(coords)
    _check_forms(coords)
    g = gcd_list(coords)
    if not g.is_constant:
        coords = [divide_exact(c, g) for c in coords]
    return RationalMapPk(_scale_jointly(coords), tuple(names or ()))


def _check_dims(f: RationalMapPk, x) -> None:
    if f.dim != x.dim:
        raise ValueError(f"dimension mismatch: P^{f.dim} vs P^{x.dim}")


def evaluate(f: RationalMapPk, p: ProjPoint) -> ProjPoint | IndeterminateAt:
    _check_dims(f, p)
    vals = [c.evaluate(p.coords) for c in f.coords]
    if not any(vals):
        return IndeterminateAt(p)
    return ProjPoint(tuple(vals))


def is_indeterminate(f: RationalMapPk, p: ProjPoint) -> bool:
    _check_dims(f, p)
    return all(c.evaluate(p.coords) == 0 for c in f.coords)


@dataclass(frozen=True)
class CompositionReport:
    raw_degree: int
    raw: tuple[Poly, ...]
    dropped_factor: Poly
    reduced: RationalMapPk
    convention: str = CONVENTION

    @property
    def dropped_degree(self) -> int:
        return self.dropped_factor.degree

    def to_json(self) -> dict:
        names = self.reduced.names
        return {
            "convention": self.convention,
            "raw_degree": self.raw_degree,
            "dropped_factor": format_poly(self.dropped_factor, names),
            "dropped_degree": self.dropped_degree,
            "reduced_degree": self.reduced.degree,
            "reduced": self.reduced.to_json(),
        }


def raw_compose(f: RationalMapPk, g: RationalMapPk, max_terms: int | None = None) -> tuple[Poly, ...]:
    """Coordinates of g(f(x)) before any cancellation."""
    _check_dims(f, g)
    cache: dict = {}
    return tuple(substitute(c, f.coords, max_terms=max_terms, cache=cache, homogeneous=True) for c in g.coords)


def compose(f: RationalMapPk, g: RationalMapPk, max_terms: int | None = None) -> CompositionReport:
    """Reduced g o f together with the factor that had to be removed."""
    raw = raw_compose(f, g, max_terms)
    if not any(raw):
        raise ValueError("composition is identically zero (f maps into I_g entirely)")
    dropped = gcd_list(raw)
    reduced = normalize([divide_exact(c, dropped) for c in raw], f.names)
    return CompositionReport(f.degree * g.degree, raw, dropped, reduced)


def degree_drop_witness(f: RationalMapPk, g: RationalMapPk) -> Poly | None:
    """The nonconstant common factor of the raw composition, if any."""
    d = compose(f, g).dropped_factor
    return None if d.is_constant else d


def collapses_into_indeterminacy(f: RationalMapPk, g: RationalMapPk, H: Poly) -> bool:
    """True iff ``H`` divides every raw coordinate of g o f.

    For irreducible ``H`` this says f sends the hypersurface {H = 0}, off I_f,
    into I_g.
    """
    if H.is_constant:
        raise ValueError("H must be a nonconstant form")
    if not H.is_homogeneous:
        raise ValueError("H must be homogeneous")
    if H.nvars != f.dim + 1:
        raise ValueError("H lives in the wrong number of variables")
    return all(divide_exact(c, H) is not None for c in raw_compose(f, g))


def image_of_hyperplane(f: RationalMapPk, H: Poly) -> ProjPoint | None:
    """Point to which f collapses the hyperplane {H = 0}, or None if not collapsed."""
    n = f.dim + 1
    if H.nvars != n:
        raise ValueError("H lives in the wrong number of variables")
    if not H or H.degree != 1 or not H.is_homogeneous:
        raise ValueError("only linear forms are supported")
    lin = [H.coeff(tuple(int(i == j) for i in range(n))) for j in range(n)]
    j = max(i for i, c in enumerate(lin) if c)
    # x_j = -(sum of other terms) / c_j parametrizes the hyperplane by the other variables
    sol = Poly.zero(n)
    for i, c in enumerate(lin):
        if i != j and c:
            sol = sol + Poly.var(n, i).scale(Fraction(-c) / lin[j])
    images = [sol if i == j else Poly.var(n, i) for i in range(n)]
    cache: dict = {}
    restricted = [substitute(c, images, cache=cache) for c in f.coords]
    if not any(restricted):
        raise ValueError("the hyperplane lies in the indeterminacy set")
    g = gcd_list(restricted)
    reduced = [divide_exact(c, g) for c in restricted]
    if all(c.is_constant for c in reduced):
        return ProjPoint(tuple(c.constant_value() if c else 0 for c in reduced))
    return None


# -- iteration ----------------------------------------------------------------


@dataclass(frozen=True)
class Budget:
    """Limits for iterate_degrees: term products per multiplication and wall-clock seconds."""

    max_terms: int = field(default_factory=default_term_budget)
    max_seconds: float | None = None


@dataclass(frozen=True)
class DegreeStep:
    n: int
    deg: int
    dropped: int


@dataclass
class DegreeSequence:
    entries: list[DegreeStep]
    requested: int
    complete: bool = True
    reason: str | None = None

    @property
    def degrees(self) -> list[int]:
        return [e.deg for e in self.entries]

    def to_json(self) -> dict:
        return {
            "requested": self.requested,
            "complete": self.complete,
            "reason": self.reason,
            "entries": [{"n": e.n, "deg": e.deg, "dropped_degree_at_step": e.dropped} for e in self.entries],
        }


def iterate_degrees(f: RationalMapPk, N: int, budget: Budget | None = None) -> DegreeSequence:
    """Degrees of the reduced iterates f, f^2, ..., f^N.

    Each step composes the previous reduced iterate with f and reduces again.
    Running out of budget stops early with ``complete=False``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    budget = budget or Budget()
    start = time.monotonic()
    entries = [DegreeStep(1, f.degree, 0)]
    current = f
    for n in range(2, N + 1):
        if budget.max_seconds is not None and time.monotonic() - start > budget.max_seconds:
            return DegreeSequence(entries, N, False, f"time budget of {budget.max_seconds}s exhausted before n={n}")
        try:
            rep = compose(current, f, max_terms=budget.max_terms)
        except BudgetExceeded as exc:
            return DegreeSequence(entries, N, False, f"term budget exhausted at n={n}: {exc}")
        current = rep.reduced
        deg = current.degree
        entries.append(DegreeStep(n, deg, entries[-1].deg * f.degree - deg))
    return DegreeSequence(entries, N)


def is_one_stable_upto(f: RationalMapPk, N: int, budget: Budget | None = None) -> tuple[bool, int | None]:
    """(True, None) if deg(f^n) = deg(f)^n for all n <= N, else (False, first n with a drop).

    Raises BudgetExceeded if the budget runs out before a drop is seen.
    """
    seq = iterate_degrees(f, N, budget)
    d = f.degree
    for e in seq.entries:
        if e.deg != d**e.n:
            return False, e.n
    if not seq.complete:
        raise BudgetExceeded(seq.reason)
    return True, None
