"""Randomized count of the generic fiber of a rational map of P^2.

The count estimates the topological degree.  It is evidence rather than proof:
a sample can under-count when the random choices are special, so callers take
the maximum over several seeds (see :func:`fiber_count_estimate`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .gcd import gcd_list, resultant
from .poly import Poly, divide_exact, substitute
from .projmap import RationalMapPk


class DegenerateSample(ArithmeticError):
    """The random choices hit a special configuration; retry with another seed."""


@dataclass
class FiberCertificate:
    seed: int
    transform: list[list[int]]
    target: list[int]
    eliminant: list[int | str]
    base_factor_degree: int
    roots: list[complex] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "transform": self.transform,
            "target": self.target,
            "eliminant_coeffs_low_to_high": [str(c) for c in self.eliminant],
            "base_factor_degree": self.base_factor_degree,
            "numeric_u1_roots": [[round(r.real, 12), round(r.imag, 12)] for r in self.roots],
        }


def _random_invertible(rng: random.Random) -> list[list[int]]:
    while True:
        T = [[rng.randint(-9, 9) for _ in range(3)] for _ in range(3)]
        det = (
            T[0][0] * (T[1][1] * T[2][2] - T[1][2] * T[2][1])
            - T[0][1] * (T[1][0] * T[2][2] - T[1][2] * T[2][0])
            + T[0][2] * (T[1][0] * T[2][1] - T[1][1] * T[2][0])
        )
        if det:
            return T


def _nonzero(rng: random.Random) -> int:
    while True:
        v = rng.randint(-50, 50)
        if v:
            return v


def _strip_common(R: Poly, S: Poly) -> tuple[Poly, int]:
    """Remove from R every factor it shares with S (with multiplicity)."""
    removed = 0
    while True:
        g = gcd_list([R, S])
        if g.is_constant:
            return R, removed
        removed += g.degree
        R = divide_exact(R, g)


def fiber_count_probe_p2(f: RationalMapPk, seed: int = 0) -> tuple[int, FiberCertificate]:
    """Number of preimages of a random point of P^2 under ``f``.

    Steps: a random linear change of coordinates T, a random target y, the
    affine fiber equations y3*F1 - y1*F3 = y3*F2 - y2*F3 = 0 in the chart x3 = 1,
    elimination of x2 by a resultant, removal of the roots coming from base
    points of f, and a squarefreeness check.  The count is the degree of what
    remains.  Raises DegenerateSample when any genericity check fails.
    """
    if f.dim != 2:
        raise ValueError("fiber_count_probe_p2 needs a map of P^2")
    rng = random.Random(seed)
    T = _random_invertible(rng)
    lin = [sum((Poly.var(3, j).scale(T[i][j]) for j in range(3)), Poly.zero(3)) for i in range(3)]
    cache: dict = {}
    G = [substitute(c, lin, cache=cache) for c in f.coords]
    y = [_nonzero(rng) for _ in range(3)]
    A = G[0].scale(y[2]) - G[2].scale(y[0])
    B = G[1].scale(y[2]) - G[2].scale(y[1])
    if not A or not B:
        raise DegenerateSample("target lies on a coordinate relation of f")
    d = A.degree
    x2pow = tuple(int(i == 1) * d for i in range(3))
    if A.coeff(x2pow) == 0 or B.coeff(x2pow) == 0:
        raise DegenerateSample("fiber equations are not monic in the eliminated variable")
    # common zeros on the line at infinity x3 = 0 would be lost in the affine chart
    at_inf = [substitute(p, [Poly.var(3, 0), Poly.var(3, 1), Poly.zero(3)]) for p in (A, B)]
    if resultant(at_inf[0], at_inf[1], 1).evaluate((1, 0, 0)) == 0:
        raise DegenerateSample("fiber meets the line at infinity")
    chart = [Poly.var(3, 0), Poly.var(3, 1), Poly.const(3, 1)]
    a, b = substitute(A, chart), substitute(B, chart)
    R = resultant(a, b, 1)
    if not R:
        raise DegenerateSample("eliminant vanishes identically")
    # base points: common zeros of two random combinations of the coordinates
    combos = []
    for _ in range(2):
        w = [_nonzero(rng) for _ in range(3)]
        combos.append(substitute(sum((g.scale(wi) for g, wi in zip(G, w)), Poly.zero(3)), chart))
    Rb = resultant(combos[0], combos[1], 1)
    if not Rb:
        raise DegenerateSample("base-point eliminant vanishes identically")
    R, removed = _strip_common(R, Rb)
    if R.degree > 0 and not gcd_list([R, R.diff(0)]).is_constant:
        raise DegenerateSample("target lies on the branch locus")
    coeffs = [R.coeff((i, 0, 0)) for i in range(R.degree + 1)]
    roots = [complex(r) for r in np.roots([float(c) for c in reversed(coeffs)])] if R.degree > 0 else []
    cert = FiberCertificate(seed, T, y, coeffs, removed, roots)
    return R.degree, cert


@dataclass
class FiberEstimate:
    count: int
    seeds_used: list[int]
    degenerate_seeds: list[int]
    per_seed: list[int]

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "seeds_used": self.seeds_used,
            "degenerate_seeds": self.degenerate_seeds,
            "per_seed": self.per_seed,
        }


def fiber_count_estimate(f: RationalMapPk, seeds=range(5), max_retries: int = 20) -> FiberEstimate:
    """Maximum of :func:`fiber_count_probe_p2` over seeds; degenerate seeds are replaced."""
    used, bad, counts = [], [], []
    pending = list(seeds)
    spare = max(pending, default=-1) + 1
    retries = 0
    while pending:
        s = pending.pop(0)
        try:
            n, _ = fiber_count_probe_p2(f, s)
        except DegenerateSample:
            bad.append(s)
            retries += 1
            if retries > max_retries:
                raise
            pending.append(spare)
            spare += 1
            continue
        used.append(s)
        counts.append(n)
    return FiberEstimate(max(counts), used, bad, counts)
