"""Künneth calculus on cohomology rings of products of projective spaces.

The cohomology of P^{k_1} x ... x P^{k_m} is the truncated polynomial ring on
hyperplane classes h_1, ..., h_m with h_j^{k_j + 1} = 0.  A class is a sparse
map from exponent vectors to rationals.  Pushing forward along a projection
keeps exactly the terms carrying the point class (top power) on every factor
that is forgotten; every factor has even real dimension, so no signs appear.

A map f of P^k acts on the one-dimensional group H^{p,p}(P^k) by a scalar d_p.
Its graph class is sum_p d_p h_1^p h_2^{k-p}, and pullback is
pr_1*(graph . pr_2^* alpha).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .poly import as_coeff


@dataclass(frozen=True)
class ProductRing:
    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors or any(k < 1 for k in self.factors):
            raise ValueError("factors must be positive dimensions")

    @property
    def dim(self) -> int:
        return sum(self.factors)

    def basis(self, degree: int | None = None) -> Iterator[tuple[int, ...]]:
        """Exponent vectors of basis monomials, optionally of one complex degree."""
        for e in itertools.product(*(range(k + 1) for k in self.factors)):
            if degree is None or sum(e) == degree:
                yield e

    def unit(self) -> "CohomClass":
        return CohomClass(self, {(0,) * len(self.factors): 1})

    def gen(self, j: int, power: int = 1) -> "CohomClass":
        e = [0] * len(self.factors)
        e[j] = power
        return CohomClass(self, {tuple(e): 1})

    def monomial(self, exps: Sequence[int], c=1) -> "CohomClass":
        return CohomClass(self, {tuple(exps): c})

    def point_class(self) -> "CohomClass":
        return self.monomial(self.factors)

    def zero(self) -> "CohomClass":
        return CohomClass(self, {})


class CohomClass:
    """An element of the truncated Künneth ring of a product of projective spaces."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: ProductRing, coeffs: Mapping[tuple[int, ...], object]):
        self.ring = ring
        d = {}
        for e, c in coeffs.items():
            e = tuple(e)
            if len(e) != len(ring.factors):
                raise ValueError(f"exponent vector {e} does not match ring {ring.factors}")
            if any(a < 0 for a in e):
                raise ValueError(f"negative exponent in {e}")
            c = as_coeff(c)
            if c and all(a <= k for a, k in zip(e, ring.factors)):
                d[e] = d.get(e, 0) + c
        self.coeffs = {e: c for e, c in d.items() if c}

    def _same(self, other: "CohomClass"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring.factors} vs {other.ring.factors}")

    def __add__(self, other: "CohomClass") -> "CohomClass":
        self._same(other)
        d = dict(self.coeffs)
        for e, c in other.coeffs.items():
            d[e] = d.get(e, 0) + c
        return CohomClass(self.ring, d)

    def __neg__(self) -> "CohomClass":
        return CohomClass(self.ring, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "CohomClass") -> "CohomClass":
        return self + (-other)

    def __mul__(self, other) -> "CohomClass":
        if isinstance(other, CohomClass):
            return cup(self, other)
        c = as_coeff(other)
        return CohomClass(self.ring, {e: v * c for e, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, CohomClass) and self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, frozenset(self.coeffs.items())))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def coeff(self, e: Sequence[int]):
        return self.coeffs.get(tuple(e), 0)

    def degrees(self) -> set[int]:
        """Complex degrees (half the real degrees) present in the class."""
        return {sum(e) for e in self.coeffs}

    def is_homogeneous_of(self, q: int) -> bool:
        return self.degrees() <= {q}

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in sorted(self.coeffs.items(), reverse=True):
            mono = "*".join(f"h{j + 1}" + (f"^{a}" if a > 1 else "") for j, a in enumerate(e) if a)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "factors": list(self.ring.factors),
            "terms": [{"exps": list(e), "coeff": str(c)} for e, c in sorted(self.coeffs.items(), reverse=True)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CohomClass":
        ring = ProductRing(tuple(data["factors"]))
        return cls(ring, {tuple(t["exps"]): Fraction(t["coeff"]) for t in data["terms"]})


@dataclass(frozen=True)
class DegreeVector:
    """Scalars (d_0, ..., d_k) by which a map acts on H^{p,p}(P^k)."""

    d: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        if len(self.d) < 2:
            raise ValueError("a degree vector needs k + 1 >= 2 entries")
        if any(x < 0 for x in self.d):
            raise ValueError("degree vector entries must be non-negative")

    @property
    def k(self) -> int:
        return len(self.d) - 1

    @property
    def dominant(self) -> bool:
        return self.d[0] == 1

    def __mul__(self, other: "DegreeVector") -> "DegreeVector":
        if self.k != other.k:
            raise ValueError("dimension mismatch")
        return DegreeVector(tuple(a * b for a, b in zip(self.d, other.d)))

    def to_json(self) -> dict:
        return {"k": self.k, "d": list(self.d)}

    @classmethod
    def from_json(cls, data: dict) -> "DegreeVector":
        dv = cls(tuple(data["d"]))
        if "k" in data and data["k"] != dv.k:
            raise ValueError("k does not match the length of d")
        return dv


def cup(a: CohomClass, b: CohomClass) -> CohomClass:
    a._same(b)
    bounds = a.ring.factors
    d: dict = {}
    for ea, ca in a.coeffs.items():
        for eb, cb in b.coeffs.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if all(x <= k for x, k in zip(e, bounds)):
                d[e] = d.get(e, 0) + ca * cb
    return CohomClass(a.ring, d)


def proj_pullback(c: CohomClass, target: ProductRing, embedding: Sequence[int]) -> CohomClass:
    """Pull back along the projection of ``target`` onto the factors listed in ``embedding``.

    ``embedding[j]`` is the index in ``target`` of the j-th factor of ``c``'s ring.
    """
    embedding = list(embedding)
    if len(embedding) != len(c.ring.factors) or len(set(embedding)) != len(embedding):
        raise ValueError("embedding must list one distinct target factor per source factor")
    for j, t in enumerate(embedding):
        if not 0 <= t < len(target.factors) or target.factors[t] != c.ring.factors[j]:
            raise ValueError(f"factor {j} (P^{c.ring.factors[j]}) does not match target factor {t}")
    d = {}
    for e, v in c.coeffs.items():
        f = [0] * len(target.factors)
        for j, t in enumerate(embedding):
            f[t] = e[j]
        d[tuple(f)] = v
    return CohomClass(target, d)


def proj_pushforward(c: CohomClass, kept: Sequence[int]) -> CohomClass:
    """Push forward to the factors in ``kept`` (in that order).

    A term survives only if it carries the top power on every dropped factor.
    """
    kept = list(kept)
    if not kept:
        raise ValueError("must keep at least one factor")
    factors = c.ring.factors
    dropped = [j for j in range(len(factors)) if j not in kept]
    ring = ProductRing(tuple(factors[j] for j in kept))
    d: dict = {}
    for e, v in c.coeffs.items():
        if all(e[j] == factors[j] for j in dropped):
            f = tuple(e[j] for j in kept)
            d[f] = d.get(f, 0) + v
    return CohomClass(ring, d)


def graph_class(dv: DegreeVector) -> CohomClass:
    k = dv.k
    ring = ProductRing((k, k))
    return CohomClass(ring, {(p, k - p): dv.d[p] for p in range(k + 1)})


def degree_vector_of(graph: CohomClass) -> DegreeVector:
    """Inverse of :func:`graph_class` for integral graph classes."""
    k = _square_dim(graph)
    return DegreeVector(tuple(int(graph.coeff((p, k - p))) for p in range(k + 1)))


def _square_dim(c: CohomClass) -> int:
    f = c.ring.factors
    if len(f) != 2 or f[0] != f[1]:
        raise ValueError("expected a class on P^k x P^k")
    return f[0]


def _check_top(c: CohomClass, k: int):
    if not c.is_homogeneous_of(k):
        raise ValueError(f"class must be homogeneous of real degree {2 * k}, has degrees {sorted(2 * q for q in c.degrees())}")


def pullback_action(graph: CohomClass, alpha: CohomClass) -> CohomClass:
    """pr_1*(graph . pr_2^* alpha) for a correspondence class on P^k x P^k."""
    k = _square_dim(graph)
    _check_top(graph, k)
    if alpha.ring.factors != (k,):
        raise ValueError("alpha must live on P^k")
    lifted = proj_pullback(alpha, graph.ring, [1])
    return proj_pushforward(cup(graph, lifted), [0])


def composed_correspondence_class(gf: CohomClass, gg: CohomClass, k: int | None = None) -> CohomClass:
    """rho_2*(rho_1^*[G_f] . rho_3^*[G_g]) computed in P^k x P^k x P^k."""
    kf, kg = _square_dim(gf), _square_dim(gg)
    if kf != kg or (k is not None and k != kf):
        raise ValueError("classes live on different products")
    k = kf
    _check_top(gf, k)
    _check_top(gg, k)
    triple = ProductRing((k, k, k))
    a = proj_pullback(gf, triple, [0, 1])
    b = proj_pullback(gg, triple, [1, 2])
    return proj_pushforward(cup(a, b), [0, 2])


def excess_class(gf: CohomClass, gg: CohomClass, true_dv: DegreeVector) -> CohomClass:
    """Composed correspondence minus the graph class of the actual composition."""
    composed = composed_correspondence_class(gf, gg)
    if true_dv.k != _square_dim(composed):
        raise ValueError("degree vector has the wrong dimension")
    return composed - graph_class(true_dv)


def nonfunctoriality_witness(e: CohomClass) -> CohomClass | None:
    """First basis class h^i with pr_1*(e . pr_2^* h^i) != 0, or None if there is none."""
    k = _square_dim(e)
    _check_top(e, k)
    base = ProductRing((k,))
    for i in range(k + 1):
        alpha = base.gen(0, i) if i else base.unit()
        if pullback_action(e, alpha):
            return alpha
    return None


def vanishing_check(W: CohomClass, alpha_degree: int, p: int, which_bound: str = "pr1") -> bool:
    """Does pr_1*(W . pr_2^* alpha) vanish for every basis alpha of real degree ``alpha_degree``?

    ``p`` and ``which_bound`` name the hypothesis under which vanishing is
    expected; the answer is computed directly and does not assume it.
    """
    k = _square_dim(W)
    _check_top(W, k)
    if which_bound not in ("pr1", "pr2"):
        raise ValueError("which_bound must be 'pr1' or 'pr2'")
    if not 0 <= p <= k:
        raise ValueError("p out of range")
    if alpha_degree % 2 or not 0 <= alpha_degree <= 2 * k:
        return True  # odd cohomology of projective space vanishes
    base = ProductRing((k,))
    i = alpha_degree // 2
    alpha = base.gen(0, i) if i else base.unit()
    return not pullback_action(W, alpha)


def support_satisfies(W: CohomClass, p: int, which_bound: str) -> bool:
    """Class-level form of dim pr_1(W) <= k - p (resp. dim pr_2(W) <= p)."""
    k = _square_dim(W)
    if which_bound == "pr1":
        return all(e[0] >= p for e in W.coeffs)
    return all(e[1] >= k - p for e in W.coeffs)


def pushpull_check(ring: ProductRing, exhaustive: bool = True) -> bool:
    """Projection formula pi_*(pi^* a . b) = a . pi_*(b) over basis pairs.

    Every projection of ``ring`` onto a nonempty proper subset of its factors
    is tested.
    """
    if any(k > 4 for k in ring.factors):
        raise ValueError("pushpull_check is limited to factors of dimension <= 4")
    m = len(ring.factors)
    basis = list(ring.basis())
    subsets = [s for r in range(1, m) for s in itertools.combinations(range(m), r)]
    if not exhaustive:
        subsets = subsets[:1]
    for kept in subsets:
        sub = ProductRing(tuple(ring.factors[j] for j in kept))
        for a in sub.basis():
            ca = sub.monomial(a)
            pulled = proj_pullback(ca, ring, kept)
            for b in basis:
                cb = ring.monomial(b)
                lhs = proj_pushforward(cup(pulled, cb), kept)
                rhs = cup(ca, proj_pushforward(cb, kept))
                if lhs != rhs:
                    return False
    return True
