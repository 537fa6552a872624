"""Constructors for the explicit maps used throughout the package.

``henon`` and ``henon_inverse`` take rational parameters; :func:`henon_symbolic`
returns the Hénon coordinates with ``a`` and ``c`` as two extra variables for
identities that must hold for all parameter values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .parser import parse_poly
from .poly import Poly, as_coeff, substitute
from .projmap import RationalMapPk, compose, identity_map, normalize

P2 = ["X1", "X2", "X3"]
P3 = ["x1", "x2", "x3", "x4"]


def _map(coords: Sequence[str], names: Sequence[str], params: dict | None = None) -> RationalMapPk:
    polys = [parse_poly(s, list(names) + list(params or {})) for s in coords]
    if params:
        values = [Poly.var(len(names), i) for i in range(len(names))]
        values += [Poly.const(len(names), v) for v in params.values()]
        polys = [substitute(p, values) for p in polys]
    return normalize(polys, names)


def henon(a=1, c=0) -> RationalMapPk:
    """[X1^2 + c X3^2 - a X2 X3 : X1 X3 : X3^2], the homogenized map (x1^2 + c - a x2, x1)."""
    a, c = as_coeff(a), as_coeff(c)
    return _map(["X1^2 + c*X3^2 - a*X2*X3", "X1*X3", "X3^2"], P2, {"a": a, "c": c})


def henon_inverse(a=1, c=0) -> RationalMapPk:
    """Inverse of :func:`henon`: (y1, y2) -> (y2, (y2^2 + c - y1)/a), homogenized."""
    a, c = as_coeff(a), as_coeff(c)
    if a == 0:
        raise ValueError("the Hénon map is invertible only for a != 0")
    return _map(["a*X2*X3", "X2^2 + c*X3^2 - X1*X3", "a*X3^2"], P2, {"a": a, "c": c})


HENON_SYMBOLIC_VARS = ["X1", "X2", "X3", "a", "c"]


def henon_symbolic() -> list[Poly]:
    """Hénon coordinates as polynomials in X1, X2, X3, a, c."""
    return [parse_poly(s, HENON_SYMBOLIC_VARS) for s in ("X1^2 + c*X3^2 - a*X2*X3", "X1*X3", "X3^2")]


def cremona_p3() -> RationalMapPk:
    return _map(["x2*x3*x4", "x1*x3*x4", "x1*x2*x4", "x1*x2*x3"], P3)


def cremona_p2() -> RationalMapPk:
    return _map(["x2*x3", "x1*x3", "x1*x2"], ["x1", "x2", "x3"])


def alpha0() -> RationalMapPk:
    return _map(
        [
            "x1*(x2-x4)*(x3-x4)",
            "x4*(x2-x4)*(x3-x4)",
            "x4*(x2-x1)*(x3-x4)",
            "x4*(x2-x4)*(x3-x1)",
        ],
        P3,
    )


def s0() -> RationalMapPk:
    return _map(["x1^2", "x2^2", "x3^2", "x4^2"], P3)


def f0() -> RationalMapPk:
    """alpha0 o s0 (squaring first)."""
    return compose(s0(), alpha0()).reduced


def monomial(M: Sequence[Sequence[int]]) -> RationalMapPk:
    """Homogenization of the torus map x -> x^M on P^k (affine chart x_{k+1} = 1).

    Row i of ``M`` holds the exponents of affine coordinate i.  Negative
    exponents are cleared by multiplying through by a common monomial.
    """
    k = len(M)
    if any(len(row) != k for row in M):
        raise ValueError("exponent matrix must be square")
    n = k + 1
    # affine exponent vectors: coordinate i -> row i, last coordinate -> 0
    vecs = [list(row) for row in M] + [[0] * k]
    low = [min(v[j] for v in vecs) for j in range(k)]
    shifted = [[v[j] - low[j] for j in range(k)] for v in vecs]
    d = max(sum(v) for v in shifted)
    coords = [Poly.monomial(v + [d - sum(v)]) for v in shifted]
    return normalize(coords, default_names_for(n))


def default_names_for(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


BUILDERS = {
    "henon": henon,
    "henon_inverse": henon_inverse,
    "cremona_p3": cremona_p3,
    "cremona_p2": cremona_p2,
    "alpha0": alpha0,
    "s0": s0,
    "f0": f0,
    "monomial": monomial,
    "identity": lambda k=2: identity_map(k),
}


def build(name: str, **params) -> RationalMapPk:
    try:
        fn = BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown builder {name!r}; choose from {sorted(BUILDERS)}") from None
    if name in ("henon", "henon_inverse"):
        params = {k: Fraction(v) for k, v in params.items()}
    return fn(**params)


def graph_identity_check(f, relations: Sequence[Poly], params: int = 0) -> bool:
    """Do all ``relations`` vanish identically on the graph of ``f``?

    ``relations`` are polynomials in X_1..X_n, Y_1..Y_n followed by ``params``
    parameter variables; ``f`` is a map or a sequence of coordinates in
    X_1..X_n plus the same parameters.  Y is replaced by f(X) symbolically.
    """
    coords = list(f.coords) if isinstance(f, RationalMapPk) else list(f)
    n = len(coords)
    m = n + params
    if any(c.nvars != m for c in coords):
        raise ValueError(f"map coordinates must have {m} variables")
    images = [Poly.var(m, i) for i in range(n)] + coords + [Poly.var(m, n + j) for j in range(params)]
    out = True
    for r in relations:
        if r.nvars != 2 * n + params:
            raise ValueError(f"relation must have {2 * n + params} variables, got {r.nvars}")
        if substitute(r, images):
            out = False
    return out


HENON_GRAPH_VARS = ["X1", "X2", "X3", "Y1", "Y2", "Y3", "a", "c"]

# generators of the ideal of the Hénon graph
HENON_GRAPH_GENERATORS = [
    "X3*Y2 - X1*Y3",
    "X3*Y1 - X1*Y2 + a*X2*Y3 - c*X3*Y3",
]

# the four-equation system that cuts out the Hénon graph set-theoretically
HENON_GRAPH_SYSTEM = [
    "Y1*X3^2 - (X1^2*Y3 + c*X3^2*Y3 - a*X2*X3*Y3)",
    "Y2*X3 - X1*Y3",
    "Y1*Y3*X1 - (X1*Y2^2 + c*Y3^2*X1 - a*X2*Y2*Y3)",
    "a*X2*Y3^2 - (X3*Y2^2 + c*X3*Y3^2 - Y1*Y3*X3)",
]


def henon_relations(which: str = "generators") -> list[Poly]:
    src = HENON_GRAPH_GENERATORS if which == "generators" else HENON_GRAPH_SYSTEM
    return [parse_poly(s, HENON_GRAPH_VARS) for s in src]
