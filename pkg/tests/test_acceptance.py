"""Acceptance checks, one test per criterion.

Each test is timed against its runtime limit.  A PASS/FAIL line per criterion
is printed in the pytest terminal summary (and immediately with ``-s``).
Run ``pytest tests/test_acceptance.py --run-slow`` to include deg(f0^3).
"""

import functools
import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from projdyn.builders import (
    alpha0,
    cremona_p2,
    cremona_p3,
    f0,
    graph_identity_check,
    henon,
    henon_inverse,
    henon_relations,
    henon_symbolic,
    s0,
)
from projdyn.cohom import (
    CohomClass,
    DegreeVector,
    ProductRing,
    composed_correspondence_class,
    excess_class,
    graph_class,
    nonfunctoriality_witness,
    pushpull_check,
    support_satisfies,
    vanishing_check,
)
from projdyn.fiber import fiber_count_estimate
from projdyn.parser import parse_poly
from projdyn.poly import Poly, divide_exact
from projdyn.projmap import (
    ProjPoint,
    collapses_into_indeterminacy,
    compose,
    degree_drop_witness,
    evaluate,
    identity_map,
    image_of_hyperplane,
    is_indeterminate,
    iterate_degrees,
)
from projdyn.spectral import CharPolynomial, lambda1_from_degrees, largest_real_root, monomial_dynamical_degrees

RESULTS: dict[int, str] = {}
EPS = Fraction(1, 10**6)
X4 = ["x1", "x2", "x3", "x4"]


def criterion(number: int, title: str, limit: float):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            t0 = time.perf_counter()
            status = "FAIL"
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - t0
                assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
                status = "PASS"
            finally:
                elapsed = time.perf_counter() - t0
                line = f"criterion {number:2d}: {status}  {title}  ({elapsed:.2f}s, limit {limit:g}s)"
                RESULTS[number] = line
                print(line)

        return wrapper

    return deco


@criterion(1, "largest root of z^4 - z^3 - 4z - 8 in [2.3461, 2.3463], width <= 1e-6", 1)
def test_c01_lambda1_polynomial():
    e = largest_real_root(CharPolynomial.parse("z^4 - z^3 - 4*z - 8"), EPS)
    assert e.certified and e.width <= EPS
    assert Fraction("2.3461") <= e.lower <= e.upper <= Fraction("2.3463")


@criterion(2, "largest root of the degree-9 polynomial in [4.6657, 4.6659]", 1)
def test_c02_lambda2_polynomial():
    p = CharPolynomial.parse("z^9 - 3*z^8 - 16*z^6 - 192*z^5 + 384*z^4 + 128*z^3 + 6144*z - 8192")
    e = largest_real_root(p, EPS)
    assert e.certified and e.width <= EPS
    assert Fraction("4.6657") <= e.lower <= e.upper <= Fraction("4.6659")


@criterion(3, "Henon graph generators and four-equation system vanish on Y = h(X)", 1)
def test_c03_henon_graph_identities():
    coords = henon_symbolic()
    assert graph_identity_check(coords, henon_relations("generators"), params=2)
    assert graph_identity_check(coords, henon_relations("system"), params=2)
    assert len(henon_relations("generators")) == 2 and len(henon_relations("system")) == 4


@criterion(4, "I_h contains [0:1:0]; h([1:t:0]) = [1:0:0] for 10 random t", 1)
def test_c04_henon_geometry():
    h = henon(1, 0)
    assert is_indeterminate(h, ProjPoint.of(0, 1, 0))
    rng = random.Random(2024)
    for _ in range(10):
        t = Fraction(rng.choice([-1, 1]) * rng.randint(1, 10**6), rng.randint(1, 10**3))
        assert evaluate(h, ProjPoint.of(1, t, 0)) == ProjPoint.of(1, 0, 0)


@criterion(5, "Henon degree sequence (2, 4, 8, 16, 32) with zero drops", 10)
def test_c05_henon_stability():
    seq = iterate_degrees(henon(1, 0), 5)
    assert seq.complete and seq.degrees == [2, 4, 8, 16, 32]
    assert [e.dropped for e in seq.entries] == [0] * 5


@criterion(6, "Cremona P^3: raw degree 9, dropped (x1x2x3x4)^2, reduced identity, collapse checks", 5)
def test_c06_cremona_involution():
    s = cremona_p3()
    rep = compose(s, s)
    assert rep.raw_degree == 9
    assert rep.dropped_factor == parse_poly("x1^2*x2^2*x3^2*x4^2", X4)
    assert rep.reduced == identity_map(3)
    w = degree_drop_witness(s, s)
    assert w is not None and not w.is_constant
    for i in range(4):
        assert collapses_into_indeterminacy(s, s, Poly.var(4, i))


@criterion(7, "h^-1 o h = identity with dropped degree 3; fiber probe gives 1 over 5 seeds", 5)
def test_c07_henon_birational():
    h, hi = henon(1, 0), henon_inverse(1, 0)
    rep = compose(h, hi)
    assert rep.reduced == identity_map(2) and rep.dropped_degree == 3
    est = fiber_count_estimate(h, range(5))
    assert len(est.seeds_used) == 5 and est.per_seed == [1] * 5 and est.count == 1


@criterion(8, "alpha0 collapse table with indeterminacy of the first three images", 5)
def test_c08_collapse_table():
    a = alpha0()
    table = [
        ("x4", ProjPoint.of(1, 0, 0, 0)),
        ("x1 - x4", ProjPoint.of(1, 1, 1, 1)),
        ("x2 - x4", ProjPoint.of(0, 0, 1, 0)),
        ("x3 - x4", ProjPoint.of(0, 0, 0, 1)),
    ]
    for H, pt in table:
        assert image_of_hyperplane(a, parse_poly(H, X4)) == pt
    assert [is_indeterminate(a, pt) for _, pt in table] == [True, True, True, False]


@criterion(9, "deg(f0) = 6 with constant gcd; deg(f0^2) = 16 and 16^(1/2) >= 2.3461", 60)
def test_c09_f0_degrees():
    assert f0().degree == 6
    assert degree_drop_witness(s0(), alpha0()) is None
    seq = iterate_degrees(f0(), 2)
    assert seq.complete and seq.degrees == [6, 16]
    est = lambda1_from_degrees(seq, EPS)
    assert all(e.lower >= Fraction("2.3461") for _, e in est.per_n)


@pytest.mark.slow
@criterion(9, "(optional) deg(f0^3) = 44 and 44^(1/3) >= 2.3461", 600)
def test_c09b_f0_cubed():
    seq = iterate_degrees(f0(), 3)
    assert seq.complete and seq.degrees == [6, 16, 44]
    est = lambda1_from_degrees(seq, EPS)
    assert all(e.lower >= Fraction("2.3461") for _, e in est.per_n)


@criterion(10, "graph(u) o graph(v) = graph(uv) exhaustively; Cremona excess (0,8,8,0) with witness h", 10)
def test_c10_composition_calculus():
    for k in (1, 2, 3):
        vecs = [DegreeVector(v) for v in itertools.product((1, 2, 3), repeat=k + 1)]
        for u in vecs:
            gu = graph_class(u)
            for v in vecs:
                assert composed_correspondence_class(gu, graph_class(v)) == graph_class(u * v)
    c = graph_class(DegreeVector((1, 3, 3, 1)))
    e = excess_class(c, c, DegreeVector((1, 1, 1, 1)))
    assert [e.coeff((p, 3 - p)) for p in range(4)] == [0, 8, 8, 0]
    assert nonfunctoriality_witness(e) == ProductRing((3,)).gen(0)


@criterion(11, "push-pull, vanishing lemma on an exhaustive family, excess vanishing at p = 0, k", 30)
def test_c11_lemma_suite():
    for factors in [(1, 1), (2, 2), (3, 3, 3)]:
        assert pushpull_check(ProductRing(factors), exhaustive=True)
    checked = 0
    for k in (1, 2, 3):
        R = ProductRing((k, k))
        for cs in itertools.product((0, 1, 2), repeat=k + 1):
            W = CohomClass(R, {(a, k - a): c for a, c in enumerate(cs)})
            for p in range(k + 1):
                for i in range(2 * k + 1):
                    if support_satisfies(W, p, "pr1") and i < 2 * p:
                        assert vanishing_check(W, i, p, "pr1")
                        checked += 1
                    if support_satisfies(W, p, "pr2") and i > 2 * p:
                        assert vanishing_check(W, i, p, "pr2")
                        checked += 1
    assert checked > 0
    for k in (1, 2, 3):
        for u in itertools.product(range(1, 4), repeat=k):
            for v in itertools.product(range(1, 4), repeat=k):
                for mid in itertools.product(range(0, 4), repeat=k - 1):
                    true = DegreeVector((1, *mid, u[-1] * v[-1]))
                    e = excess_class(graph_class(DegreeVector((1, *u))), graph_class(DegreeVector((1, *v))), true)
                    assert e.coeff((0, k)) == 0 and e.coeff((k, 0)) == 0


@criterion(12, "monomial degrees: -I2 -> (1,1), 2I3 -> (2,4,8), [[2,1],[1,1]] -> golden ratio squared", 5)
def test_c12_monomial_cross_validation():
    lams = monomial_dynamical_degrees([[-1, 0], [0, -1]], EPS)
    assert all(e.contains(1) for e in lams)
    seq = iterate_degrees(cremona_p2(), 4)
    assert seq.degrees == [2, 1, 2, 1]
    assert lambda1_from_degrees(seq, EPS).fekete_min.contains(1)

    lams = monomial_dynamical_degrees([[2, 0, 0], [0, 2, 0], [0, 0, 2]], EPS)
    assert [e.contains(v) for e, v in zip(lams, (2, 4, 8))] == [True] * 3
    degs = iterate_degrees(s0(), 5).degrees
    assert degs == [2**n for n in range(1, 6)]
    assert all(e.contains(2) for _, e in lambda1_from_degrees(degs, EPS).per_n)

    l1, _ = monomial_dynamical_degrees([[2, 1], [1, 1]], EPS)
    assert abs(float(l1.midpoint) - (3 + math.sqrt(5)) / 2) < 1e-6


@criterion(13, "property suites, >= 1000 randomized cases each, fixed seed", 60)
def test_c13_property_suites():
    from tests.test_gcd import test_gcd_divides_and_matches_oracle
    from tests.test_poly import test_canonical_text_round_trip, test_multiply_then_divide_round_trip, test_ring_laws
    from tests.test_projmap import test_composition_commutes_with_evaluation

    for prop in (
        test_ring_laws,
        test_multiply_then_divide_round_trip,
        test_gcd_divides_and_matches_oracle,
        test_composition_commutes_with_evaluation,
        test_canonical_text_round_trip,
    ):
        assert prop._hypothesis_internal_use_settings.max_examples >= 1000
        prop()
