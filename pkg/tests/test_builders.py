import random
from fractions import Fraction

import pytest

from projdyn.builders import (
    alpha0,
    build,
    cremona_p2,
    cremona_p3,
    f0,
    graph_identity_check,
    henon,
    henon_inverse,
    henon_relations,
    henon_symbolic,
    monomial,
    s0,
)
from projdyn.parser import parse_poly
from projdyn.poly import Poly, divide_exact, jacobian_det
from projdyn.projmap import (
    ProjPoint,
    compose,
    degree_drop_witness,
    evaluate,
    identity_map,
    image_of_hyperplane,
    is_indeterminate,
    iterate_degrees,
    raw_compose,
)

X4 = ["x1", "x2", "x3", "x4"]


def P4(text):
    return parse_poly(text, X4)


class TestHenon:
    def test_formula(self):
        assert henon(1, 0).strings() == ["X1^2 - X2*X3", "X1*X3", "X3^2"]

    def test_affine_oracle(self):
        rng = random.Random(11)
        for _ in range(10):
            a, c = Fraction(rng.randint(1, 9), rng.randint(1, 3)), Fraction(rng.randint(-5, 5), rng.randint(1, 3))
            x1, x2 = Fraction(rng.randint(-9, 9)), Fraction(rng.randint(-9, 9))
            img = evaluate(henon(a, c), ProjPoint.of(x1, x2, 1))
            assert img == ProjPoint.of(x1**2 + c - a * x2, x1, 1)

    def test_line_at_infinity(self):
        h = henon(1, 0)
        rng = random.Random(5)
        assert is_indeterminate(h, ProjPoint.of(0, 1, 0))
        for _ in range(10):
            t = Fraction(rng.choice([-1, 1]) * rng.randint(1, 50), rng.randint(1, 7))
            assert evaluate(h, ProjPoint.of(1, t, 0)) == ProjPoint.of(1, 0, 0)

    def test_inverse_requires_a(self):
        with pytest.raises(ValueError):
            henon_inverse(0, 1)

    def test_jacobian_is_multiple_of_x3_cubed(self):
        J = jacobian_det(henon(3, 2).coords)
        x3 = Poly.var(3, 2)
        q = divide_exact(J, x3**3)
        assert q is not None and q.is_constant and q

    @pytest.mark.parametrize("which", ["generators", "system"])
    def test_graph_identities(self, which):
        assert graph_identity_check(henon_symbolic(), henon_relations(which), params=2)

    def test_graph_identity_detects_wrong_relation(self):
        names = ["X1", "X2", "X3", "Y1", "Y2", "Y3", "a", "c"]
        bad = [parse_poly("X3*Y1 - X1*Y2", names)]
        assert not graph_identity_check(henon_symbolic(), bad, params=2)

    def test_identity_on_diagonal(self):
        rel = parse_poly("X1*Y2 - X2*Y1", ["X1", "X2", "X3", "Y1", "Y2", "Y3"])
        assert graph_identity_check(identity_map(2), [rel])

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            graph_identity_check(identity_map(2), [Poly.var(4, 0)])


class TestCremona:
    def test_degrees(self):
        assert cremona_p3().degree == 3
        assert cremona_p3().strings() == ["x2*x3*x4", "x1*x3*x4", "x1*x2*x4", "x1*x2*x3"]
        assert cremona_p2().strings() == ["x2*x3", "x1*x3", "x1*x2"]

    def test_monomial_of_minus_identity_is_cremona(self):
        assert monomial([[-1, 0], [0, -1]]) == cremona_p2()

    def test_monomial_of_2I_is_squaring(self):
        assert monomial([[2, 0, 0], [0, 2, 0], [0, 0, 2]]) == s0()

    def test_monomial_matrix_shape(self):
        with pytest.raises(ValueError):
            monomial([[1, 2]])


class TestQuadraticBirationalF0:
    def test_alpha0_formula(self):
        a = alpha0()
        expected = [
            "x1*(x2 - x4)*(x3 - x4)",
            "x4*(x2 - x4)*(x3 - x4)",
            "x4*(x2 - x1)*(x3 - x4)",
            "x4*(x2 - x4)*(x3 - x1)",
        ]
        assert list(a.coords) == [P4(s) for s in expected]

    def test_critical_set(self):
        J = jacobian_det(alpha0().coords)
        for h in ("x4", "x1 - x4", "x2 - x4", "x3 - x4"):
            assert divide_exact(J, P4(h)) is not None

    def test_collapse_table(self):
        a = alpha0()
        table = {
            "x4": ProjPoint.of(1, 0, 0, 0),
            "x1 - x4": ProjPoint.of(1, 1, 1, 1),
            "x2 - x4": ProjPoint.of(0, 0, 1, 0),
            "x3 - x4": ProjPoint.of(0, 0, 0, 1),
        }
        for H, pt in table.items():
            assert image_of_hyperplane(a, P4(H)) == pt
        images = list(table.values())
        assert [is_indeterminate(a, p) for p in images] == [True, True, True, False]

    def test_blown_up_points(self):
        for p in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (1, 1, 1, 1)]:
            assert is_indeterminate(alpha0(), ProjPoint.of(*p))

    def test_indeterminacy_lines(self):
        rng = random.Random(2)
        a = alpha0()

        def r():
            return Fraction(rng.randint(-20, 20), rng.randint(1, 5))

        for _ in range(10):
            s, t, u = r(), r(), r()
            lines = [(0, s, t, 0), (s, 0, t, 0), (s, t, 0, 0), (s, s, t, s), (s, t, s, s), (t, s, s, s)]
            for pt in lines:
                if any(pt):
                    assert is_indeterminate(a, ProjPoint.of(*pt)), pt
            off = ProjPoint.of(s, t, u, 1)
            if len({s, t, u, 1}) == 4 and 0 not in (s, t, u):
                assert not is_indeterminate(a, off)

    def test_f0_degree_and_no_drop(self):
        assert f0().degree == 6
        assert degree_drop_witness(s0(), alpha0()) is None
        assert compose(s0(), alpha0()).raw_degree == 6

    def test_preimage_of_indeterminacy_spot_check(self):
        raw = raw_compose(s0(), alpha0())
        rng = random.Random(4)
        for _ in range(10):
            s, t = rng.randint(1, 9), rng.randint(1, 9)
            for e1 in (1, -1):
                for e2 in (1, -1):
                    for pt in [(s, e1 * s, t, e2 * s), (s, t, e1 * s, e2 * s)]:
                        assert all(c.evaluate(pt) == 0 for c in raw)

    def test_f0_squared_degree_is_pinned(self):
        seq = iterate_degrees(f0(), 2)
        assert seq.degrees == [6, 16]
        assert seq.entries[1].dropped == 20
        assert Fraction(16) >= Fraction(23461, 10000) ** 2

    @pytest.mark.slow
    def test_f0_cubed_degree(self):
        seq = iterate_degrees(f0(), 3)
        assert seq.degrees == [6, 16, 44]
        assert 44 >= Fraction(23461, 10000) ** 3


class TestBuild:
    def test_by_name(self):
        assert build("henon", a="2", c="1/3") == henon(2, Fraction(1, 3))
        assert build("cremona_p3") == cremona_p3()

    def test_unknown(self):
        with pytest.raises(ValueError):
            build("nope")
