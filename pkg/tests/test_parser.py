from fractions import Fraction

import pytest

from projdyn.parser import PolySyntaxError, parse_poly, parse_poly_with_names
from projdyn.poly import Poly, format_poly


def test_grammar_features():
    names = ["x", "y"]
    p = parse_poly("2(x + y)^2 - 3/4 x y - y", names)
    expected = Poly(2, {(2, 0): 2, (1, 1): 4 - Fraction(3, 4), (0, 2): 2, (0, 1): -1})
    assert p == expected


def test_names_collected_in_order_of_appearance():
    p, names = parse_poly_with_names("b*a + c")
    assert names == ["b", "a", "c"]
    assert p.nvars == 3


def test_unknown_variable():
    with pytest.raises(PolySyntaxError) as info:
        parse_poly("x1 + q", ["x1"])
    assert info.value.column == 6


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("x1 + * x2", 1, 6),
        ("x1 +\n  (x2", 2, 6),
        ("x1^", 1, 4),
        ("x1 / 2", 1, 4),
        ("1/0", 1, 3),
        ("x1 $ x2", 1, 4),
    ],
)
def test_errors_carry_position(text, line, column):
    with pytest.raises(PolySyntaxError) as info:
        parse_poly(text, ["x1", "x2"])
    assert (info.value.line, info.value.column) == (line, column)


def test_canonical_printing():
    names = ["X1", "X2", "X3"]
    p = parse_poly("X3^2 + c0", ["X1", "X2", "X3", "c0"])
    assert format_poly(p, ["X1", "X2", "X3", "c0"]) == "X3^2 + c0"
    q = parse_poly("-1/2 X1 X2 + X1^2", names)
    assert format_poly(q, names) == "X1^2 - 1/2*X1*X2"
