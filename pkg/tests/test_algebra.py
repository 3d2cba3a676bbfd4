from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from equiresolve.algebra import (
    Ideal,
    delta,
    dimension,
    gcd_all,
    groebner_basis,
    ideal_contains,
    is_unit_ideal,
    jacobian_rank_at,
    loci_equal,
    locus_contained,
    locus_empty,
    max_order,
    order_at_point,
    poly_ring,
    sing_ideal,
    split_components,
    variable_valuation,
)
from equiresolve.errors import ZeroIdealError
from equiresolve.syntax import PolySyntaxError, format_poly, parse_poly


def P(R, text):
    return parse_poly(text, R)


def sympy_order(texts, names, point):
    """Order of an ideal at a point, straight from the definition."""
    syms = sympy.symbols(names)
    shift = {s: s + sympy.Rational(point[n]) for s, n in zip(syms, names)}
    orders = []
    for t in texts:
        e = sympy.expand(sympy.sympify(t.replace("^", "**")).subs(shift, simultaneous=True))
        if e != 0:
            orders.append(min(sum(m) for m in sympy.Poly(e, *syms).monoms()))
    return min(orders)


# ---------------------------------------------------------------------------
# parsing and printing


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x^2 - y^3", "-y**3 + x**2"),
        ("(x + y)^2", "x**2 + 2*x*y + y**2"),
        ("x**2/2 - 3", "x**2/2 - 3"),
        ("-(x - 1)*(y + 1)", "-x*y - x + y + 1"),
    ],
)
def test_parse_matches_sympy(R2, text, expected):
    f = P(R2, text)
    assert sympy.expand(f.as_expr() - sympy.sympify(expected)) == 0


@pytest.mark.parametrize("text", ["x^2 - y^3", "x*y^2/3 - 7", "-x + 1/2", "0", "(x - y)^3"])
def test_format_parse_round_trip(R2, text):
    f = P(R2, text)
    assert P(R2, format_poly(f)) == f


terms = st.lists(
    st.tuples(st.fractions(min_value=-50, max_value=50, max_denominator=5), st.integers(0, 4), st.integers(0, 4)),
    max_size=6,
)


@settings(max_examples=60, deadline=None)
@given(terms)
def test_printed_polynomials_parse_back(data):
    R = poly_ring(["x", "y"])
    x, y = R.gens
    f = R.zero
    for c, i, j in data:
        f += R.domain.convert(c) * x**i * y**j
    assert parse_poly(format_poly(f), R) == f


@pytest.mark.parametrize(
    "text, position, identifier",
    [("x + z", 4, "z"), ("x +* y", 3, ""), ("(x + y", 6, ""), ("x^y", 2, "")],
)
def test_parse_errors_carry_positions(R2, text, position, identifier):
    with pytest.raises(PolySyntaxError) as info:
        P(R2, text)
    assert info.value.position == position
    assert info.value.identifier == identifier


# ---------------------------------------------------------------------------
# Groebner bases and membership


def test_groebner_agrees_with_sympy(R3):
    texts = ["x^2*y - z", "x*y^2 - x", "y*z - x^3"]
    G = groebner_basis([P(R3, t) for t in texts])
    x, y, z = sympy.symbols("x y z")
    ref = sympy.groebner([sympy.sympify(t.replace("^", "**")) for t in texts], x, y, z, order="grevlex")
    mine = {sympy.Poly(g.as_expr(), x, y, z).monic() for g in G}
    theirs = {sympy.Poly(g, x, y, z).monic() for g in ref.exprs}
    assert mine == theirs


def test_membership_of_combinations(R2):
    f, g = P(R2, "x^2 - y^3"), P(R2, "x*y - 1")
    assert ideal_contains([f, g], f * P(R2, "x + 3") - g * P(R2, "y^2"))
    assert not ideal_contains([f, g], P(R2, "x"))


def test_unit_ideal_and_empty_locus(R2):
    assert is_unit_ideal([P(R2, "x"), P(R2, "x - 1")])
    assert locus_empty([P(R2, "x*y - 1"), P(R2, "y")])
    # V(x) is empty once x is inverted
    assert locus_empty([P(R2, "x")], [P(R2, "x")])
    assert not locus_empty([P(R2, "x - y")], [P(R2, "x")])


def test_locus_containment_is_radical(R2):
    # V(x^2, y) = V(x, y) as sets
    assert loci_equal([P(R2, "x^2"), P(R2, "y")], [P(R2, "x"), P(R2, "y")])
    assert locus_contained([P(R2, "x"), P(R2, "y")], [P(R2, "x*y")])
    assert not locus_contained([P(R2, "x*y")], [P(R2, "x")])


def test_dimension_and_jacobian(R3):
    assert dimension([P(R3, "x"), P(R3, "y")]) == 1
    assert dimension([P(R3, "x^2 + y^2 + z^2 + 1")]) == 2
    assert dimension([P(R3, "x"), P(R3, "x - 1")]) == -1
    assert jacobian_rank_at([P(R3, "x^2 - y"), P(R3, "z")], {"x": 0, "y": 0, "z": 0}) == 2


def test_valuation_and_gcd(R2):
    f = P(R2, "x^3*y - x^2*y^2")
    assert variable_valuation(f, P(R2, "x")) == 2
    assert gcd_all([f, P(R2, "x^2*y^5")]).monic() == P(R2, "x^2*y")


def test_split_components_of_two_lines(R2):
    comps = split_components([P(R2, "x*(x - 1)"), P(R2, "y")])
    assert len(comps) == 2
    points = [[P(R2, "x"), P(R2, "y")], [P(R2, "x - 1"), P(R2, "y")]]
    for comp in comps:
        assert sum(loci_equal(comp, pt) for pt in points) == 1


# ---------------------------------------------------------------------------
# orders and the singular locus


@pytest.mark.parametrize(
    "texts, point, expected",
    [
        (["x^2 - y^3"], {"x": 0, "y": 0}, 2),
        (["x^2 - y^3"], {"x": 1, "y": 1}, 1),
        (["x^2 - y^3"], {"x": 1, "y": 0}, 0),
        (["x^3", "y^4"], {"x": 0, "y": 0}, 3),
        (["(x - 1)^2*(y + 2)^3"], {"x": 1, "y": -2}, 5),
    ],
)
def test_order_at_point_oracle(R2, texts, point, expected):
    assert sympy_order(texts, ["x", "y"], point) == expected
    assert order_at_point([P(R2, t) for t in texts], point) == expected


def test_max_order_and_sing(R2):
    J = [P(R2, "x^2 - y^3")]
    assert max_order(J) == 2
    # Sing(J, 2) is the origin, Sing(J, 3) is empty
    assert loci_equal(sing_ideal(J, 2), [P(R2, "x"), P(R2, "y")])
    assert locus_empty(sing_ideal(J, 3))


def test_delta_adds_partials(R2):
    D = delta([P(R2, "x^2*y")])
    assert ideal_contains(D, P(R2, "2*x*y"))
    assert ideal_contains(D, P(R2, "x^2"))


def test_ideal_wrapper_refuses_zero(R2):
    with pytest.raises(ZeroIdealError):
        Ideal([R2.zero, R2.zero])
    I = Ideal.parse(["x", "y"], ["x^2 - y^3"])
    assert I.order_at_point({"x": 0, "y": 0}) == 2
    assert I.vanishes_at({"x": 1, "y": 1})
    assert I.sing_ideal(2).locus_contained(Ideal.parse(["x", "y"], ["x", "y"]))


def test_rational_points_exact(R2):
    J = [P(R2, "x - 1/3")]
    assert order_at_point(J, {"x": Fraction(1, 3), "y": 5}) == 1
    assert order_at_point(J, {"x": Fraction(1, 2), "y": 5}) == 0
