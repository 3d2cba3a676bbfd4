import pytest

from equiresolve.algebra import locus_empty, loci_equal, poly_ring
from equiresolve.ambient import (
    ChartTree,
    align_center,
    blowup_chart,
    chart_transition,
    monomial_decompose,
    pull_between,
    transform_ideal,
)
from equiresolve.errors import NotAligned, PermissibilityViolation
from equiresolve.syntax import parse_poly


@pytest.fixture
def tree():
    R = poly_ring(["x", "y"])
    T = ChartTree(R)
    return T, T.root({})


def P(ch, text):
    return parse_poly(text, ch.ring)


def test_blowup_of_origin_has_two_standard_charts(tree):
    T, root = tree
    charts = blowup_chart(T, root, [P(root, "x"), P(root, "y")], "H1", 1)
    assert [c.exceptional for c in charts] == ["x", "y"]
    cx, cy = charts
    # x-chart: (x, y) -> (x, x*y); the exceptional divisor is x = 0
    assert cx.pull(P(root, "y")) == P(cx, "x*y")
    assert cx.pull(P(root, "x")) == P(cx, "x")
    assert cy.pull(P(root, "x")) == P(cy, "x*y")
    assert cx.divisors == {"H1": "x"} and cy.divisors == {"H1": "y"}
    assert all(c.parent is root for c in charts)


def test_cusp_transforms(tree):
    T, root = tree
    cx, cy = blowup_chart(T, root, [P(root, "x"), P(root, "y")], "H1", 1)
    weak, controlled, nu = transform_ideal(cy, [P(root, "x^2 - y^3")], 2)
    assert nu == 2
    assert weak == [P(cy, "x^2 - y")]
    assert controlled == weak
    # with b = 1 the controlled transform keeps one factor of the divisor
    _, controlled1, _ = transform_ideal(cy, [P(root, "x^2 - y^3")], 1)
    assert controlled1 == [P(cy, "x^2*y - y^2")]


def test_center_outside_sing_is_refused(tree):
    T, root = tree
    cx, _ = blowup_chart(T, root, [P(root, "x"), P(root, "y")], "H1", 1)
    with pytest.raises(PermissibilityViolation):
        transform_ideal(cx, [P(root, "x - y^2")], 2)


def test_blowup_needs_coordinate_center(tree):
    T, root = tree
    with pytest.raises(NotAligned):
        blowup_chart(T, root, [P(root, "x - y^2")], "H1", 1)


def test_align_center_straightens_smooth_curve(tree):
    T, root = tree
    comp = [P(root, "x - y^2")]
    aligned, cvars = align_center(T, root, comp, 0)
    assert len(cvars) == 1
    v = aligned.var(cvars[0])
    pulled = pull_between(root, aligned, comp[0])
    assert loci_equal([pulled], [v], aligned.units)


def test_monomial_decompose(tree):
    T, root = tree
    x, y = root.ring.gens
    exps, rest = monomial_decompose([x**3 * y * (x + y)], {"E": x, "F": y})
    assert exps == {"E": 3, "F": 1}
    assert rest == [x + y]


def test_transition_between_sibling_charts(tree):
    T, root = tree
    cx, cy = blowup_chart(T, root, [P(root, "x"), P(root, "y")], "H1", 1)
    tr = chart_transition(cx, cy)
    # the point (x, y) = (1, 1) of the x-chart is (1, 1) in the y-chart as well
    assert tr.meets([P(cx, "x - 1"), P(cx, "y - 1")], [P(cy, "x - 1"), P(cy, "y - 1")])
    # the origin of the x-chart lies on the divisor, the y-chart origin too, but
    # they are different points of the exceptional line
    assert not tr.meets([P(cx, "x"), P(cx, "y")], [P(cy, "x"), P(cy, "y")])


def test_units_of_localized_chart(tree):
    T, root = tree
    loc = T.localize(root, [P(root, "x - 1")], 0)
    assert locus_empty([P(loc, "x - 1")], loc.units)
    assert loc.id != root.id and T[loc.id] is loc
