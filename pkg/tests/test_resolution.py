from fractions import Fraction

import pytest

from equiresolve.algebra import ideal_contains, is_unit_ideal, loci_equal, locus_empty, poly_ring, sing_ideal
from equiresolve.ambient import pull_between
from equiresolve.errors import StepBudgetExceeded, ZeroIdealError
from equiresolve.resolution import (
    InvValue,
    THead,
    coeff_ideal,
    desingularize,
    g_at_point,
    lambda_embed,
    make_basic_object,
    max_contact,
    max_g,
    principalize,
    resolve,
    w_ord_max,
)
from equiresolve.resolution.invariants import strictly_decreasing
from equiresolve.syntax import parse_poly


def cusp(b=1, names=("x", "y")):
    return make_basic_object(list(names), ["x^2 - y^3"], b)


def certificate_holds(res) -> bool:
    """Total transform = divisor monomial * (ideal without zeros on the chart)."""
    first = res.initial.tree[res.initial.charts[0]]
    for cid in res.final.charts:
        ch = res.tree[cid]
        total = [pull_between(first, ch, g) for g in res.initial.J[first.id]]
        mono = ch.ring.one
        for label, vname in ch.divisors.items():
            v = ch.var(vname)
            a = min(_val(g, v) for g in total)
            mono *= v**a
        for eq in ch.equations.values():
            while all(g.div(eq)[1].is_zero for g in total):
                total = [g.exquo(eq) for g in total]
        rest = []
        for g in total:
            q, r = g.div(mono)
            if not r.is_zero:
                return False
            rest.append(q)
        if not locus_empty(rest, ch.units):
            return False
    return True


def _val(f, v):
    a = 0
    while not f.is_zero and f.div(v)[1].is_zero:
        f, a = f.exquo(v), a + 1
    return a


# ---------------------------------------------------------------------------
# construction


def test_zero_ideal_is_refused():
    with pytest.raises(ZeroIdealError):
        make_basic_object(["x"], ["0"], 1)


def test_threshold_must_be_positive():
    with pytest.raises(ValueError):
        make_basic_object(["x"], ["x"], 0)


def test_divisors_become_coordinates():
    obj = make_basic_object(["x", "y"], ["x^2 - y^3"], 1, {"E": "y - x^2"})
    ch = obj.chart(obj.charts[0])
    assert "E" in ch.divisors


# ---------------------------------------------------------------------------
# the invariant


def test_w_ord_of_the_cusp():
    assert w_ord_max(cusp(2))[0] == 1
    assert w_ord_max(cusp(1))[0] == 2


def test_first_value_and_center_of_the_cusp():
    value, center = max_g(cusp(2))
    assert value == InvValue(2, (THead(Fraction(1), 0), THead(Fraction(3, 2), 0)))
    (cid,) = center.charts()
    (comp,) = center.pieces[cid]
    R = cusp(2).ring
    assert loci_equal(list(comp), [R.gens[0], R.gens[1]])


def test_values_compare_across_dimensions_after_embedding():
    v = InvValue(2, (THead(Fraction(1), 0), THead(Fraction(3, 2), 0)))
    w = lambda_embed(v, 1)
    assert w.dim == 3 and w.heads == v.heads
    assert InvValue.bottom(3) < w < InvValue.top(3)


def test_g_at_point_agrees_with_the_maximum():
    obj = cusp(1)
    value, _ = max_g(obj)
    at_origin, stratum = g_at_point(obj, obj.charts[0], {"x": 0, "y": 0})
    assert at_origin == value
    off, _ = g_at_point(obj, obj.charts[0], {"x": 1, "y": 0})
    assert off == InvValue.bottom(2)
    smooth, _ = g_at_point(obj, obj.charts[0], {"x": 1, "y": 1})
    assert InvValue.bottom(2) < smooth < value


def test_max_contact_and_coefficient_ideal_of_the_cusp():
    R = cusp(2).ring
    J = [parse_poly("x^2 - y^3", R)]
    f, y = max_contact(J, 2)
    assert y == "x" and ideal_contains(sing_ideal(J, 2), f)
    Z = poly_ring(["y"])
    C, weight = coeff_ideal(J, 2, f, y, Z)
    assert weight == 2
    # (y^3)^1 + (y^2)^2 = (y^3)
    assert loci_equal(C, [parse_poly("y", Z)]) and ideal_contains(C, parse_poly("y^3", Z))
    assert not ideal_contains(C, parse_poly("y^2", Z))


# ---------------------------------------------------------------------------
# runs


def test_cusp_with_threshold_two_needs_one_blowup():
    res = resolve(cusp(2))
    assert res.length == 1
    assert len(res.final.charts) == 2
    for cid in res.final.charts:
        ch = res.tree[cid]
        assert locus_empty(sing_ideal(res.final.J[cid], 2), ch.units)


@pytest.mark.parametrize(
    "names, gens, length",
    [
        (("x", "y"), ["x^2 - y^3"], 8),
        (("x", "y"), ["x^2 - y^3 - y^2"], 5),
        (("x", "y"), ["x*y"], 5),
        (("x", "y", "z"), ["x*y", "z^2"], 37),
    ],
)
def test_principalization_golden_lengths(names, gens, length):
    pr = principalize(make_basic_object(list(names), gens, 1))
    assert pr.resolution.length == length
    assert pr.verified
    assert certificate_holds(pr.resolution)
    assert strictly_decreasing(pr.resolution.values)


def test_node_uses_a_hypersurface_divisor():
    pr = principalize(make_basic_object(["x", "y"], ["x^2 - y^3 - y^2"], 1))
    assert any(pr.resolution.tree[c].equations for c in pr.resolution.final.charts)


def test_non_rational_branches_extend_the_field():
    pr = principalize(make_basic_object(["x", "y"], ["x^2 + y^2 - y^3"], 1))
    assert not pr.resolution.domain.is_QQ
    assert pr.verified and certificate_holds(pr.resolution)


def test_step_budget():
    with pytest.raises(StepBudgetExceeded):
        resolve(cusp(1), max_steps=3)


def test_threshold_above_order_is_already_resolved():
    res = resolve(cusp(3))
    assert res.length == 0
    assert is_unit_ideal(sing_ideal(res.final.J[res.final.charts[0]], 3))


def test_desingularization_of_the_cusp():
    dr = desingularize(cusp(1))
    assert dr.smooth and dr.normal_crossings and dr.inside_center
    assert dr.index == 3
    assert dr.resolution.steps[dr.index].value == dr.smooth_value


def test_desingularization_at_a_chosen_point():
    dr = desingularize(cusp(1), point={"x": 1, "y": 1})
    assert dr.index == 3
