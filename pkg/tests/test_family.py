from fractions import Fraction

import pytest

from equiresolve.errors import CompatibilityBroken, InvalidFiber, ZeroIdealError
from equiresolve.family import (
    FamilySpec,
    TauInvariant,
    check_AE,
    check_fiber_inequality,
    fiber,
    stratify,
    tau,
)
from equiresolve.resolution import InvValue, THead

PRODUCT = FamilySpec(("x", "y"), ("t",), ("x^2 - y^3",))
NODES = FamilySpec(("x", "y"), ("t",), ("x^2 - y^2*(y + t)",))


@pytest.fixture(scope="module")
def node_taus():
    return {t: tau(NODES, t) for t in (0, 1, -1)}


# ---------------------------------------------------------------------------
# families and fibers


def test_family_normalizes_and_validates():
    F = FamilySpec(["x", "y"], ["t"], ["x^2 - y^3", "0"])
    # the zero generator is dropped
    assert len(F.gens) == 1
    assert F.n == 2 and F.m == 1 and F.names == ("x", "y", "t")
    with pytest.raises(ZeroIdealError):
        FamilySpec(("x",), ("t",), ("0",))
    with pytest.raises(ValueError):
        FamilySpec(("x", "t"), ("t",), ("x",))


def test_fiber_substitutes_parameters():
    seed = fiber(NODES, 2)
    assert seed.names == ("x", "y")
    assert len(seed.gens) == 1


@pytest.mark.parametrize(
    "family, sample",
    [
        (FamilySpec(("x",), ("t",), ("t*x",)), 0),
        (FamilySpec(("x", "y"), ("t",), ("x",), {"E": "t"}), 0),
        (PRODUCT, (1, 2)),
    ],
)
def test_invalid_fibers(family, sample):
    with pytest.raises(InvalidFiber):
        fiber(family, sample)


def test_shifted_family_is_a_pull_back():
    G = NODES.shifted({"t": 1})
    # the fiber of G at -1 is the fiber of NODES at 0
    assert fiber(G, -1) == fiber(NODES, 0)


# ---------------------------------------------------------------------------
# tau


def test_tau_ordering_pads_with_infinity():
    a = InvValue(2, (THead(Fraction(2), 0), THead(Fraction(1), 0)))
    b = InvValue(2, (THead(Fraction(1), 0), THead(Fraction(1), 0)))
    bottom = InvValue.bottom(2)
    short = TauInvariant(((a, 1), (bottom, 1)))
    longer = TauInvariant(((a, 1), (b, 1), (bottom, 1)))
    # the second entry of ``short`` is the bottom value, below ``b``
    assert longer > short
    assert TauInvariant(((a, 2), (bottom, 1))) > short


def test_tau_is_constant_on_the_product_family():
    values = {tau(PRODUCT, t) for t in (0, 1, -1, Fraction(1, 2))}
    assert len(values) == 1


def test_tau_of_nodes(node_taus):
    assert node_taus[1] == node_taus[-1]
    assert node_taus[0] > node_taus[1]
    # two branches through the node: some center has two components
    assert max(node_taus[1].counts) == 2
    assert node_taus[1].values[-1] == InvValue.bottom(2)


@pytest.mark.parametrize("shift, sample", [(1, -1), (-2, 2), (Fraction(1, 2), Fraction(1, 2))])
def test_tau_is_invariant_under_reparametrization(node_taus, shift, sample):
    G = NODES.shifted({"t": shift})
    base = sample + shift
    expected = node_taus[base] if base in node_taus else tau(NODES, base)
    assert tau(G, sample) == expected


def test_tau_is_upper_semicontinuous_on_samples(node_taus):
    # the special point carries the largest value among nearby samples
    for t in (Fraction(1, 3), Fraction(-1, 4)):
        assert node_taus[0] >= tau(NODES, t)


# ---------------------------------------------------------------------------
# stratification


def test_stratification_partitions_the_samples():
    samples = [0, 1, -1, 2]
    st = stratify(NODES, samples)
    seen = [s["t"] for stratum in st for s in stratum.samples]
    assert sorted(seen) == sorted(Fraction(t) for t in samples)
    assert [s.tau for s in st] == sorted((s.tau for s in st), reverse=True)
    assert st.invalid == []


def test_stratification_lists_invalid_fibers():
    G = FamilySpec(("x",), ("t",), ("t*x",))
    st = stratify(G, [0, 1, 2])
    assert [p["t"] for p, _ in st.invalid] == [0]
    assert len(st) == 1


# ---------------------------------------------------------------------------
# Condition AE and the fiber inequality


def test_AE_implies_constant_tau_on_the_product():
    ae = check_AE(PRODUCT, [0, 1, -1, 2])
    assert ae.holds
    assert len({tau(PRODUCT, t) for t in (0, 1, -1, 2)}) == 1


def test_AE_fails_for_nodes_at_the_first_step():
    ae = check_AE(NODES, [0, 1])
    assert not ae.holds
    assert ae.checks[0].step == 0 and not ae.checks[0].values_match


def test_fiber_inequality_is_equality_on_a_product():
    pts = [{"x": 0, "y": 0}, {"x": 1, "y": 1}, {"x": 8, "y": 4}]
    for c in check_fiber_inequality(PRODUCT, 1, 0, pts):
        assert c.holds and c.equal and c.transversal


def test_fiber_inequality_after_a_broken_step():
    with pytest.raises(CompatibilityBroken):
        check_fiber_inequality(NODES, 0, 1, [{"x": 0, "y": 0}])
