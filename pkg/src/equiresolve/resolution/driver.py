"""The resolution loop and the two applications built on it."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement

from ..algebra import (
    dimension,
    gcd_all,
    groebner_basis,
    is_unit_ideal,
    jacobian_rank_at,
    lex_basis,
    locus_contained,
    locus_empty,
    poly_ring,
    to_domain,
    to_rat,
    variable_valuation,
)
from ..ambient import (
    Center,
    Chart,
    ChartTree,
    DivisorLedger,
    align_center,
    blowup_chart,
    cover_components,
    monomial_decompose,
    NeedsUnit,
    monomial_chart,
    pull_between,
    separate_divisor,
    split_for_unit,
    strip_units,
    transform_ideal,
)
from ..errors import (
    FieldExtensionRequired,
    NoSmoothRationalPointFound,
    NotAlignable,
    PermissibilityViolation,
    StepBudgetExceeded,
    ZeroIdealError,
)
from ..syntax import parse_poly
from .engine import BasicObject, Carried, DescentRecord, Gens, g_at_point, max_g, transport
from .invariants import InvValue

log = logging.getLogger(__name__)

PolyLike = Union[str, PolyElement]


# ---------------------------------------------------------------------------
# construction


@dataclass(frozen=True)
class Seed:
    """Everything needed to rebuild a basic object over another field."""

    names: Tuple[str, ...]
    gens: Tuple[str, ...]
    b: int
    divisors: Tuple[Tuple[str, str], ...] = ()
    initial_monomial: bool = False
    keep_last: Tuple[str, ...] = ()


def _as_text(f: PolyLike) -> str:
    if isinstance(f, str):
        return f
    from ..syntax import format_poly

    return format_poly(f)


def make_basic_object(
    names: Sequence[str],
    gens: Sequence[PolyLike],
    b: int = 1,
    divisors: Optional[Mapping[str, PolyLike]] = None,
    domain=QQ,
    initial_monomial: bool = False,
    keep_last: Sequence[str] = (),
) -> BasicObject:
    """Build ``(W, (J, b), E)`` on affine space with the given coordinates.

    Divisors are given by equations; each must be (or become, after a
    triangular change of coordinates) a coordinate hyperplane.
    """
    if b < 1:
        raise ValueError("b must be a positive integer")
    seed = Seed(
        tuple(names),
        tuple(_as_text(g) for g in gens),
        int(b),
        tuple((k, _as_text(v)) for k, v in (divisors or {}).items()),
        bool(initial_monomial),
        tuple(keep_last),
    )
    return _build(seed, domain)


def _build(seed: Seed, domain) -> BasicObject:
    R = poly_ring(seed.names, domain)
    J = [parse_poly(t, R) for t in seed.gens]
    J = [g for g in J if not g.is_zero]
    if not J:
        raise ZeroIdealError("the zero ideal is not a valid input")
    ledger = DivisorLedger()
    eqs = []
    for label, text in seed.divisors:
        ledger.add(label, 0)
        eqs.append((label, parse_poly(text, R)))
    tree = ChartTree(R, ledger)
    subst, views = _align_divisors(R, eqs, seed.keep_last)
    if subst is None:
        root = tree.root(views)
        charts = [root.id]
        J0 = {root.id: list(groebner_basis(J))}
    else:
        root = tree.root({})
        inverse = tuple((img, R.one) for img in subst[1])
        child = tree.add(step=0, kind="align", parent=root, substitution=subst[0], inverse=inverse, divisors=views)
        charts = [child.id]
        J0 = {child.id: list(groebner_basis([child.pull(g) for g in J]))}
    obj = BasicObject(tree, seed.b, 0, charts, J0, seed.initial_monomial, seed.keep_last)
    obj.seed = seed  # type: ignore[attr-defined]
    return obj


def _align_divisors(R, eqs, keep_last):
    """Make every divisor a coordinate; returns the substitution and views."""
    names = [str(s) for s in R.symbols]
    views: Dict[str, str] = {}
    forward = list(R.gens)  # old coordinate k written in new coordinates
    backward = list(R.gens)  # new coordinate k written in old coordinates
    changed = False
    pending = [(label, f) for label, f in eqs]
    for label, f in pending:
        g = f.compose(list(zip(R.gens, forward)))
        if g.is_ground:
            raise NotAlignable(f"divisor {label} is empty or the whole space")
        choice = None
        order = [n for n in names if n not in keep_last] + [n for n in names if n in keep_last]
        for n in order:
            if n in views.values():
                continue
            x = R.gens[names.index(n)]
            if g.degree(x) == 1 and g.diff(x).is_ground:
                rest = (g - x * g.diff(x)).quo_ground(g.diff(x).LC)
                choice = (n, x, rest, g.diff(x).LC)
                break
        if choice is None:
            raise NotAlignable(f"divisor {label} cannot be made a coordinate hyperplane")
        n, x, rest, c = choice
        views[label] = n
        if not rest.is_zero or c != R.domain.one:
            changed = True
            # new x = (g / c) = x + rest ; old x = new x - rest
            forward = [p.compose(x, x - rest) for p in forward]
            backward[names.index(n)] = (g.quo_ground(c)).compose(list(zip(R.gens, backward)))
    if not changed:
        return None, views
    return (tuple(forward), tuple(backward)), views


def rebase(obj: BasicObject, domain) -> BasicObject:
    """The same starting object over a larger field."""
    return _build(obj.seed, domain)  # type: ignore[attr-defined]


# ---------------------------------------------------------------------------
# one step


def _extension_polynomial(component: Gens) -> Optional[PolyElement]:
    """A univariate irreducible polynomial of degree > 1 in the component."""
    R = component[0].ring
    names = [str(s) for s in R.symbols]
    for last in reversed(names):
        order = [n for n in names if n != last] + [last]
        for g in lex_basis(component, order):
            degs = [i for i, d in enumerate(g.degrees()) if d > 0]
            if len(degs) == 1 and g.degrees()[degs[0]] > 1:
                _, fl = g.factor_list()
                if len(fl) == 1 and fl[0][1] == 1:
                    return g
    return None


def _torus_rows(comp: Gens, idx: Sequence[int]) -> List[Tuple[int, ...]]:
    rows = []
    for g in comp:
        monoms = g.monoms()
        for m1, m2 in itertools.combinations(monoms, 2):
            d = [m1[i] - m2[i] for i in idx]
            common = 0
            for e in d:
                common = math.gcd(common, e)
            if common == 0:
                continue
            d = [e // common for e in d]
            if next(e for e in d if e) < 0:
                d = [-e for e in d]
            if tuple(d) not in rows:
                rows.append(tuple(d))
    return rows


def _monomial_alignment(tree: ChartTree, cur: Chart, comp: Gens, step: int, keep_last, carried: List[Chart]):
    """Try monomial coordinate changes on variables that miss the component."""
    torus = [n for n in cur.names if n not in keep_last and locus_empty(list(comp) + [cur.var(n)], cur.units)]
    if not torus:
        return None
    R = cur.ring
    prod = R.one
    for n in torus:
        prod = prod * cur.var(n)
    viewed = set(cur.divisors.values()) & set(torus)
    if viewed or not locus_empty([prod], cur.units):
        near, far = split_for_unit(tree, cur, comp, prod, step)
        carried.append(far)
        cur = near
    idx = [cur.names.index(n) for n in torus]
    for row in _torus_rows(list(groebner_basis(comp)), idx):
        mono = monomial_chart(tree, cur, torus, row, step)
        pulled = [strip_units(mono.pull(g), mono.units) for g in comp]
        try:
            align_center(tree, mono, pulled, step, keep_last)
        except NeedsUnit:
            return mono, pulled
        except NotAlignable:
            del tree.charts[mono.id]
            continue
        return mono, pulled
    return None


def _align_with_separation(tree: ChartTree, chart: Chart, comp: Gens, step: int, keep_last):
    """Align ``comp``, splitting or re-coordinatizing the chart when needed.

    Returns the aligned chart, the coordinates cutting out the component
    and the charts split off on the way (they miss the component).
    """
    carried: List[Chart] = []
    cur = chart
    comp = list(comp)
    separated = monomial = False
    for _ in range(24):
        try:
            aligned, cvars = align_center(tree, cur, comp, step, keep_last)
            return aligned, cvars, carried
        except NeedsUnit as exc:
            near, far = split_for_unit(tree, cur, comp, exc.poly, step)
            carried.append(far)
            cur = near
        except NotAlignable:
            if not separated:
                separated = True
                for label, vname in sorted(cur.divisors.items()):
                    if locus_empty(comp + [cur.var(vname)], cur.units):
                        near, far = separate_divisor(tree, cur, comp, label, step)
                        carried.append(far)
                        cur = near
                continue
            found = None if monomial else _monomial_alignment(tree, cur, comp, step, keep_last, carried)
            monomial = True
            if found is None:
                ext = _extension_polynomial(comp)
                if ext is not None:
                    raise FieldExtensionRequired(ext)
                raise
            cur, comp = found
    raise NotAlignable("alignment did not settle after repeated splits")


def apply_center(obj: BasicObject, center: Center) -> BasicObject:
    """Blow up ``obj`` along ``center``; returns the transformed object."""
    step = obj.step
    label = f"H{step + 1}"
    obj.ledger.add(label, step + 1)
    tree = obj.tree
    charts: List[str] = []
    J: Dict[str, Gens] = {}

    def keep(leaf: Chart, source: Chart, gens: Gens) -> None:
        leaf = _carry_equations(tree, source, leaf)
        charts.append(leaf.id)
        J[leaf.id] = gens

    for cid in obj.charts:
        comps = center.pieces.get(cid) or []
        if not comps:
            charts.append(cid)
            J[cid] = obj.J[cid]
            continue
        chart = tree[cid]
        for comp in comps:
            ext = _extension_polynomial(list(comp))
            if ext is not None:
                raise FieldExtensionRequired(ext)
            _check_equation_crossings(chart, list(comp))
        for piece, comp in cover_components(tree, chart, comps, step + 1):
            try:
                aligned, cvars, carried = _align_with_separation(tree, piece, list(comp), step + 1, obj.keep_last)
            except NotAlignable:
                child = _hypersurface_blowup(tree, piece, list(comp), label, step + 1)
                if child is None:
                    raise
                f = child.equations[label]
                controlled = [g.exquo(f**obj.b) for g in obj.J[cid]]
                coords = {k: child.var(v) for k, v in child.divisors.items()}
                _, rest = monomial_decompose(controlled, coords)
                if not locus_empty(rest, child.units):
                    raise
                keep(child, chart, list(groebner_basis(controlled)))
                continue
            for far in carried:
                keep(far, chart, [strip_units(pull_between(piece, far, g), far.units) for g in obj.J[cid]])
            Jal = [strip_units(pull_between(piece, aligned, g), aligned.units) for g in obj.J[cid]]
            for child in blowup_chart(tree, aligned, [aligned.var(n) for n in cvars], label, step + 1):
                _, controlled, _ = transform_ideal(child, Jal, obj.b)
                keep(child, chart, list(groebner_basis(controlled)))
    return BasicObject(tree, obj.b, step + 1, charts, J, obj.initial_monomial, obj.keep_last)


def _hypersurface_blowup(tree: ChartTree, chart: Chart, comp: Gens, label: str, step: int) -> Optional[Chart]:
    """Blow up a smooth hypersurface that is not a coordinate hyperplane.

    The blow-up is the identity and the new divisor is kept by its
    equation.  The caller accepts it only when what is left of ``J`` is a
    monomial in the coordinate divisors, so the equation never enters the
    value of a later step.
    """
    basis = list(groebner_basis(comp))
    if len(basis) != 1 or basis[0].is_ground:
        return None
    f = basis[0]
    if dimension([f], chart.units) != len(chart.ring.gens) - 1:
        return None
    return tree.add(
        step=step,
        kind="hypersurface",
        parent=chart,
        units=chart.units,
        divisors=dict(chart.divisors),
        equations={label: f},
    )


def _carry_equations(tree: ChartTree, source: Chart, leaf: Chart) -> Chart:
    """Give ``leaf`` the strict transforms of the equation divisors of ``source``."""
    if not source.equations or leaf.id == source.id:
        return leaf
    equations = dict(leaf.equations)
    for lab, eq in source.equations.items():
        e = strip_units(pull_between(source, leaf, eq), leaf.units)
        cur = leaf
        while cur is not None and cur.id != source.id:
            if cur.exceptional is not None:
                v = leaf.var(cur.exceptional)
                while not e.is_zero and variable_valuation(e, v) > 0:
                    e = e.exquo(v)
            cur = cur.parent
        if not locus_empty([e], leaf.units):
            equations[lab] = e
    if equations == dict(leaf.equations):
        return leaf
    leaf = replace(leaf, equations=equations)
    tree.charts[leaf.id] = leaf
    return leaf


def _check_equation_crossings(chart: Chart, comp: Gens) -> None:
    """A center must cross the equation divisors of its chart normally."""

    codim = len(chart.ring.gens) - dimension(comp, chart.units)
    for lab, eq in chart.equations.items():
        both = comp + [eq]
        if locus_empty(both, chart.units) or locus_contained(comp, [eq], chart.units):
            continue
        if not is_smooth(both, chart.units, codim + 1):
            raise NotAlignable(f"center does not cross divisor {lab} normally")


# ---------------------------------------------------------------------------
# the loop


@dataclass
class StepRecord:
    """One transformation of a resolution sequence."""

    step: int
    value: InvValue
    center: Center
    charts: List[str]
    J: Dict[str, Gens]
    label: str
    carried: Dict[Tuple, Carried] = field(default_factory=dict)


@dataclass
class ResolutionTree:
    """A finished (or partial) resolution sequence with its chart tree."""

    tree: ChartTree
    b: int
    dim: int
    steps: List[StepRecord]
    final: BasicObject
    initial: BasicObject
    records: List[DescentRecord] = field(default_factory=list)
    complete: bool = True

    @property
    def values(self) -> List[InvValue]:
        return [s.value for s in self.steps]

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def domain(self):
        return self.tree.ring.domain

    def objects(self) -> List[BasicObject]:
        out = []
        for s in self.steps:
            out.append(BasicObject(self.tree, self.b, s.step, s.charts, s.J, self.initial.initial_monomial, self.initial.keep_last))
        out.append(self.final)
        return out


@dataclass
class StepState:
    """What the loop knows when it is about to blow up."""

    obj: BasicObject
    value: Optional[InvValue]
    center: Optional[Center]
    history: List[InvValue]
    carried: Dict[Tuple, Carried]

    @property
    def final(self) -> bool:
        return self.value is None


def iterate_resolution(
    obj: BasicObject, max_steps: int = 64, records: Optional[List[DescentRecord]] = None
) -> Iterator[StepState]:
    """Yield the state of every step; the consumer may stop early.

    The last state yielded has ``value`` ``None``: its object has an empty
    singular locus.

    Raises :class:`PermissibilityViolation` when the maximum fails to drop
    and :class:`StepBudgetExceeded` after ``max_steps`` transformations.
    """
    history: List[InvValue] = []
    cur = obj
    carried: Dict[Tuple, Carried] = {}
    while True:
        built: Dict[Tuple, Carried] = {}
        res = max_g(cur, history, records, carried, built)
        if res is None:
            yield StepState(cur, None, None, list(history), carried)
            return
        value, center = res
        if history and not value < history[-1]:
            raise PermissibilityViolation(
                f"resolution function failed to drop: {history[-1]} then {value} at step {cur.step}"
            )
        if len(history) >= max_steps:
            raise StepBudgetExceeded(f"no resolution within {max_steps} steps")
        yield StepState(cur, value, center, list(history), carried)
        history.append(value)
        nxt = apply_center(cur, center)
        carried = transport(built, cur.charts, nxt)
        cur = nxt


def extend_domain(domain, poly: PolyElement):
    """Adjoin a root of the irreducible univariate ``poly`` to ``domain``."""
    expr = poly.as_expr()
    syms = sorted(expr.free_symbols, key=str)
    if len(syms) != 1:
        raise NotAlignable("extension polynomial is not univariate")
    z = syms[0]
    if not all(c.is_rational for c in sympy.Poly(expr, z).all_coeffs()):
        raise NotAlignable("only extensions of the rationals are supported")
    found = sympy.roots(sympy.Poly(expr, z), multiple=True)
    if len(found) == sympy.Poly(expr, z).degree():
        root = sorted(found, key=sympy.default_sort_key)[0]
    else:
        root = sympy.CRootOf(sympy.Poly(expr, z), 0)
    if domain.is_QQ:
        return QQ.algebraic_field(root)
    return QQ.algebraic_field(*domain.orig_ext, root)


def resolve(obj: BasicObject, max_steps: int = 64) -> ResolutionTree:
    """Run the algorithm until ``Sing(J, b)`` is empty.

    When a center has components that are not defined over the current
    field, the run restarts over the field generated by them.
    """
    for _ in range(6):
        try:
            return _resolve_once(obj, max_steps)
        except FieldExtensionRequired as exc:
            domain = extend_domain(obj.ring.domain, exc.minimal_polynomial)
            log.info("restarting over %s", domain)
            obj = rebase(obj, domain)
    raise NotAlignable("too many field extensions")


def _resolve_once(obj: BasicObject, max_steps: int, stop_at: Optional[InvValue] = None) -> ResolutionTree:
    records: List[DescentRecord] = []
    steps: List[StepRecord] = []
    final = obj
    complete = True
    for state in iterate_resolution(obj, max_steps, records):
        final = state.obj
        if state.final:
            break
        if stop_at is not None and state.value < stop_at:
            raise NoSmoothRationalPointFound(f"the smooth-point value {stop_at} never occurs as a maximum")
        steps.append(
            StepRecord(final.step, state.value, state.center, list(final.charts), dict(final.J), f"H{final.step + 1}", state.carried)
        )
        if stop_at is not None and state.value == stop_at:
            complete = False
            break
    return ResolutionTree(obj.tree, obj.b, obj.dim, steps, final, obj, records, complete)


# ---------------------------------------------------------------------------
# principalization


@dataclass
class PrincipalizationResult:
    """A resolution with ``b = 1`` plus the per-chart monomial certificate."""

    resolution: ResolutionTree
    exponents: Dict[str, Dict[str, int]]
    verified: bool


def monomial_certificate(res: ResolutionTree) -> Tuple[Dict[str, Dict[str, int]], bool]:
    """Check that the total transform is a divisor monomial times a unit."""
    final = res.final
    init = res.initial
    first = init.tree[init.charts[0]]
    exps_all: Dict[str, Dict[str, int]] = {}
    ok = True
    for cid in final.charts:
        ch = final.tree[cid]
        total = []
        for g in init.J[first.id]:
            # J of the first chart is already in its coordinates; pull through the tree
            total.append(pull_between(first, ch, g))
        total = [g for g in total if not g.is_zero]
        exps: Dict[str, int] = {}
        rest = total
        for label, vname in sorted(ch.divisors.items()):
            v = ch.var(vname)
            a = min(variable_valuation(g, v) for g in rest)
            if a:
                rest = [g.exquo(v**a) for g in rest]
            exps[label] = a
        for label, eq in sorted(ch.equations.items()):
            a = min(_valuation_along(g, eq) for g in rest)
            if a:
                rest = [g.exquo(eq**a) for g in rest]
            exps[label] = a
        exps_all[cid] = exps
        if not locus_empty(rest, ch.units):
            ok = False
    return exps_all, ok


def _valuation_along(f: PolyElement, eq: PolyElement) -> int:
    a = 0
    while not f.is_zero:
        q, r = f.div(eq)
        if not r.is_zero:
            break
        f, a = q, a + 1
    return a


def principalize(obj: BasicObject, max_steps: int = 64) -> PrincipalizationResult:
    """Principalization: resolve ``(J, 1)`` and certify the monomial end state."""
    if obj.b != 1:
        raise ValueError("principalization uses b = 1")
    res = resolve(obj, max_steps)
    exps, ok = monomial_certificate(res)
    return PrincipalizationResult(res, exps, ok)


# ---------------------------------------------------------------------------
# embedded desingularization


@dataclass
class DesingularizationResult:
    resolution: ResolutionTree
    smooth_point: Dict[str, Fraction]
    smooth_value: InvValue
    index: int
    strict_transform: Dict[str, Gens]
    smooth: bool
    normal_crossings: bool
    inside_center: bool


def _grid(seed: int) -> List[Fraction]:
    base = [Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2), Fraction(-1, 2), Fraction(3), Fraction(-3)]
    k = seed % len(base)
    return base[k:] + base[:k]


def find_smooth_point(gens: Gens, seed: int = 0, limit: int = 20000) -> Dict[str, Fraction]:
    """Search a small rational grid for a smooth point of ``V(gens)``."""
    R = gens[0].ring
    names = [str(s) for s in R.symbols]
    d = dimension(gens)
    if d < 0:
        raise NoSmoothRationalPointFound("the variety is empty")
    codim = len(names) - d
    grid = _grid(seed)
    tried = 0
    for last in reversed(range(len(names))):
        others = [i for i in range(len(names)) if i != last]
        for values in itertools.product(grid, repeat=len(others)):
            tried += 1
            if tried > limit:
                raise NoSmoothRationalPointFound("no smooth rational point on the search grid")
            pairs = [(R.gens[i], to_domain(v, R.domain)) for i, v in zip(others, values)]
            uni = [g.compose(pairs) for g in gens]
            uni = [g for g in uni if not g.is_zero]
            candidates: List[Fraction] = []
            if not uni:
                candidates = list(grid[:3])
            else:
                h = gcd_all(uni)
                if h.is_ground:
                    continue
                x = R.gens[last]
                for p, _ in h.factor_list()[1]:
                    if p.degree(x) == 1 and p.diff(x).is_ground:
                        c = p.diff(x).LC
                        d = p - x * c
                        root = -(d.LC if not d.is_zero else R.domain.zero) / c
                        candidates.append(to_rat(root))
            for r in candidates:
                pt = {names[i]: v for i, v in zip(others, values)}
                pt[names[last]] = r
                vals = [to_domain(pt[n], R.domain) for n in names]
                if any((g(*vals) if len(vals) > 1 else g(vals[0])) != 0 for g in gens):
                    continue
                if jacobian_rank_at(list(groebner_basis(gens)), pt) == codim:
                    return pt
    raise NoSmoothRationalPointFound("no smooth rational point on the search grid")


def saturate(gens: Gens, h: PolyElement) -> Gens:
    """``(gens) : h^infinity`` by elimination."""
    if h.is_ground:
        return list(groebner_basis(gens))
    R = gens[0].ring
    names = ["_t"] + [str(s) for s in R.symbols]
    S = poly_ring(tuple(names), R.domain, lex)
    t = S.gens[0]
    work = [g.set_ring(S) for g in gens] + [S.one - t * h.set_ring(S)]
    from sympy.polys.groebnertools import groebner

    G = groebner(work, S)
    out = [g for g in G if g.degree(t) <= 0]
    return list(groebner_basis([g.set_ring(R) for g in out]))


def is_smooth(gens: Gens, units: Sequence[PolyElement], codim: int) -> bool:
    """Jacobian criterion for a variety of pure codimension ``codim``."""
    from sympy import Matrix

    G = list(groebner_basis(gens))
    if not G or G[0].is_ground:
        return True
    R = G[0].ring
    jac = [[g.diff(x) for x in R.gens] for g in G]
    minors = []
    for rows in itertools.combinations(range(len(G)), codim):
        for cols in itertools.combinations(range(len(R.gens)), codim):
            minors.append(_det([[jac[r][c] for c in cols] for r in rows], R))
    nonzero = [m for m in minors if not m.is_zero]
    if not nonzero:
        return locus_empty(G, units)
    return locus_empty(G + nonzero, units)


def _det(M, R):
    n = len(M)
    if n == 0:
        return R.one
    if n == 1:
        return M[0][0]
    total = R.zero
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * _det(minor, R)
        total = total + term if j % 2 == 0 else total - term
    return total


def desingularize(
    obj: BasicObject, point: Optional[Mapping[str, object]] = None, max_steps: int = 64, seed: int = 0
) -> DesingularizationResult:
    """Embedded desingularization of ``X = V(J)`` through principalization."""
    if obj.b != 1:
        raise ValueError("desingularization works with b = 1")
    for _ in range(6):
        try:
            return _desingularize_once(obj, point, max_steps, seed)
        except FieldExtensionRequired as exc:
            obj = rebase(obj, extend_domain(obj.ring.domain, exc.minimal_polynomial))
    raise NotAlignable("too many field extensions")


def _desingularize_once(obj, point, max_steps, seed) -> DesingularizationResult:
    cid = obj.charts[0]
    gens = obj.J[cid]
    pt = dict(point) if point is not None else find_smooth_point(gens, seed)
    lam, _ = g_at_point(obj, cid, pt)
    res = _resolve_once(obj, max_steps, stop_at=lam)
    matches = [s.step for s in res.steps if s.value == lam]
    if len(matches) != 1:
        raise NoSmoothRationalPointFound(f"the smooth-point value {lam} is not a maximum of the run")
    s = matches[0]
    rec = res.steps[s]
    codim = obj.dim - dimension(gens)
    strict: Dict[str, Gens] = {}
    smooth = nc = inside = True
    first = res.initial.tree[res.initial.charts[0]]
    for c in rec.charts:
        ch = res.tree[c]
        total = [pull_between(first, ch, g) for g in gens]
        exc = ch.ring.one
        for label, vname in ch.divisors.items():
            if res.tree.ledger.birth(label) > 0:
                exc = exc * ch.var(vname)
        X = saturate(total, exc)
        if not X or (len(X) == 1 and X[0].is_ground) or locus_empty(X, ch.units):
            continue
        strict[c] = X
        comps = rec.center.pieces.get(c, [])
        cgens = comps[0] if len(comps) == 1 else None
        if comps:
            prod = list(comps[0])
            for other in comps[1:]:
                prod = [f * g for f in prod for g in other]
            inside = inside and locus_contained(X, prod, ch.units)
        else:
            inside = False
        smooth = smooth and is_smooth(X, ch.units, codim)
        labels = sorted(ch.divisors)
        for size in range(1, len(labels) + 1):
            for S in itertools.combinations(labels, size):
                vs = [ch.var(ch.divisors[l]) for l in S]
                if locus_empty(X + vs, ch.units):
                    continue
                if not is_smooth(X + vs, ch.units, codim + size):
                    nc = False
    return DesingularizationResult(res, pt, lam, s, strict, smooth, nc, inside)
