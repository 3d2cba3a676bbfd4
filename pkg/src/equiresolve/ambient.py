"""Affine charts of a sequence of blow-ups.

Every chart of a run uses the same coordinate names.  A chart remembers how
its parent's coordinates are written in its own coordinates (the
``substitution``), the polynomials it inverts (``units``), and which
divisors of the ledger are visible in it, each as a coordinate hyperplane.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy.polys.fields import FracField
from sympy.polys.rings import PolyElement, PolyRing

from .algebra import (
    groebner_basis,
    is_unit_ideal,
    lex_basis,
    locus_contained,
    locus_empty,
    to_domain,
    cofactor_pair,
    unit_cofactor,
    variable_valuation,
)
from .errors import NotAlignable, NotAligned, PermissibilityViolation

__all__ = [
    "Divisor",
    "DivisorLedger",
    "Chart",
    "ChartTree",
    "Center",
    "align_center",
    "blowup_chart",
    "transform_ideal",
    "monomial_decompose",
    "cover_components",
    "NeedsUnit",
    "monomial_chart",
    "pull_between",
    "strip_units",
    "split_for_unit",
    "chart_transition",
]


@dataclass(frozen=True)
class Divisor:
    label: str
    birth: int
    index: int


class DivisorLedger:
    """Ordered record of all divisors: the initial ones, then one per blow-up."""

    def __init__(self, entries: Iterable[Divisor] = ()):
        self._entries: List[Divisor] = list(entries)

    def add(self, label: str, birth: int) -> Divisor:
        if any(d.label == label for d in self._entries):
            raise ValueError(f"duplicate divisor label {label!r}")
        d = Divisor(label, birth, len(self._entries) + 1)
        self._entries.append(d)
        return d

    def copy(self) -> "DivisorLedger":
        return DivisorLedger(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, label: str) -> Divisor:
        for d in self._entries:
            if d.label == label:
                return d
        raise KeyError(label)

    def birth(self, label: str) -> int:
        return self.get(label).birth

    def index(self, label: str) -> int:
        return self.get(label).index

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(d.label for d in self._entries)


@dataclass(frozen=True, eq=False)
class Chart:
    """One affine chart; ``substitution`` lists the parent's coordinates."""

    id: str
    ring: PolyRing
    step: int
    kind: str
    parent: Optional["Chart"] = None
    substitution: Optional[Tuple[PolyElement, ...]] = None
    inverse: Optional[Tuple[Tuple[PolyElement, PolyElement], ...]] = None
    units: Tuple[PolyElement, ...] = ()
    divisors: Mapping[str, str] = field(default_factory=dict)
    exceptional: Optional[str] = None
    denominator: Optional[PolyElement] = None
    equations: Mapping[str, PolyElement] = field(default_factory=dict)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(str(s) for s in self.ring.symbols)

    def var(self, name: str) -> PolyElement:
        return self.ring.gens[self.names.index(name)]

    def divisor_var(self, label: str) -> Optional[PolyElement]:
        name = self.divisors.get(label)
        return None if name is None else self.var(name)

    def pull(self, f: PolyElement) -> PolyElement:
        """Rewrite a polynomial in the parent's coordinates in this chart.

        With a ``denominator`` the result is cleared of it, which changes
        the polynomial only by a unit of the chart.
        """
        if self.substitution is None:
            return f
        if self.denominator is None:
            return f.compose(list(zip(self.ring.gens, self.substitution)))
        R = self.ring
        top = max(sum(m) for m in f.monoms()) if not f.is_zero else 0
        powers = [R.one]
        for _ in range(top):
            powers.append(powers[-1] * self.denominator)
        out = R.zero
        for monom, coeff in f.terms():
            term = R.ground_new(coeff)
            for img, e in zip(self.substitution, monom):
                if e:
                    term = term * img**e
            out = out + term * powers[top - sum(monom)]
        return out

    def substitution_fracs(self, F) -> List:
        """Parent coordinates as exact fractions in a field over this chart."""
        if self.substitution is None:
            return [F.field_new(g.set_ring(F.ring)) for g in self.ring.gens]
        den = F.one if self.denominator is None else F.field_new(self.denominator.set_ring(F.ring))
        return [F.field_new(img.set_ring(F.ring)) / den for img in self.substitution]

    def root_map(self) -> Tuple[PolyElement, ...]:
        """Root coordinates written as polynomials in this chart."""
        chart: Optional[Chart] = self
        chain = []
        while chart is not None and chart.parent is not None:
            chain.append(chart)
            chart = chart.parent
        # compose from the root downwards
        images = tuple(self.ring.gens)
        for ch in reversed(chain):
            if ch.substitution is None:
                continue
            images = tuple(ch.pull(img) for img in images)
        return images

    def pull_from_root(self, f: PolyElement) -> PolyElement:
        return f.compose(list(zip(self.ring.gens, self.root_map())))

    def image_point(self, point: Mapping[str, object]) -> Dict[str, object]:
        """Coordinates in the parent chart of a point given in this chart."""
        if self.substitution is None:
            return dict(point)
        dom = self.ring.domain
        values = [to_domain(point.get(n, 0), dom) for n in self.names]
        den = dom.one if self.denominator is None else _evaluate(self.denominator, values)
        return {n: dom.quo(_evaluate(s, values), den) for n, s in zip(self.names, self.substitution)}

    def contains_point(self, point: Mapping[str, object]) -> bool:
        dom = self.ring.domain
        values = [to_domain(point.get(n, 0), dom) for n in self.names]
        return all(_evaluate(u, values) != 0 for u in self.units)

    def ancestors(self) -> List["Chart"]:
        out = [self]
        while out[-1].parent is not None:
            out.append(out[-1].parent)
        return out


def _evaluate(f: PolyElement, values: Sequence) -> object:
    return f(*values) if len(values) > 1 else f(values[0])


@dataclass
class Center:
    """The locus blown up at one step, as a list of components per chart."""

    step: int
    pieces: Dict[str, List[Tuple[PolyElement, ...]]] = field(default_factory=dict)

    def charts(self) -> List[str]:
        return [cid for cid, comps in self.pieces.items() if comps]

    def is_empty(self) -> bool:
        return not any(self.pieces.values())


class ChartTree:
    """Append-only store of charts with deterministic identifiers."""

    def __init__(self, ring: PolyRing, ledger: Optional[DivisorLedger] = None):
        self.ring = ring
        self.ledger = ledger if ledger is not None else DivisorLedger()
        self.charts: Dict[str, Chart] = {}
        self._counter = 0

    def _next_id(self) -> str:
        cid = f"c{self._counter}"
        self._counter += 1
        return cid

    def root(self, divisors: Mapping[str, str]) -> Chart:
        ch = Chart(self._next_id(), self.ring, 0, "root", divisors=dict(divisors))
        self.charts[ch.id] = ch
        return ch

    def add(self, **kwargs) -> Chart:
        ch = Chart(self._next_id(), self.ring, **kwargs)
        self.charts[ch.id] = ch
        return ch

    def localize(self, chart: Chart, extra_units: Sequence[PolyElement], step: int) -> Chart:
        units = _merge_units(chart.units, extra_units)
        divisors = dict(chart.divisors)
        return self.add(step=step, kind="local", parent=chart, units=units, divisors=divisors)

    def __getitem__(self, cid: str) -> Chart:
        return self.charts[cid]


def _merge_units(units: Sequence[PolyElement], extra: Sequence[PolyElement]) -> Tuple[PolyElement, ...]:
    out = list(units)
    for u in extra:
        if u.is_ground:
            continue
        u = u.sqf_part().monic()
        if u not in out:
            out.append(u)
    return tuple(out)


class NeedsUnit(Exception):
    """Alignment needs ``poly`` inverted; it does not vanish on the center."""

    def __init__(self, poly: PolyElement):
        super().__init__(str(poly))
        self.poly = poly


def _triangular(
    basis: Sequence[PolyElement], forbidden: Iterable[str], coefficient_ok=None
) -> Optional[Dict[str, Tuple[PolyElement, PolyElement]]]:
    """Leading variable -> ``(c, q)`` when ``basis`` reads ``{c*v + q}``.

    ``c`` and ``q`` must avoid every chosen leading variable and no leading
    variable may be in ``forbidden``.  ``c`` is a nonzero constant unless
    ``coefficient_ok`` accepts it.
    """
    R = basis[0].ring
    names = [str(s) for s in R.symbols]
    forbidden = set(forbidden)
    options = []
    for g in basis:
        opts = []
        for name, x in zip(names, R.gens):
            if name in forbidden or g.degree(x) != 1:
                continue
            c = g.diff(x)
            if c.is_ground:
                opts.append((name, R.one, (g - x * c).quo_ground(c.LC)))
            elif coefficient_ok is not None and coefficient_ok(c):
                opts.append((name, c, g - x * c))
        if not opts:
            return None
        opts.sort(key=lambda o: not o[1].is_ground)
        options.append(opts)
    for choice in itertools.islice(itertools.product(*options), 4096):
        leads = [name for name, _, _ in choice]
        if len(set(leads)) != len(leads):
            continue
        idx = [names.index(n) for n in leads]
        if all(all(m[i] == 0 for m in p.monoms() for i in idx) for _, c, q in choice for p in (c, q)):
            return {name: (c, q) for name, c, q in choice}
    return None


def align_center(
    tree: ChartTree,
    chart: Chart,
    component: Sequence[PolyElement],
    step: int,
    keep_last: Sequence[str] = (),
) -> Tuple[Chart, List[str]]:
    """Change coordinates so that ``component`` is a coordinate subspace.

    Divisors that meet the component without containing it must keep their
    coordinate, so they are never chosen as leading variables.  Variables
    in ``keep_last`` (family parameters) are used only when unavoidable.
    Returns the aligned chart (``chart`` itself when nothing changes) and
    the names of the coordinates cutting out the component.  Raises
    :class:`NeedsUnit` when a coordinate exists only after inverting a
    polynomial that does not vanish on the component.
    """
    names = list(chart.names)
    comp = list(groebner_basis(component))
    if comp and comp[0].is_ground:
        raise NotAlignable("the center component is empty")
    units = chart.units
    containing, meeting = [], []
    for label, vname in chart.divisors.items():
        if locus_contained(comp, [chart.var(vname)], units):
            containing.append(vname)
        else:
            meeting.append(vname)
    direct = _triangular(comp, meeting)
    if direct is not None and all(q.is_zero for _, q in direct.values()):
        return chart, [n for n in names if n in direct]
    middle = [n for n in names if n not in containing and n not in meeting and n not in keep_last]
    tail = [n for n in names if n in keep_last and n not in containing and n not in meeting]
    orders = [containing + list(perm) + tail + meeting for perm in itertools.islice(itertools.permutations(middle), 720)]

    def nonvanishing(c: PolyElement) -> bool:
        return locus_empty(comp + [c], units)

    found = None
    for coefficient_ok in (None, nonvanishing):
        for order in orders:
            tri = _triangular(lex_basis(comp, order), meeting, coefficient_ok)
            if tri is not None:
                found = tri
                break
        if found is not None:
            break
    if found is None:
        raise NotAlignable(
            "center component is not a coordinate graph in this chart: " + ", ".join(str(g) for g in comp)
        )
    if all(c.is_ground and q.is_zero for c, q in found.values()):
        return chart, [n for n in names if n in found]
    for c, _ in found.values():
        if not c.is_ground and not locus_empty([c], units):
            raise NeedsUnit(c)
    R = chart.ring
    den = R.one
    for c, _ in found.values():
        den = den * c
    subst = []
    inverse = []
    for name, x in zip(names, R.gens):
        if name in found:
            c, q = found[name]
            # new coordinate x' = c*x + q, so x = (x' - q) / c
            subst.append((x - q) * den.exquo(c))
            inverse.append((c * x + q, R.one))
        else:
            subst.append(x * den)
            inverse.append((x, R.one))
    if den.is_ground:
        subst = [g.quo_ground(den.LC) for g in subst]
        den_opt = None
    else:
        den_opt = den
    probe = Chart("probe", R, step, "align", chart, tuple(subst), denominator=den_opt)
    new_units = tuple(probe.pull(u) for u in chart.units)
    aligned = tree.add(
        step=step,
        kind="align",
        parent=chart,
        substitution=tuple(subst),
        inverse=tuple(inverse),
        units=_merge_units(new_units, [c for c, _ in found.values()]),
        divisors=dict(chart.divisors),
        denominator=den_opt,
    )
    return aligned, [n for n in names if n in found]


def blowup_chart(
    tree: ChartTree,
    chart: Chart,
    center: Sequence[PolyElement],
    label: str,
    step: int,
) -> List[Chart]:
    """Standard charts of the blow-up of ``chart`` along a coordinate center."""
    R = chart.ring
    names = chart.names
    basis = groebner_basis(center)
    cvars = []
    for g in basis:
        if not (len(g.terms()) == 1 and sum(g.LM) == 1):
            raise NotAligned(f"center generator {g} is not a coordinate")
        cvars.append(names[g.LM.index(1)])
    cvars = [n for n in names if n in cvars]
    out = []
    for j in cvars:
        vj = chart.var(j)
        subst = []
        inverse = []
        for name, x in zip(names, R.gens):
            if name in cvars and name != j:
                subst.append(vj * x)
                inverse.append((x, vj))
            else:
                subst.append(x)
                inverse.append((x, R.one))
        subst_t = tuple(subst)
        pairs = list(zip(R.gens, subst_t))
        units = tuple(u.compose(pairs) for u in chart.units)
        divisors = {}
        for lab, vname in chart.divisors.items():
            if vname == j:
                continue
            divisors[lab] = vname
        divisors[label] = j
        out.append(
            tree.add(
                step=step,
                kind="blowup",
                parent=chart,
                substitution=subst_t,
                inverse=tuple(inverse),
                units=units,
                divisors=divisors,
                exceptional=j,
            )
        )
    return out


def transform_ideal(
    child: Chart, gens: Sequence[PolyElement], b: int
) -> Tuple[List[PolyElement], List[PolyElement], int]:
    """Weak and controlled transforms of ``J`` in a blow-up chart.

    Returns ``(weak, controlled, nu)`` where ``nu`` is the order of ``J``
    along the center.  Raises :class:`PermissibilityViolation` when the
    center is not inside ``Sing(J, b)``.
    """
    if child.exceptional is None:
        raise NotAligned("chart is not a blow-up chart")
    v = child.var(child.exceptional)
    total = [child.pull(g) for g in gens]
    total = [g for g in total if not g.is_zero]
    nu = min(variable_valuation(g, v) for g in total)
    if nu < b:
        raise PermissibilityViolation(f"order {nu} along the center is below b = {b}")
    weak = [g.exquo(v**nu) for g in total]
    controlled = [g.exquo(v**b) for g in total]
    return weak, controlled, nu


def monomial_decompose(
    gens: Sequence[PolyElement], variables: Mapping[str, PolyElement]
) -> Tuple[Dict[str, int], List[PolyElement]]:
    """Split ``J = prod v^a_v * J_bar`` over the given divisor coordinates."""
    exps: Dict[str, int] = {}
    cur = [g for g in gens if not g.is_zero]
    for label, v in variables.items():
        a = min(variable_valuation(g, v) for g in cur)
        exps[label] = a
        if a:
            cur = [g.exquo(v**a) for g in cur]
    return exps, cur


def cover_components(
    tree: ChartTree,
    chart: Chart,
    components: Sequence[Sequence[PolyElement]],
    step: int,
) -> List[Tuple[Chart, Sequence[PolyElement]]]:
    """Cover ``chart`` by open pieces each meeting at most one component."""
    comps = list(components)
    if len(comps) <= 1:
        return [(chart, comps[0])] if comps else []
    out = []
    cur = chart
    while len(comps) > 1:
        first, rest = comps[0], comps[1:]
        rest_ideal = list(rest[0])
        for other in rest[1:]:
            rest_ideal = [f * g for f in rest_ideal for g in other]
        got = cofactor_pair(list(first), rest_ideal, cur.units)
        if got is None:
            raise NotAlignable("center components are not disjoint")
        a, u = got
        near = tree.localize(cur, [u - a], step)
        out.append((near, first))
        cur = tree.localize(cur, [a], step)
        comps = rest
    out.append((cur, comps[0]))
    return out


def separate_divisor(
    tree: ChartTree, chart: Chart, component: Sequence[PolyElement], label: str, step: int
) -> Tuple[Chart, Chart]:
    """Split off a divisor that misses ``component``.

    Returns ``(near, far)``: ``near`` contains the component and sees the
    divisor as a unit, ``far`` misses the component.
    """
    v = chart.divisor_var(label)
    a = unit_cofactor(list(component), [v], chart.units)
    if a is None:
        raise NotAlignable(f"divisor {label} meets the center")
    near = tree.localize(chart, [v], step)
    near = Chart(
        near.id, near.ring, near.step, near.kind, near.parent, None, None, near.units,
        {k: n for k, n in near.divisors.items() if k != label},
    )
    tree.charts[near.id] = near
    far = tree.localize(chart, [a], step)
    return near, far


def _unimodular_with_row(row: Sequence[int]) -> List[List[int]]:
    """Integer matrix of determinant +-1 whose first row is the primitive ``row``."""
    n = len(row)
    # column operations M with row * M = (1, 0, ..., 0); then M^-1 has ``row`` first
    vec = list(row)
    M = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst: int, src: int, k: int) -> None:
        # column dst -= k * column src
        vec[dst] -= k * vec[src]
        for r in range(n):
            M[r][dst] -= k * M[r][src]

    def swap(i: int, j: int) -> None:
        vec[i], vec[j] = vec[j], vec[i]
        for r in range(n):
            M[r][i], M[r][j] = M[r][j], M[r][i]

    for j in range(1, n):
        while vec[j] != 0:
            colop(0, j, vec[0] // vec[j])
            swap(0, j)
    if vec[0] == -1:
        for r in range(n):
            M[r][0] = -M[r][0]
        vec[0] = 1
    if vec[0] != 1:
        raise ValueError("row is not primitive")
    inv = sympy.Matrix(M).inv()
    return [[int(inv[i, j]) for j in range(n)] for i in range(n)]


def _laurent(R: PolyRing, exps: Sequence[int], idx: Sequence[int]) -> Tuple[PolyElement, PolyElement]:
    num, den = R.one, R.one
    for i, e in zip(idx, exps):
        if e > 0:
            num = num * R.gens[i] ** e
        elif e < 0:
            den = den * R.gens[i] ** (-e)
    return num, den


def monomial_chart(tree: ChartTree, chart: Chart, torus: Sequence[str], row: Sequence[int], step: int) -> Chart:
    """Monomial change of coordinates on variables that are units.

    The new coordinates are ``m = x^A`` for a unimodular ``A`` with first row
    ``row``; every variable in ``torus`` must already be a unit of ``chart``
    and must not carry a divisor.
    """
    R = chart.ring
    idx = [chart.names.index(n) for n in torus]
    A = _unimodular_with_row(row)
    B = sympy.Matrix(A).inv()
    k = len(idx)
    inv_rows = [[int(B[i, j]) for j in range(k)] for i in range(k)]
    lift = [max([0] + [-inv_rows[i][j] for i in range(k)]) for j in range(k)]
    den = R.one
    for j, e in zip(idx, lift):
        den = den * R.gens[j] ** e
    subst = [g * den for g in R.gens]
    for pos, i in enumerate(idx):
        num = R.one
        for j, e in zip(idx, (inv_rows[pos][t] + lift[t] for t in range(k))):
            num = num * R.gens[j] ** e
        subst[i] = num
    inverse = [(g, R.one) for g in R.gens]
    for pos, i in enumerate(idx):
        inverse[i] = _laurent(R, A[pos], idx)
    den_opt = None if den.is_ground else den
    probe = Chart("probe", R, step, "monomial", chart, tuple(subst), denominator=den_opt)
    units = _merge_units([_strip_monomial(probe.pull(u), idx) for u in chart.units], [R.gens[i] for i in idx])
    return tree.add(
        step=step,
        kind="monomial",
        parent=chart,
        substitution=tuple(subst),
        inverse=tuple(inverse),
        units=units,
        divisors=dict(chart.divisors),
        denominator=den_opt,
    )


def _strip_monomial(f: PolyElement, idx: Sequence[int]) -> PolyElement:
    for i in idx:
        e = min(m[i] for m in f.monoms())
        if e:
            f = f.exquo(f.ring.gens[i] ** e)
    return f


def strip_units(f: PolyElement, units: Sequence[PolyElement]) -> PolyElement:
    """Divide ``f`` by every unit of the chart that divides it."""
    if f.is_ground:
        return f
    for u in units:
        if u.is_ground:
            continue
        while not f.is_ground:
            q, r = f.div(u)
            if not r.is_zero:
                break
            f = q
    return f


def pull_between(ancestor: Chart, chart: Chart, f: PolyElement) -> PolyElement:
    """Pull ``f`` from ``ancestor`` down the chain of chart maps to ``chart``."""
    chain = []
    cur = chart
    while cur is not None and cur.id != ancestor.id:
        chain.append(cur)
        cur = cur.parent
    if cur is None:
        raise ValueError(f"{ancestor.id} is not an ancestor of {chart.id}")
    for ch in reversed(chain):
        f = ch.pull(f)
    return f


def split_for_unit(
    tree: ChartTree, chart: Chart, component: Sequence[PolyElement], poly: PolyElement, step: int
) -> Tuple[Chart, Chart]:
    """Cover ``chart`` by ``D(poly)`` and a chart missing ``component``.

    ``poly`` must not vanish anywhere on the component.  Divisors whose
    coordinate divides ``poly`` become units on the near chart and are
    dropped from its view.
    """
    a = unit_cofactor(list(component), [poly], chart.units)
    if a is None:
        raise NotAlignable(f"{poly} vanishes on the center")
    near = tree.localize(chart, [poly], step)
    keep = {}
    for label, vname in near.divisors.items():
        if poly.div(chart.var(vname))[1].is_zero:
            continue
        keep[label] = vname
    if len(keep) != len(near.divisors):
        near = replace(near, divisors=keep)
        tree.charts[near.id] = near
    far = tree.localize(chart, [a], step)
    return near, far


class ChartTransition:
    """Rational map from chart ``A`` to chart ``B`` on their overlap."""

    def __init__(self, source: Chart, target: Chart, images, domain_units):
        self.source = source
        self.target = target
        self.images = images
        self.domain_units = domain_units

    def pull(self, f: PolyElement) -> Tuple[PolyElement, PolyElement]:
        """``f`` on ``B`` written as ``num/den`` in ``A`` coordinates."""
        frac = _eval_frac(f, self.images)
        return frac.numer.set_ring(self.source.ring), frac.denom.set_ring(self.source.ring)

    def meets(self, first: Sequence[PolyElement], second: Sequence[PolyElement]) -> bool:
        """Do ``V(first)`` in ``A`` and ``V(second)`` in ``B`` share a point?"""
        pulled = [self.pull(g)[0] for g in second]
        return not locus_empty(list(first) + pulled, list(self.source.units) + list(self.domain_units))


def _eval_frac(f: PolyElement, images):
    F = images[0].field
    total = F.zero
    for monom, coeff in f.terms():
        term = F.ground_new(coeff)
        for img, e in zip(images, monom):
            if e:
                term = term * img**e
        total = total + term
    return total


def chart_transition(source: Chart, target: Chart) -> ChartTransition:
    """Transition map between two charts of the same blown-up space.

    The map goes up from ``source`` to the last common ancestor with
    polynomial substitutions, then down to ``target`` with the rational
    inverses of the chart maps.  Fractions are kept in lowest terms, so the
    overlap is exactly where the denominators and the target units are
    nonzero.
    """
    up = source.ancestors()
    down = target.ancestors()
    down_ids = {c.id: i for i, c in enumerate(down)}
    common = next((c for c in up if c.id in down_ids), None)
    if common is None:
        raise ValueError("charts belong to different trees")
    R = source.ring
    F = FracField([str(s) for s in R.symbols], R.domain, R.order)
    path_up = up[: up.index(common)]
    cur = [F.field_new(g.set_ring(F.ring)) for g in R.gens]
    for ch in path_up:
        # ``cur`` holds ch's coordinates; rewrite its parent's coordinates
        parent_in_ch = ch.substitution_fracs(F)
        cur = [_compose_frac(p, cur) for p in parent_in_ch]
    for ch in reversed(down[: down_ids[common.id]]):
        if ch.inverse is None:
            continue
        cur = [_eval_frac(num, cur) / _eval_frac(den, cur) for num, den in ch.inverse]
    domain_units = []
    for img in cur:
        d = img.denom.set_ring(R)
        if not d.is_ground:
            domain_units.append(d)
    for u in target.units:
        num = _eval_frac(u, cur).numer.set_ring(R)
        if not num.is_ground:
            domain_units.append(num)
    return ChartTransition(source, target, cur, domain_units)


def _compose_frac(frac, images):
    """Evaluate a fraction over chart coordinates at fractions ``images``."""
    return _eval_frac(frac.numer, images) / _eval_frac(frac.denom, images)
