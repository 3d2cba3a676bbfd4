"""Families of ideals over a parameter space.

A family is an ideal in ``A^n x A^m`` with the last ``m`` coordinates read
as parameters.  This module extracts fibers, computes the tau invariant of
a fiber (the sequence of maximal values of its principalization together
with the number of connected components of each center), groups samples
into strata of equal tau and checks the equiresolution conditions on
samples.

Sample-based checks can refute equisolvability or be consistent with it;
they never prove it.  Reports use that wording.

Comparisons between the total space and a fiber use a *shadow run*: every
chart of the total space that respects the projection to the parameters is
restricted to the fiber, and the fiber's own resolution function is
evaluated on the restricted charts.  As long as the centers agree step by
step, the shadow run is the principalization of the fiber written in a
different atlas.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.fields import FracField
from sympy.polys.rings import PolyElement

from .algebra import (
    dimension,
    groebner_basis,
    jacobian_rank_at,
    locus_contained,
    locus_empty,
    poly_ring,
    to_domain,
    to_rat,
)
from .ambient import Center, Chart, ChartTree, chart_transition
from .errors import (
    CompatibilityBroken,
    ComponentCountUndecided,
    EngineError,
    FieldExtensionRequired,
    InvalidFiber,
    NotAlignable,
    ZeroIdealError,
)
from .resolution.driver import (
    BasicObject,
    Seed,
    _align_divisors,
    extend_domain,
    is_smooth,
    iterate_resolution,
    make_basic_object,
    rebase,
    resolve,
)
from .resolution.engine import Carried, g_at_point, max_g, transport
from .resolution.invariants import InvValue, lambda_embed
from .syntax import format_poly, parse_poly

log = logging.getLogger(__name__)

__all__ = [
    "AEReport",
    "FamilySpec",
    "FiberComparison",
    "StepCheck",
    "StratumReport",
    "TauInvariant",
    "Theorem23Report",
    "check_AE",
    "check_fiber_inequality",
    "check_theorem23",
    "fiber",
    "fiber_object",
    "stratify",
    "tau",
]

Point = Mapping[str, object]


# ---------------------------------------------------------------------------
# the family


@dataclass(frozen=True)
class FamilySpec:
    """An ideal on ``A^n x A^m`` fibered over the parameter space ``A^m``."""

    fiber_vars: Tuple[str, ...]
    params: Tuple[str, ...]
    gens: Tuple[str, ...]
    divisors: Tuple[Tuple[str, str], ...] = ()
    b: int = 1

    def __post_init__(self):
        object.__setattr__(self, "fiber_vars", tuple(self.fiber_vars))
        object.__setattr__(self, "params", tuple(self.params))
        if isinstance(self.divisors, Mapping):
            object.__setattr__(self, "divisors", tuple(self.divisors.items()))
        R = self.ring
        gens = tuple(g if isinstance(g, str) else format_poly(g) for g in self.gens)
        parsed = [parse_poly(g, R) for g in gens]
        if all(g.is_zero for g in parsed):
            raise ZeroIdealError("a family needs a nonzero ideal")
        object.__setattr__(self, "gens", tuple(format_poly(g) for g in parsed if not g.is_zero))
        object.__setattr__(self, "divisors", tuple((str(k), format_poly(parse_poly(v, R))) for k, v in self.divisors))
        if set(self.fiber_vars) & set(self.params):
            raise ValueError("fiber and parameter variables must be distinct")
        if not self.fiber_vars:
            raise ValueError("a family needs at least one fiber variable")
        if self.b < 1:
            raise ValueError("b must be a positive integer")

    @property
    def n(self) -> int:
        return len(self.fiber_vars)

    @property
    def m(self) -> int:
        return len(self.params)

    @property
    def names(self) -> Tuple[str, ...]:
        return self.fiber_vars + self.params

    @property
    def ring(self):
        return poly_ring(self.names)

    def total_object(self, domain=QQ) -> BasicObject:
        """The family as one basic object; parameters are aligned last."""
        return make_basic_object(self.names, self.gens, self.b, dict(self.divisors), domain=domain, keep_last=self.params)

    def shifted(self, shift: Mapping[str, object]) -> "FamilySpec":
        """The pull-back along ``t -> t + c``; its fiber at ``s`` is our fiber at ``s + c``."""
        R = self.ring
        pairs = [(R.gens[self.names.index(p)], R.gens[self.names.index(p)] + to_domain(c, R.domain)) for p, c in shift.items()]
        gens = tuple(format_poly(parse_poly(g, R).compose(pairs)) for g in self.gens)
        divs = tuple((k, format_poly(parse_poly(v, R).compose(pairs))) for k, v in self.divisors)
        return replace(self, gens=gens, divisors=divs)


def _parameter_point(F: FamilySpec, t) -> Dict[str, Fraction]:
    if not isinstance(t, Mapping):
        values = tuple(t) if isinstance(t, (tuple, list)) else (t,)
        if len(values) != F.m:
            raise InvalidFiber(f"expected {F.m} parameter values, got {len(values)}")
        t = dict(zip(F.params, values))
    if set(t) != set(F.params):
        raise InvalidFiber(f"a sample must assign every parameter {F.params}")
    return {p: to_rat(t[p]) for p in F.params}


def _substitute(f: PolyElement, t: Mapping[str, Fraction], fiber_ring) -> PolyElement:
    R = f.ring
    names = [str(s) for s in R.symbols]
    pairs = [(R.gens[names.index(p)], to_domain(v, R.domain)) for p, v in t.items() if p in names]
    return f.compose(pairs).set_ring(fiber_ring) if pairs else f.set_ring(fiber_ring)


def fiber(F: FamilySpec, t) -> Seed:
    """The fiber ``(W^(t), I^(t), E^(t))`` as input for a basic object.

    Raises :class:`InvalidFiber` when the ideal restricts to zero or a
    divisor stops being a smooth hypersurface with normal crossings.
    """
    point = _parameter_point(F, t)
    R = F.ring
    Rf = poly_ring(F.fiber_vars)
    gens = [_substitute(parse_poly(g, R), point, Rf) for g in F.gens]
    gens = [g for g in gens if not g.is_zero]
    if not gens:
        raise InvalidFiber(f"the ideal vanishes on the fiber at {_fmt_point(point)}")
    divs = [(k, _substitute(parse_poly(v, R), point, Rf)) for k, v in F.divisors]
    seen: List[PolyElement] = []
    for label, d in divs:
        if d.is_ground:
            raise InvalidFiber(f"divisor {label} is empty or the whole fiber at {_fmt_point(point)}")
        for other in seen:
            if locus_contained([d], [other]) and locus_contained([other], [d]):
                raise InvalidFiber(f"divisor {label} coincides with another divisor on the fiber")
        seen.append(d)
    try:
        _align_divisors(Rf, divs, ())
    except NotAlignable as exc:
        raise InvalidFiber(f"divisors lose normal crossings on the fiber: {exc}") from exc
    return Seed(F.fiber_vars, tuple(format_poly(g) for g in gens), F.b, tuple((k, format_poly(d)) for k, d in divs))


def fiber_object(F: FamilySpec, t, domain=QQ) -> BasicObject:
    seed = fiber(F, t)
    return make_basic_object(seed.names, seed.gens, seed.b, dict(seed.divisors), domain=domain)


def _fmt_point(point: Mapping[str, Fraction]) -> str:
    return "(" + ", ".join(f"{k}={v}" for k, v in point.items()) + ")"


# ---------------------------------------------------------------------------
# the tau invariant


_PAD = ((4,),)


@dataclass(frozen=True)
class TauInvariant:
    """Pairs ``(Max h_i, c_i)`` of a fiber, read as padded with infinity.

    ``lower_bound`` marks counts that could not be certified over the
    algebraic closure.
    """

    entries: Tuple[Tuple[InvValue, int], ...]
    lower_bound: bool = False

    def key(self) -> tuple:
        return tuple((v.key(), c) for v, c in self.entries) + (_PAD,)

    @property
    def length(self) -> int:
        return len(self.entries)

    @property
    def values(self) -> List[InvValue]:
        return [v for v, _ in self.entries]

    @property
    def counts(self) -> List[int]:
        return [c for _, c in self.entries]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TauInvariant):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __lt__(self, other: "TauInvariant") -> bool:
        return self.key() < other.key()

    def __le__(self, other: "TauInvariant") -> bool:
        return self.key() <= other.key()

    def __gt__(self, other: "TauInvariant") -> bool:
        return self.key() > other.key()

    def __ge__(self, other: "TauInvariant") -> bool:
        return self.key() >= other.key()

    def to_json(self) -> dict:
        return {
            "entries": [{"value": v.to_json(), "text": str(v), "components": c} for v, c in self.entries],
            "lower_bound": self.lower_bound,
        }

    def __str__(self) -> str:
        return "[" + ", ".join(f"{v} x{c}" for v, c in self.entries) + ", inf, ...]"


def count_components(obj: BasicObject, center: Center) -> int:
    """Connected components of a center spread over several charts.

    Every piece is the trace of one component on one chart.  The center is
    smooth, so its connected components are irreducible and two pieces of
    the same component always meet.  Pieces are merged into classes when
    they meet; two classes are different components as soon as one pair of
    their pieces is disjoint.  Disjointness is first sought cheaply (a
    divisor containing one piece and missing the other, or different image
    points in a common ancestor chart) and otherwise decided on the overlap
    of the two charts, starting with the pair closest in the chart tree.
    """
    pieces = [(cid, list(groebner_basis(comp))) for cid in obj.charts for comp in center.pieces.get(cid, [])]
    if not pieces:
        return 0
    signatures = [_label_signature(obj, cid, comp) for cid, comp in pieces]
    images = [_image_points(obj.chart(cid), comp) for cid, comp in pieces]
    classes: List[List[int]] = [[i] for i in range(len(pieces))]

    def cheap_disjoint(i: int, j: int) -> bool:
        (ins_i, out_i), (ins_j, out_j) = signatures[i], signatures[j]
        if ins_i & out_j or ins_j & out_i:
            return True
        common = images[i].keys() & images[j].keys()
        return any(images[i][x] != images[j][x] for x in common)

    def distance(i: int, j: int) -> int:
        up = [c.id for c in obj.chart(pieces[i][0]).ancestors()]
        down = [c.id for c in obj.chart(pieces[j][0]).ancestors()]
        common = next(k for k, c in enumerate(up) if c in down)
        return common + down.index(up[common])

    separated = set()
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(range(len(classes)), 2):
            key = (min(classes[a]), min(classes[b]))
            if key in separated:
                continue
            pairs = [(i, j) for i in classes[a] for j in classes[b]]
            if any(cheap_disjoint(i, j) for i, j in pairs):
                separated.add(key)
                continue
            i, j = min(pairs, key=lambda p: (distance(*p), p))
            (ca, pa), (cb, pb) = pieces[i], pieces[j]
            if ca == cb:
                meets = not locus_empty(pa + pb, obj.chart(ca).units)
            else:
                try:
                    meets = chart_transition(obj.chart(ca), obj.chart(cb)).meets(pa, pb)
                except (ValueError, ZeroDivisionError) as exc:
                    raise ComponentCountUndecided(f"cannot compare charts {ca} and {cb}: {exc}") from exc
            if meets:
                classes[a] = sorted(classes[a] + classes[b])
                del classes[b]
                separated = {k for k in separated if key[0] not in k and key[1] not in k}
                changed = True
                break
            separated.add(key)
    return len(classes)


def _image_points(chart: Chart, piece: Sequence[PolyElement]) -> Dict[str, Tuple]:
    """Ancestor charts onto which ``piece`` maps to a single point."""
    R = chart.ring
    F = FracField([str(s) for s in R.symbols], R.domain, R.order)
    cur = [F.field_new(g.set_ring(F.ring)) for g in R.gens]
    out: Dict[str, Tuple] = {}
    ch = chart
    while True:
        point = []
        for img in cur:
            num = _reduce(img.numer.set_ring(R), piece)
            den = _reduce(img.denom.set_ring(R), piece)
            if not (num.is_ground and den.is_ground) or den.is_zero:
                point = None
                break
            point.append(R.domain.quo(num.LC if not num.is_zero else R.domain.zero, den.LC))
        if point is not None:
            out[ch.id] = tuple(point)
        if ch.parent is None:
            return out
        parent_in_ch = ch.substitution_fracs(F)
        cur = [_compose(p, cur) for p in parent_in_ch]
        ch = ch.parent


def _compose(frac, images):
    total = images[0].field.zero
    for monom, coeff in frac.numer.terms():
        term = images[0].field.ground_new(coeff)
        for img, e in zip(images, monom):
            if e:
                term = term * img**e
        total = total + term
    den = images[0].field.zero
    for monom, coeff in frac.denom.terms():
        term = images[0].field.ground_new(coeff)
        for img, e in zip(images, monom):
            if e:
                term = term * img**e
        den = den + term
    return total / den


def _label_signature(obj: BasicObject, cid: str, comp: Sequence[PolyElement]):
    """Divisors containing a piece and divisors missing it.

    A piece inside ``H`` cannot meet a piece that misses ``H``.
    """
    ch = obj.chart(cid)
    G = list(groebner_basis(comp))
    inside, outside = set(), set()
    for label in obj.labels:
        vname = ch.divisors.get(label)
        if vname is None:
            if label not in ch.equations:
                outside.add(label)
            continue
        v = ch.var(vname)
        if all(g.is_zero for g in [_reduce(v, G)]):
            inside.add(label)
        elif locus_empty(G + [v], ch.units):
            outside.add(label)
    return frozenset(inside), frozenset(outside)


def _reduce(f: PolyElement, G: Sequence[PolyElement]) -> PolyElement:
    return f.rem(list(G)) if G else f


def tau(F: FamilySpec, t, max_steps: int = 64) -> TauInvariant:
    """Principalize the fiber at ``t`` and record ``(Max h_i, c_i)``.

    Centers are aligned to coordinate subspaces before they are blown up,
    which forces every piece to be irreducible over the algebraic closure;
    the only counts left uncertified are those of runs that stopped early.
    """
    obj = fiber_object(F, t)
    res = resolve(obj, max_steps)
    entries = []
    for rec, state in zip(res.steps, res.objects()):
        entries.append((rec.value, count_components(state, rec.center)))
    entries.append((InvValue.bottom(obj.dim), 1))
    return TauInvariant(tuple(entries), lower_bound=not res.complete)


# ---------------------------------------------------------------------------
# stratification


@dataclass
class StratumReport:
    """Samples sharing one tau value."""

    tau: TauInvariant
    samples: List[Dict[str, Fraction]]
    equisolvable: bool
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "tau": self.tau.to_json(),
            "tau_text": str(self.tau),
            "samples": [_point_json(s) for s in self.samples],
            "equisolvable": self.equisolvable,
            "notes": list(self.notes),
        }


@dataclass
class Stratification:
    strata: List[StratumReport]
    invalid: List[Tuple[Dict[str, Fraction], str]]

    def __iter__(self):
        return iter(self.strata)

    def __len__(self) -> int:
        return len(self.strata)

    def __getitem__(self, i: int) -> StratumReport:
        return self.strata[i]

    def to_json(self) -> dict:
        return {
            "strata": [s.to_json() for s in self.strata],
            "invalid": [{"sample": _point_json(p), "reason": r} for p, r in self.invalid],
        }


def _point_json(point: Mapping[str, Fraction]) -> Dict[str, str]:
    return {k: str(v) for k, v in point.items()}


def stratify(F: FamilySpec, samples: Sequence, max_steps: int = 64) -> Stratification:
    """Group samples by tau, largest tau first.

    Samples whose fiber is invalid are listed separately.  Within a stratum
    Condition tau holds on the samples by construction; the verdict says
    the stratum is consistent with equisolvability in that sense only.
    """
    groups: Dict[TauInvariant, List[Dict[str, Fraction]]] = {}
    invalid: List[Tuple[Dict[str, Fraction], str]] = []
    order: List[TauInvariant] = []
    for s in samples:
        point = _parameter_point(F, s)
        try:
            value = tau(F, point, max_steps)
        except InvalidFiber as exc:
            invalid.append((point, str(exc)))
            continue
        if value not in groups:
            groups[value] = []
            order.append(value)
        groups[value].append(point)
    order.sort(reverse=True)
    strata = []
    for value in order:
        notes = ["tau is constant on the samples of this stratum (consistent with equisolvability)"]
        if value.lower_bound:
            notes.append("component counts are lower bounds")
        strata.append(StratumReport(value, groups[value], True, notes))
    return Stratification(strata, invalid)


# ---------------------------------------------------------------------------
# restriction of total-space charts to a fiber


class _NotFibered(Exception):
    """A chart map that mixes parameters into the fiber coordinates."""


class _Shadow:
    """Restrictions of total-space charts to the fiber over one sample."""

    def __init__(self, total: BasicObject, F: FamilySpec, point: Mapping[str, Fraction]):
        self.F = F
        self.point = dict(point)
        self.total_ring = total.ring
        self.ring = poly_ring(F.fiber_vars, total.ring.domain)
        self.tree = ChartTree(self.ring, total.tree.ledger)
        self.cache: Dict[str, Optional[Chart]] = {}
        self.history: List[InvValue] = []
        self.carried: Dict[Tuple, Carried] = {}
        self.built: Dict[Tuple, Carried] = {}
        self.charts: List[str] = []
        names = [str(s) for s in total.ring.symbols]
        self.param_index = [names.index(p) for p in F.params]
        self.fiber_index = [names.index(v) for v in F.fiber_vars]

    def sub(self, f: PolyElement) -> PolyElement:
        return _substitute(f, self.point, self.ring)

    def chart(self, ch: Chart) -> Optional[Chart]:
        """The restriction of ``ch``; ``None`` when it misses the fiber."""
        if ch.id in self.cache:
            return self.cache[ch.id]
        parent = None
        if ch.parent is not None:
            parent = self.chart(ch.parent)
            if parent is None:
                self.cache[ch.id] = None
                return None
        units = []
        for u in ch.units:
            r = self.sub(u)
            if r.is_zero:
                self.cache[ch.id] = None
                return None
            if not r.is_ground:
                units.append(r)
        if units and locus_empty([], units):
            self.cache[ch.id] = None
            return None
        for label, v in ch.divisors.items():
            if v in self.F.params:
                raise _NotFibered(f"divisor {label} is a parameter coordinate in chart {ch.id}")
        substitution = inverse = denominator = None
        if ch.substitution is not None:
            scale = self.total_ring.one if ch.denominator is None else ch.denominator
            for k in self.param_index:
                if ch.substitution[k] != self.total_ring.gens[k] * scale:
                    raise _NotFibered(f"chart {ch.id} moves the parameter {self.F.names[k]}")
            substitution = tuple(self.sub(ch.substitution[k]) for k in self.fiber_index)
            if ch.denominator is not None:
                denominator = self.sub(ch.denominator)
                if denominator.is_zero:
                    self.cache[ch.id] = None
                    return None
        if ch.inverse is not None:
            inverse = tuple((self.sub(ch.inverse[k][0]), self.sub(ch.inverse[k][1])) for k in self.fiber_index)
        out = Chart(
            ch.id,
            self.ring,
            ch.step,
            ch.kind,
            parent,
            substitution,
            inverse,
            tuple(units),
            dict(ch.divisors),
            ch.exceptional,
            denominator,
        )
        self.tree.charts[ch.id] = out
        self.cache[ch.id] = out
        return out

    def restrict(self, total: BasicObject) -> BasicObject:
        """The object induced on the fiber by a total-space object."""
        charts: List[str] = []
        J: Dict[str, List[PolyElement]] = {}
        for cid in total.charts:
            ch = self.chart(total.chart(cid))
            if ch is None:
                continue
            gens = [self.sub(g) for g in total.J[cid]]
            gens = [g for g in gens if not g.is_zero]
            if not gens:
                raise InvalidFiber(f"the transformed ideal vanishes on the fiber in chart {cid}")
            charts.append(cid)
            J[cid] = list(groebner_basis(gens))
        return BasicObject(self.tree, total.b, total.step, charts, J, total.initial_monomial, ())

    def advance(self, induced: BasicObject) -> None:
        """Carry inner objects of the previous step into ``induced``."""
        if self.charts:
            self.carried = transport(self.built, self.charts, induced)
        self.charts = list(induced.charts)
        self.built = {}

    def evaluate(self, induced: BasicObject):
        return max_g(induced, self.history, None, self.carried, self.built)


def _restricted_center(shadow: _Shadow, center: Center) -> Dict[str, List[List[PolyElement]]]:
    out: Dict[str, List[List[PolyElement]]] = {}
    for cid, comps in center.pieces.items():
        ch = shadow.cache.get(cid)
        if ch is None:
            continue
        pieces = []
        for comp in comps:
            r = [shadow.sub(g) for g in comp]
            if not locus_empty(r, ch.units):
                pieces.append(r)
        if pieces:
            out[cid] = pieces
    return out


def _product(pieces: Sequence[Sequence[PolyElement]]) -> List[PolyElement]:
    prod = list(pieces[0])
    for other in pieces[1:]:
        prod = [f * g for f in prod for g in other]
    return prod


def _same_locus(first, second, units) -> bool:
    if not first and not second:
        return True
    if not first:
        return locus_empty(_product(second), units)
    if not second:
        return locus_empty(_product(first), units)
    a, b = _product(first), _product(second)
    return locus_contained(a, b, units) and locus_contained(b, a, units)


# ---------------------------------------------------------------------------
# Condition AE


@dataclass
class StepCheck:
    """One step of the total space compared with one fiber."""

    step: int
    sample: Dict[str, Fraction]
    total_value: Optional[InvValue]
    fiber_value: Optional[InvValue]
    centers_match: bool
    values_match: bool
    fiber_dimension: Optional[int]
    transversal: bool
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.centers_match and self.values_match and self.transversal

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "sample": _point_json(self.sample),
            "total_value": None if self.total_value is None else str(self.total_value),
            "fiber_value": None if self.fiber_value is None else str(self.fiber_value),
            "centers_match": self.centers_match,
            "values_match": self.values_match,
            "fiber_dimension": self.fiber_dimension,
            "transversal": self.transversal,
            "note": self.note,
        }


@dataclass
class AEReport:
    """Outcome of the Condition AE check on samples."""

    holds: bool
    steps_checked: int
    total_length: Optional[int]
    checks: List[StepCheck]
    failure: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "steps_checked": self.steps_checked,
            "total_length": self.total_length,
            "failure": self.failure,
            "checks": [c.to_json() for c in self.checks],
            "notes": list(self.notes),
        }


def _center_on_fiber(shadow: _Shadow, total: BasicObject, center: Center):
    """Dimension and transversality of the total center along the fiber."""
    dims = []
    transversal = True
    m = shadow.F.m
    for cid, comps in center.pieces.items():
        ch = shadow.cache.get(cid)
        if ch is None:
            continue
        tch = total.chart(cid)
        for comp in comps:
            r = [shadow.sub(g) for g in comp]
            if locus_empty(r, ch.units):
                continue
            d_total = dimension(list(comp), tch.units)
            d_fiber = dimension(r, ch.units)
            dims.append(d_fiber)
            if d_fiber != d_total - m or not is_smooth(r, ch.units, shadow.F.n - d_fiber):
                transversal = False
    return (max(dims) if dims else None), transversal


def _run_checks(F: FamilySpec, samples, max_steps: int, stop_at: Optional[int] = None):
    """Drive the total space and one shadow per sample, step by step.

    Yields ``(state, shadows, induced, checks)`` for every total state; the
    checks are empty for the state at ``stop_at``.
    """
    points = [_parameter_point(F, s) for s in samples]
    for p in points:
        fiber(F, p)
    obj = F.total_object()
    for _ in range(6):
        try:
            yield from _drive(F, obj, points, max_steps, stop_at)
            return
        except FieldExtensionRequired as exc:
            obj = rebase(obj, extend_domain(obj.ring.domain, exc.minimal_polynomial))
            yield None
    raise NotAlignable("too many field extensions")


def _drive(F, obj, points, max_steps, stop_at):
    shadows = [_Shadow(obj, F, p) for p in points]
    for state in iterate_resolution(obj, max_steps):
        induced = []
        for sh in shadows:
            ind = sh.restrict(state.obj)
            sh.advance(ind)
            induced.append(ind)
        if stop_at is not None and state.obj.step == stop_at:
            yield state, shadows, induced, []
            return
        checks = []
        for sh, ind in zip(shadows, induced):
            res = sh.evaluate(ind)
            fv = None if res is None else res[0]
            if state.final:
                checks.append(StepCheck(state.obj.step, sh.point, None, fv, fv is None, fv is None, None, True,
                                        "" if fv is None else "the fiber still has singular points"))
                continue
            if res is None:
                checks.append(StepCheck(state.obj.step, sh.point, state.value, None, False, False, None, False,
                                        "the fiber is already resolved but the total space is not"))
                continue
            fcenter = res[1]
            restricted = _restricted_center(sh, state.center)
            match = all(
                _same_locus(restricted.get(cid, []), [list(c) for c in fcenter.pieces.get(cid, [])], ind.chart(cid).units)
                for cid in ind.charts
            )
            vmatch = lambda_embed(fv, F.m) == state.value
            dim, transversal = _center_on_fiber(sh, state.obj, state.center)
            note = ""
            if not match:
                note = "the total center does not restrict to the fiber's center"
            elif not vmatch:
                note = "maximal values differ"
            elif not transversal:
                note = "the center is not transversal to the fiber"
            checks.append(StepCheck(state.obj.step, sh.point, state.value, fv, match, vmatch, dim, transversal, note))
            sh.history.append(fv)
        yield state, shadows, induced, checks


def check_AE(F: FamilySpec, samples: Sequence, max_steps: int = 64) -> AEReport:
    """Resolve the total space and compare every step with every fiber.

    A step passes when, at each sample, the total center restricts to the
    center of the fiber's own principalization, the maximal values agree
    under ``lambda_embed``, the center meets the fiber transversally and the
    fiber dimension of the center is the same at all samples.  The check
    stops at the first failing step.
    """
    if not samples:
        raise ValueError("check_AE needs at least one sample")
    all_checks: List[StepCheck] = []
    steps = 0
    try:
        for item in _run_checks(F, samples, max_steps):
            if item is None:
                all_checks, steps = [], 0
                continue
            state, _, _, checks = item
            all_checks.extend(checks)
            bad = [c for c in checks if not c.ok]
            dims = {c.fiber_dimension for c in checks if c.fiber_dimension is not None}
            if state.final:
                if bad:
                    return AEReport(False, steps, steps, all_checks, f"step {steps}: {bad[0].note}")
                return AEReport(True, steps, steps, all_checks, None, _AE_NOTES)
            steps += 1
            if bad:
                return AEReport(False, steps, None, all_checks, f"step {state.obj.step}: {bad[0].note}")
            if len(dims) > 1:
                return AEReport(False, steps, None, all_checks, f"step {state.obj.step}: fiber dimension of the center varies")
    except _NotFibered as exc:
        return AEReport(False, steps, None, all_checks, f"step {steps}: {exc}")
    except InvalidFiber as exc:
        return AEReport(False, steps, None, all_checks, f"step {steps}: {exc}")
    raise AssertionError("unreachable")  # pragma: no cover


_AE_NOTES = [
    "consistent with Condition AE on the samples; properness and surjectivity are witnessed only at the samples",
]


# ---------------------------------------------------------------------------
# fiber inequality


@dataclass
class FiberComparison:
    """``g`` of the total space against ``g`` of the fiber at one point."""

    point: Dict[str, Fraction]
    chart: str
    total_value: InvValue
    fiber_value: InvValue
    holds: bool
    equal: bool
    transversal: bool

    @property
    def consistent(self) -> bool:
        """Equality exactly when the stratum is transversal to the fiber."""
        return self.equal == self.transversal

    def to_json(self) -> dict:
        return {
            "point": _point_json(self.point),
            "chart": self.chart,
            "total_value": str(self.total_value),
            "fiber_value": str(self.fiber_value),
            "holds": self.holds,
            "equal": self.equal,
            "transversal": self.transversal,
        }


def _transversal(stratum: Sequence[PolyElement], point: Mapping[str, Fraction], F: FamilySpec, units) -> bool:
    if not stratum:
        return True
    R = stratum[0].ring
    G = list(groebner_basis(stratum))
    codim = len(R.gens) - dimension(G, units)
    rank = jacobian_rank_at(G, point)
    if rank != codim:
        return False
    names = [str(s) for s in R.symbols]
    slices = [R.gens[names.index(p)] - to_domain(point[p], R.domain) for p in F.params]
    return jacobian_rank_at(G + slices, point) == rank + F.m


def check_fiber_inequality(
    F: FamilySpec, t, step: int, points: Sequence[Point], max_steps: int = 64
) -> List[FiberComparison]:
    """Compare ``g_j`` on the total space with ``g_j`` of the fiber at ``t``.

    Points are given in the coordinates of a fiber chart at step ``j``; a
    point may carry the key ``"chart"`` to choose the chart, otherwise the
    first chart containing it is used.  The first ``j`` steps are checked
    to restrict to the fiber's own steps; otherwise
    :class:`CompatibilityBroken` names the first failing step.
    """
    if step < 0:
        raise ValueError("step must be non-negative")
    target = _parameter_point(F, t)
    found = None
    for item in _run_checks(F, [target], max_steps, stop_at=step):
        if item is None:
            continue
        state, shadows, induced, checks = item
        bad = [c for c in checks if not c.ok]
        if bad:
            raise CompatibilityBroken(f"step {bad[0].step}: {bad[0].note}")
        if state.obj.step == step:
            found = (state, shadows[0], induced[0])
            break
        if state.final:
            break
    if found is None:
        raise CompatibilityBroken(f"the total space is resolved before step {step}")
    state, shadow, ind = found
    out = []
    for raw in points:
        raw = dict(raw)
        wanted = raw.pop("chart", None)
        fpoint = {k: to_rat(v) for k, v in raw.items()}
        cid = wanted
        if cid is None:
            cid = next((c for c in ind.charts if ind.chart(c).contains_point(fpoint)), None)
        if cid is None or cid not in ind.charts:
            raise ValueError(f"no fiber chart at step {step} contains {fpoint}")
        tpoint = dict(fpoint)
        tpoint.update(target)
        gt, stratum = g_at_point(state.obj, cid, tpoint, state.history, state.carried)
        gf, _ = g_at_point(ind, cid, fpoint, shadow.history, shadow.carried)
        emb = lambda_embed(gf, F.m)
        trans = _transversal(stratum, tpoint, F, state.obj.chart(cid).units)
        out.append(FiberComparison(fpoint, cid, gt, gf, emb >= gt, emb == gt, trans))
    return out


# ---------------------------------------------------------------------------
# Condition AE against Condition tau on samples


@dataclass
class Theorem23Report:
    ae: AEReport
    tau_constant: bool
    taus: List[Tuple[Dict[str, Fraction], TauInvariant]]
    agree: bool
    restriction_verified: Optional[bool]
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ae": self.ae.to_json(),
            "tau_constant": self.tau_constant,
            "taus": [{"sample": _point_json(p), "tau": t.to_json(), "tau_text": str(t)} for p, t in self.taus],
            "agree": self.agree,
            "restriction_verified": self.restriction_verified,
            "notes": list(self.notes),
        }


def check_theorem23(F: FamilySpec, samples: Sequence, max_steps: int = 64) -> Theorem23Report:
    """Condition AE against Condition tau on samples.

    When both hold, the total-space run is also compared with each fiber's
    own principalization: same number of steps and the same maximal values
    under ``lambda_embed``.  Centers were compared step by step in the AE
    check.
    """
    points = [_parameter_point(F, s) for s in samples]
    if len(points) < 2:
        raise ValueError("the consistency check needs at least two samples")
    ae = check_AE(F, points, max_steps)
    taus = [(p, tau(F, p, max_steps)) for p in points]
    constant = len({t for _, t in taus}) == 1
    notes = []
    restriction = None
    if ae.holds and constant:
        restriction = True
        for p, t in taus:
            own = [lambda_embed(v, F.m) for v in t.values[:-1]]
            if len(own) != ae.total_length or own != _distinct_steps(ae, p):
                restriction = False
                notes.append(f"restriction to {_fmt_point(p)} differs from the fiber's own run")
    agree = ae.holds == constant
    notes.append(
        "AE and tau agree on the samples (consistent with the theorem)"
        if agree
        else "AE and tau disagree on the samples"
    )
    return Theorem23Report(ae, constant, taus, agree, restriction, notes)


def _distinct_steps(ae: AEReport, point: Mapping[str, Fraction]) -> List[InvValue]:
    return [c.total_value for c in ae.checks if c.sample == dict(point) and c.total_value is not None]
