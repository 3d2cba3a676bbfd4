"""Constructive resolution of basic objects.

The resolution function is computed level by level.  At each level the
engine works on a list of *level charts*: an affine piece carrying an ideal,
its weight ``b``, the inverted polynomials of the chart and the visible
divisors.  Level ``d + 1`` lives on a hypersurface of maximal contact inside
level ``d`` and remembers the equation of that hypersurface, which is how
centers found deep down are lifted back to the top chart.

One-variable levels keep their (principal) ideal in factored form.  The
coefficient ideal weights grow like ``b!`` and would otherwise produce
polynomials of absurd degree, while every question asked at such a level is
about root multiplicities.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement, PolyRing

from ..algebra import (
    delta,
    factor_out,
    gcd_all,
    groebner_basis,
    ideal_power,
    lex_basis,
    locus_contained,
    locus_empty,
    order_at_point,
    poly_ring,
    restrict,
    sing_ideal,
    split_components,
    to_domain,
    variable_valuation,
)
from ..ambient import Center, Chart, ChartTree, DivisorLedger, monomial_decompose, pull_between
from ..errors import NoUnitLinearPart, ZeroIdealError
from .invariants import GammaHead, InvValue, THead

log = logging.getLogger(__name__)

Gens = List[PolyElement]
Factored = Dict[PolyElement, int]


@dataclass
class BasicObject:
    """A basic object ``(W, (J, b), E)`` covered by charts of a tree."""

    tree: ChartTree
    b: int
    step: int
    charts: List[str]
    J: Dict[str, Gens]
    initial_monomial: bool = False
    keep_last: Tuple[str, ...] = ()

    @property
    def ring(self) -> PolyRing:
        return self.tree.ring

    @property
    def ledger(self) -> DivisorLedger:
        return self.tree.ledger

    @property
    def dim(self) -> int:
        return len(self.ring.gens)

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.ledger.labels

    def chart(self, cid: str) -> Chart:
        return self.tree[cid]


@dataclass
class DescentRecord:
    """One passage to a hypersurface of maximal contact."""

    step: int
    depth: int
    chart: str
    ring: PolyRing
    units: Tuple[PolyElement, ...]
    locus: Gens
    j2: Gens
    b2: int
    contact: PolyElement
    variable: str
    inner_ring: PolyRing
    inner_units: Tuple[PolyElement, ...]
    coeff: Optional[Gens]
    coeff_factored: Optional[Factored]
    inner_b: int


@dataclass
class _LevelChart:
    top: str
    ring: PolyRing
    gens: Optional[Gens]
    units: Tuple[PolyElement, ...]
    divisors: Dict[str, str]
    parent: Optional["_LevelChart"] = None
    z_eq: Optional[PolyElement] = None
    factored: Optional[Factored] = None
    key: Tuple = ()

    def var(self, name: str) -> PolyElement:
        return self.ring.gens[[str(s) for s in self.ring.symbols].index(name)]

    def lift(self, gens: Gens) -> Gens:
        cur = list(gens)
        ch = self
        while ch.parent is not None:
            cur = [g.set_ring(ch.parent.ring) for g in cur] + [ch.z_eq]
            ch = ch.parent
        return cur

    @property
    def univariate(self) -> bool:
        return len(self.ring.gens) == 1


@dataclass
class _Ctx:
    step: int
    births: Dict[str, int]
    index: Dict[str, int]
    history: List[InvValue]
    initial_monomial: bool
    records: List[DescentRecord] = field(default_factory=list)
    carried: Dict[Tuple, "Carried"] = field(default_factory=dict)
    built: Dict[Tuple, "Carried"] = field(default_factory=dict)


LevelResult = Tuple[Tuple, Dict[str, List[Gens]]]


@dataclass
class Carried:
    """An inner level object kept alive while the heads above it persist.

    ``key`` is ``(chart id, S_0, S_1, ...)`` where ``S_k`` lists the old
    divisors added at depth ``k``.  ``contact`` is ``y - expr`` in the ring
    of the enclosing level and ``gens``/``factored`` is the ideal on the
    hypersurface, of weight ``b``.
    """

    key: Tuple
    prefix: Tuple
    yname: str
    contact: PolyElement
    ring: PolyRing
    gens: Optional[Gens]
    factored: Optional[Factored]
    b: int


def _inner_from(lc: "_LevelChart", cr: Carried) -> "_LevelChart":
    x, expr = _restrict_map(cr.contact, cr.yname)
    units = tuple(u for u in restrict(list(lc.units), x, expr, cr.ring) if not u.is_ground)
    return _LevelChart(lc.top, cr.ring, cr.gens, units, {}, lc, cr.contact, cr.factored, cr.key)


def _head_at(value: InvValue, depth: int):
    if value.kind != "value" or depth >= len(value.heads):
        return None
    return value.heads[depth]


def _window_w(ctx: _Ctx, depth: int, start: int) -> List[Fraction]:
    out = []
    for j in range(start, ctx.step):
        h = _head_at(ctx.history[j], depth)
        if isinstance(h, THead):
            out.append(h.w)
        elif isinstance(h, GammaHead):
            out.append(Fraction(0))
        else:
            out.append(None)
    return out


def _first_of_run(ctx: _Ctx, depth: int, start: int, w: Fraction) -> int:
    """First step of the run of equal maximal weak order ending now."""
    ws = _window_w(ctx, depth, start)
    i0 = ctx.step
    for j in range(ctx.step - 1, start - 1, -1):
        if ws[j - start] == w:
            i0 = j
        else:
            break
    return i0


def _inner_start(ctx: _Ctx, depth: int, start: int, prefix: Tuple) -> int:
    s = ctx.step
    for j in range(ctx.step - 1, start - 1, -1):
        h = ctx.history[j]
        if h.kind == "value" and tuple(h.heads[: depth + 1]) == prefix:
            s = j
        else:
            break
    return s


def _exceptional_labels(labels: Sequence[str], ctx: _Ctx, depth: int, start: int) -> List[str]:
    threshold = start - 1 if (ctx.initial_monomial and depth == 0) else start
    return [l for l in labels if ctx.births[l] > threshold]


# ---------------------------------------------------------------------------
# small public building blocks


def build_Bprime(jbar: Gens, monomial: PolyElement, b: int, b_r: int) -> Tuple[Gens, int]:
    """The auxiliary pair ``(J', b')`` built from the weak transform."""
    if b_r >= b:
        return list(groebner_basis(jbar)), b_r
    first = ideal_power(jbar, b - b_r)
    second = [monomial**b_r]
    return list(groebner_basis(first + second)), b_r * (b - b_r)


def build_Bdoubleprime(jprime: Gens, bprime: int, divisor_vars: Sequence[PolyElement]) -> Tuple[Gens, int]:
    """Add the powers ``I(H)^b'`` of the old divisors through the locus."""
    return list(groebner_basis(list(jprime) + [v**bprime for v in divisor_vars])), bprime


def _linear_in(f: PolyElement, name: str) -> Optional[PolyElement]:
    R = f.ring
    x = R.gens[[str(s) for s in R.symbols].index(name)]
    if f.degree(x) != 1:
        return None
    d = f.diff(x)
    if not d.is_ground:
        return None
    return f.quo_ground(d.LC)


def max_contact(
    j2: Gens, b2: int, forbidden: Sequence[str] = (), units: Sequence[PolyElement] = ()
) -> Tuple[PolyElement, str]:
    """Pick ``f = y + g`` in ``Delta^(b''-1)(J'')`` with ``g`` free of ``y``.

    ``y`` avoids the coordinates in ``forbidden`` (the divisors that must
    stay transversal).  Raises :class:`NoUnitLinearPart` when no element of
    that shape exists.
    """
    D = sing_ideal(j2, b2)
    R = D[0].ring
    names = [str(s) for s in R.symbols]
    allowed = [n for n in names if n not in forbidden]
    cands = sorted(D, key=lambda f: (len(f.terms()), max(sum(m) for m in f.monoms()), str(f)))
    for f in cands:
        for n in allowed:
            g = _linear_in(f, n)
            if g is not None:
                return g, n
    for n in allowed:
        order = [n] + [m for m in names if m != n]
        for f in lex_basis(D, order):
            g = _linear_in(f, n)
            if g is not None:
                return g, n
    raise NoUnitLinearPart("no element of order one with a unit linear part in Delta^(b-1)(J)")


def _restrict_map(f: PolyElement, name: str):
    R = f.ring
    x = R.gens[[str(s) for s in R.symbols].index(name)]
    return x, x - f


def coeff_ideal(
    j2: Gens, b2: int, f: PolyElement, name: str, inner: PolyRing
) -> Tuple[Gens, int]:
    """Coefficient ideal on ``Z = V(f)`` with weight ``b''!``."""
    x, expr = _restrict_map(f, name)
    total = factorial(b2)
    cur = list(groebner_basis(j2))
    parts: Gens = []
    for i in range(b2):
        res = restrict(cur, x, expr, inner)
        if res:
            parts.extend(ideal_power(list(groebner_basis(res)), total // (b2 - i)))
        cur = list(groebner_basis(delta(cur)))
    return list(groebner_basis(parts)), total


def _factor_principal(g: PolyElement) -> Factored:
    _, fl = g.factor_list()
    return {p.monic(): e for p, e in fl}


def coeff_ideal_factored(
    j2: Gens, b2: int, f: PolyElement, name: str, inner: PolyRing
) -> Tuple[Factored, int]:
    """Coefficient ideal on a curve, as ``{irreducible: exponent}``."""
    x, expr = _restrict_map(f, name)
    total = factorial(b2)
    cur = list(groebner_basis(j2))
    out: Optional[Factored] = None
    for i in range(b2):
        res = restrict(cur, x, expr, inner)
        if res:
            e = total // (b2 - i)
            fac = {p: k * e for p, k in _factor_principal(gcd_all(res)).items()}
            out = fac if out is None else _factored_sum(out, fac)
        cur = list(groebner_basis(delta(cur)))
    if out is None:
        raise ZeroIdealError("coefficient ideal vanishes identically")
    return out, total


def _factored_sum(a: Factored, b: Factored) -> Factored:
    return {p: min(a[p], b[p]) for p in a if p in b}


def r1_detect(locus: Gens, units: Sequence[PolyElement] = ()) -> Optional[PolyElement]:
    """Squarefree equation of the codimension-one part of ``V(locus)``."""
    G = groebner_basis(locus)
    if not G or G[0].is_ground:
        return None
    h = gcd_all(G)
    if h.is_ground:
        return None
    h = h.sqf_part().monic()
    if locus_empty([h], units):
        return None
    return h


# ---------------------------------------------------------------------------
# the level recursion (whole-chart maxima)


def _sing_nonempty_k(sing: Gens, jbar: Gens, units) -> int:
    """Largest ``k`` with ``V(sing) & {ord J_bar >= k}`` meeting the chart."""
    k = 0
    cur = list(groebner_basis(jbar))
    while True:
        if locus_empty(sing + cur, units):
            return k
        k += 1
        cur = list(groebner_basis(delta(cur)))


def _gamma_choose(entries: List[Tuple[str, PolyElement, int]], b: int, ctx: _Ctx, units, extra: Gens):
    """Best ``(-p, w, idx)`` over subsets of divisors meeting in the chart."""
    best = None
    for size in range(1, len(entries) + 1):
        for S in itertools.combinations(entries, size):
            total = sum(a for _, _, a in S)
            if total < b:
                continue
            if locus_empty([v for _, v, _ in S] + extra, units):
                continue
            head = GammaHead(size, Fraction(total, b), tuple(ctx.index[l] for l, _, _ in S))
            if best is None or head.key() > best[0].key():
                best = (head, [v for _, v, _ in S])
        if best is not None:
            break
    return best


def _level(
    charts: List[_LevelChart],
    b: int,
    labels: Sequence[str],
    depth: int,
    start: int,
    prefix: Tuple,
    ctx: _Ctx,
) -> Optional[LevelResult]:
    if charts and charts[0].univariate:
        return _leaf(charts, b, labels, depth, start, prefix, ctx)
    exc = _exceptional_labels(labels, ctx, depth, start)
    data = []
    for lc in charts:
        sing = sing_ideal(lc.gens, b)
        if locus_empty(sing, lc.units):
            continue
        exc_vars = {l: lc.var(lc.divisors[l]) for l in exc if l in lc.divisors}
        exps, jbar = monomial_decompose(lc.gens, exc_vars)
        data.append((lc, sing, exps, jbar, exc_vars))
    if not data:
        return None
    ks = [_sing_nonempty_k(sing, jbar, lc.units) for lc, sing, _, jbar, _ in data]
    kmax = max(ks)
    if kmax == 0:
        return _gamma_level(data, b, ctx)
    w = Fraction(kmax, b)
    i0 = _first_of_run(ctx, depth, start, w)
    eminus = [l for l in labels if ctx.births[l] <= i0]
    eplus = [l for l in labels if ctx.births[l] > i0]
    pieces = []
    nmax = -1
    for (lc, sing, exps, jbar, exc_vars), k in zip(data, ks):
        if k < kmax:
            continue
        L = list(groebner_basis(sing + sing_ideal(jbar, kmax)))
        vis = [l for l in eminus if l in lc.divisors]
        for n in range(len(vis), -1, -1):
            if n < nmax:
                break
            found = []
            for S in itertools.combinations(vis, n):
                LS = list(groebner_basis(L + [lc.var(lc.divisors[l]) for l in S]))
                if not locus_empty(LS, lc.units):
                    found.append((S, LS))
            if found:
                if n > nmax:
                    nmax = n
                    pieces = []
                pieces.extend((lc, S, LS, exps, jbar, exc_vars) for S, LS in found)
                break
    t = THead(w, nmax)
    here = prefix + (t,)
    r1: Dict[str, List[Gens]] = {}
    for lc, S, LS, *_ in pieces:
        h = r1_detect(LS, lc.units)
        if h is not None:
            r1.setdefault(lc.top, []).append(lc.lift([h]))
    if r1:
        return (t,), r1
    inner: List[_LevelChart] = []
    weight = None
    for lc, S, LS, exps, jbar, exc_vars in pieces:
        key = lc.key + (tuple(S),)
        cr = ctx.carried.get(key)
        if cr is not None and cr.prefix == here:
            child = _inner_from(lc, cr)
        else:
            cr = _descend(lc, S, LS, exps, jbar, exc_vars, b, kmax, eplus, depth, key, here, ctx)
            child = _inner_from(lc, cr)
        child.divisors = {l: lc.divisors[l] for l in eplus if l in lc.divisors and lc.divisors[l] != cr.yname}
        ctx.built[key] = cr
        if weight is not None and weight != cr.b:
            raise RuntimeError("inner levels disagree on their weight")
        weight = cr.b
        inner.append(child)
    res = _level(inner, weight, eplus, depth + 1, _inner_start(ctx, depth, start, here), here, ctx)
    if res is None:
        raise RuntimeError("coefficient ideal has an empty singular locus")
    heads, centers = res
    return (t,) + heads, centers


def _descend(lc, S, LS, exps, jbar, exc_vars, b, kmax, eplus, depth, key, here, ctx) -> Carried:
    """Fresh passage to a hypersurface of maximal contact."""
    mono = lc.ring.one
    for l, v in exc_vars.items():
        mono = mono * v ** exps[l]
    jp, bp = build_Bprime(jbar, mono, b, kmax)
    j2, b2 = build_Bdoubleprime(jp, bp, [lc.var(lc.divisors[l]) for l in S])
    # only divisors through the locus must stay transversal to the hypersurface
    forbidden = [
        lc.divisors[l]
        for l in eplus
        if l in lc.divisors and not locus_empty(LS + [lc.var(lc.divisors[l])], lc.units)
    ]
    f, yname = max_contact(j2, b2, forbidden, lc.units)
    names = [str(s) for s in lc.ring.symbols if str(s) != yname]
    R2 = poly_ring(tuple(names), lc.ring.domain)
    x, expr = _restrict_map(f, yname)
    units2 = tuple(u for u in restrict(list(lc.units), x, expr, R2) if not u.is_ground)
    if b2 > 4:
        log.info("auxiliary weight b'' = %d: coefficient ideal weight is %d", b2, factorial(b2))
    coeff = fac = None
    if len(names) == 1:
        fac, bc = coeff_ideal_factored(j2, b2, f, yname, R2)
    else:
        coeff, bc = coeff_ideal(j2, b2, f, yname, R2)
        if not coeff:
            raise ZeroIdealError("coefficient ideal vanishes identically")
    ctx.records.append(
        DescentRecord(ctx.step, depth, lc.top, lc.ring, lc.units, LS, j2, b2, f, yname, R2, units2, coeff, fac, bc)
    )
    return Carried(key, here, yname, f, R2, coeff, fac, bc)


def _gamma_level(data, b: int, ctx: _Ctx) -> LevelResult:
    best = None
    per_chart = []
    for lc, sing, exps, jbar, exc_vars in data:
        entries = [(l, v, exps[l]) for l, v in exc_vars.items() if exps[l] > 0]
        got = _gamma_choose(entries, b, ctx, lc.units, [])
        if got is None:
            continue
        per_chart.append((lc, got))
        if best is None or got[0].key() > best.key():
            best = got[0]
    if best is None:
        raise RuntimeError("monomial phase without a divisor combination of order b")
    centers: Dict[str, List[Gens]] = {}
    for lc, (head, vars_) in per_chart:
        if head == best:
            centers.setdefault(lc.top, []).append(lc.lift(vars_))
    return (best,), centers


def _leaf(charts: List[_LevelChart], b: int, labels, depth: int, start: int, prefix, ctx: _Ctx):
    exc = _exceptional_labels(labels, ctx, depth, start)
    data = []
    for lc in charts:
        fac = lc.factored if lc.factored is not None else _factor_principal(gcd_all(lc.gens))
        x = lc.ring.gens[0]
        exc_here = [l for l in exc if l in lc.divisors]
        a = fac.get(x, 0) if exc_here else 0
        pts = []
        for p, e in fac.items():
            if p.is_ground or e < b or locus_empty([p], lc.units):
                continue
            k = 0 if (p == x and exc_here) else e
            pts.append((p, k))
        if pts:
            data.append((lc, fac, a, exc_here, pts))
    if not data:
        return None
    kmax = max(k for *_, pts in data for _, k in pts)
    if kmax == 0:
        best = None
        per = []
        for lc, fac, a, exc_here, pts in data:
            head = GammaHead(1, Fraction(a, b), (ctx.index[exc_here[0]],))
            per.append((lc, head))
            if best is None or head.key() > best.key():
                best = head
        centers: Dict[str, List[Gens]] = {}
        for lc, head in per:
            if head == best:
                centers.setdefault(lc.top, []).append(lc.lift([lc.ring.gens[0]]))
        return (best,), centers
    w = Fraction(kmax, b)
    i0 = _first_of_run(ctx, depth, start, w)
    eminus = {l for l in labels if ctx.births[l] <= i0}
    cands = []
    for lc, fac, a, exc_here, pts in data:
        x = lc.ring.gens[0]
        on_minus = any(l in eminus for l in lc.divisors)
        for p, k in pts:
            if k == kmax:
                n = 1 if (p == x and on_minus) else 0
                cands.append((lc, p, n))
    nmax = max(n for *_, n in cands)
    t = THead(w, nmax)
    centers = {}
    for lc, p, n in cands:
        if n == nmax:
            centers.setdefault(lc.top, []).append(lc.lift([p]))
    return (t,), centers


# ---------------------------------------------------------------------------
# top level


class _Lost(Exception):
    """An inner object could not be followed into a chart."""


def _chain_exceptional(anc: Chart, ch: Chart) -> Optional[str]:
    cur = ch
    while cur is not None and cur.id != anc.id:
        if cur.kind == "blowup":
            return cur.exceptional
        cur = cur.parent
    return None


def _follow(h: PolyElement, anc: Chart, ch: Chart, enclosing: Sequence[Carried]) -> PolyElement:
    """Pull ``h`` (a function on a level over ``anc``) to the same level over ``ch``."""
    g = pull_between(anc, ch, h.set_ring(anc.ring))
    for enc in enclosing:
        x, expr = _restrict_map(enc.contact, enc.yname)
        got = restrict([g], x, expr, enc.ring)
        g = got[0] if got else enc.ring.zero
    return g


def _transport_one(cr: Carried, key: Tuple, enclosing: Sequence[Carried], anc: Chart, ch: Chart) -> Carried:
    ename = _chain_exceptional(anc, ch)
    f = _follow(cr.contact, anc, ch, enclosing)
    if f.is_zero:
        raise _Lost("contact hypersurface vanishes identically")
    R = f.ring
    names = [str(s) for s in R.symbols]
    if ename is not None and ename in names:
        f = factor_out(f, R.gens[names.index(ename)])[0]
    yname = None
    for n in [cr.yname] + [m for m in names if m != cr.yname]:
        if n == ename or n not in names:
            continue
        x = R.gens[names.index(n)]
        if f.degree(x) == 1 and f.diff(x).is_ground:
            yname = n
            f = f.quo_ground(f.diff(x).LC)
            break
    if yname is None:
        raise _Lost("strict transform of the contact hypersurface is not a graph")
    R2 = poly_ring(tuple(m for m in names if m != yname), R.domain)
    x, expr = _restrict_map(f, yname)
    e2 = None
    r2_names = [str(s) for s in R2.symbols]
    if ename is not None and ename in r2_names:
        e2 = R2.gens[r2_names.index(ename)]
    gens = fac = None
    if cr.gens is not None:
        gens = []
        for g in cr.gens:
            q = restrict([_follow(g, anc, ch, enclosing)], x, expr, R2)
            if not q:
                continue
            q = q[0]
            if e2 is not None:
                if variable_valuation(q, e2) < cr.b:
                    raise _Lost("center is not permissible for the inner object")
                q = q.exquo(e2**cr.b)
            gens.append(q)
        if not gens:
            raise _Lost("inner ideal vanishes")
        gens = list(groebner_basis(gens))
    else:
        fac = {}
        for p, m in cr.factored.items():
            q = restrict([_follow(p, anc, ch, enclosing)], x, expr, R2)
            if not q:
                raise _Lost("inner ideal vanishes")
            for r, k in _factor_principal(q[0]).items():
                if not r.is_ground:
                    fac[r] = fac.get(r, 0) + m * k
        if e2 is not None:
            have = fac.get(e2, 0)
            if have < cr.b:
                raise _Lost("center is not permissible for the inner object")
            if have == cr.b:
                fac.pop(e2, None)
            else:
                fac[e2] = have - cr.b
        if not fac:
            fac = {R2.one: 1}
    return Carried(key, cr.prefix, yname, f, R2, gens, fac, cr.b)


def transport(objects: Mapping[Tuple, Carried], old_charts: Sequence[str], obj: BasicObject) -> Dict[Tuple, Carried]:
    """Follow the inner objects of the previous step into the charts of ``obj``.

    Objects that cannot be followed are dropped; the engine then builds a
    fresh descent for them.
    """
    old = set(old_charts)
    out: Dict[Tuple, Carried] = {}
    for cid in obj.charts:
        ch = obj.chart(cid)
        anc = ch
        while anc is not None and anc.id not in old:
            anc = anc.parent
        if anc is None:
            continue
        for key in sorted((k for k in objects if k[0] == anc.id), key=len):
            new_key = (cid,) + key[1:]
            enclosing = []
            ok = True
            for depth in range(2, len(key)):
                enc = out.get((cid,) + key[1:depth])
                if enc is None:
                    ok = False
                    break
                enclosing.append(enc)
            if not ok:
                continue
            try:
                out[new_key] = _transport_one(objects[key], new_key, enclosing, anc, ch)
            except _Lost as exc:
                log.debug("dropping inner object %s: %s", key, exc)
    return out


def _context(obj: BasicObject, history: Sequence[InvValue]) -> _Ctx:
    births = {d.label: d.birth for d in obj.ledger}
    index = {d.label: d.index for d in obj.ledger}
    return _Ctx(obj.step, births, index, list(history), obj.initial_monomial)


def _top_charts(obj: BasicObject) -> List[_LevelChart]:
    out = []
    for cid in obj.charts:
        ch = obj.chart(cid)
        out.append(_LevelChart(cid, ch.ring, list(obj.J[cid]), ch.units, dict(ch.divisors), key=(cid,)))
    return out


def max_g(
    obj: BasicObject,
    history: Sequence[InvValue] = (),
    records: Optional[List[DescentRecord]] = None,
    carried: Optional[Mapping[Tuple, Carried]] = None,
    built: Optional[Dict[Tuple, Carried]] = None,
) -> Optional[Tuple[InvValue, Center]]:
    """Maximum of the resolution function and the locus where it is reached.

    ``carried`` holds the inner objects followed from the previous step
    (see :func:`transport`); the inner objects used now are written to
    ``built``.  Returns ``None`` once ``Sing(J, b)`` is empty.
    """
    ctx = _context(obj, history)
    ctx.carried = dict(carried or {})
    res = _level(_top_charts(obj), obj.b, obj.labels, 0, 0, (), ctx)
    if records is not None:
        records.extend(ctx.records)
    if built is not None:
        built.update(ctx.built)
    if res is None:
        return None
    heads, raw = res
    value = InvValue(obj.dim, heads)
    center = Center(obj.step)
    for cid in obj.charts:
        comps: List[Gens] = []
        units = obj.chart(cid).units
        for gens in raw.get(cid, []):
            comps.extend(split_components(gens, units))
        center.pieces[cid] = _dedupe(comps, units)
    return value, center


def _dedupe(comps: List[Gens], units) -> List[Tuple[PolyElement, ...]]:
    out: List[Gens] = []
    for c in comps:
        if any(locus_contained(c, o, units) and locus_contained(o, c, units) for o in out):
            continue
        out.append(c)
    kept = []
    for i, c in enumerate(out):
        if any(j != i and locus_contained(c, o, units) for j, o in enumerate(out)):
            continue
        kept.append(tuple(c))
    return kept


def w_ord_max(obj: BasicObject, history: Sequence[InvValue] = ()) -> Tuple[Fraction, Dict[str, Gens]]:
    """Maximal weak order over ``Sing(J, b)`` and its locus per chart."""
    ctx = _context(obj, history)
    exc = _exceptional_labels(obj.labels, ctx, 0, 0)
    best = 0
    loci: Dict[str, Tuple[int, Gens]] = {}
    for lc in _top_charts(obj):
        sing = sing_ideal(lc.gens, obj.b)
        if locus_empty(sing, lc.units):
            continue
        _, jbar = monomial_decompose(lc.gens, {l: lc.var(lc.divisors[l]) for l in exc if l in lc.divisors})
        k = _sing_nonempty_k(sing, jbar, lc.units)
        loci[lc.top] = (k, list(groebner_basis(sing + sing_ideal(jbar, k))) if k else sing)
        best = max(best, k)
    return Fraction(best, obj.b), {cid: gens for cid, (k, gens) in loci.items() if k == best}


def split_E(obj: BasicObject, history: Sequence[InvValue] = ()) -> Tuple[List[str], List[str], int]:
    """Old divisors ``E-``, new divisors ``E+`` and the step ``i0``."""
    w, _ = w_ord_max(obj, history)
    ctx = _context(obj, history)
    i0 = _first_of_run(ctx, 0, 0, w)
    return (
        [l for l in obj.labels if ctx.births[l] <= i0],
        [l for l in obj.labels if ctx.births[l] > i0],
        i0,
    )


def t_max_locus(obj: BasicObject, history: Sequence[InvValue] = ()) -> Tuple[THead, Dict[str, List[Gens]]]:
    """``Max t`` and its locus, split by the set of old divisors through it."""
    w, loci = w_ord_max(obj, history)
    if w == 0:
        raise ValueError("the weak order vanishes: the monomial phase has no t invariant")
    eminus, _, _ = split_E(obj, history)
    found: Dict[str, List[Tuple[int, Gens]]] = {}
    nmax = 0
    for cid, L in loci.items():
        ch = obj.chart(cid)
        vis = [l for l in eminus if l in ch.divisors]
        for n in range(len(vis), -1, -1):
            hits = []
            for S in itertools.combinations(vis, n):
                LS = list(groebner_basis(L + [ch.var(ch.divisors[l]) for l in S]))
                if not locus_empty(LS, ch.units):
                    hits.append(LS)
            if hits:
                found[cid] = [(n, h) for h in hits]
                nmax = max(nmax, n)
                break
    return THead(w, nmax), {cid: [h for n, h in v if n == nmax] for cid, v in found.items() if any(n == nmax for n, _ in v)}


def gamma(obj: BasicObject, history: Sequence[InvValue] = ()) -> Tuple[GammaHead, Dict[str, List[Gens]]]:
    """The monomial-phase invariant and its maximal locus."""
    w, _ = w_ord_max(obj, history)
    if w != 0:
        raise ValueError("gamma applies only when the weak order vanishes")
    ctx = _context(obj, history)
    exc = _exceptional_labels(obj.labels, ctx, 0, 0)
    data = []
    for lc in _top_charts(obj):
        sing = sing_ideal(lc.gens, obj.b)
        if locus_empty(sing, lc.units):
            continue
        exc_vars = {l: lc.var(lc.divisors[l]) for l in exc if l in lc.divisors}
        exps, jbar = monomial_decompose(lc.gens, exc_vars)
        data.append((lc, sing, exps, jbar, exc_vars))
    if not data:
        raise ValueError("the singular locus is empty")
    heads, centers = _gamma_level(data, obj.b, ctx)
    return heads[0], centers


# ---------------------------------------------------------------------------
# values at a point


def _point_values(lc: _LevelChart, point: Mapping[str, object]) -> List:
    return [to_domain(point.get(str(s), 0), lc.ring.domain) for s in lc.ring.symbols]


def _vanishes(f: PolyElement, values) -> bool:
    return (f(*values) if len(values) > 1 else f(values[0])) == 0


def _level_point(
    lc: _LevelChart, b: int, labels, depth: int, start: int, prefix, ctx: _Ctx, point: Mapping[str, object]
) -> Optional[LevelResult]:
    vals = _point_values(lc, point)
    if lc.univariate:
        return _leaf_point(lc, b, labels, depth, start, ctx, vals)
    sing = sing_ideal(lc.gens, b)
    if not all(_vanishes(g, vals) for g in sing):
        return None
    exc = _exceptional_labels(labels, ctx, depth, start)
    exc_vars = {l: lc.var(lc.divisors[l]) for l in exc if l in lc.divisors}
    exps, jbar = monomial_decompose(lc.gens, exc_vars)
    k = order_at_point(jbar, point)
    if k == 0:
        entries = [(l, v, exps[l]) for l, v in exc_vars.items() if exps[l] > 0 and _vanishes(v, vals)]
        best = _gamma_choose(entries, b, ctx, (), [])
        head, vars_ = best
        return (head,), {lc.top: [lc.lift(vars_)]}
    w = Fraction(k, b)
    i0 = _first_of_run(ctx, depth, start, w)
    eminus = [l for l in labels if ctx.births[l] <= i0]
    eplus = [l for l in labels if ctx.births[l] > i0]
    S = [l for l in eminus if l in lc.divisors and _vanishes(lc.var(lc.divisors[l]), vals)]
    t = THead(w, len(S))
    here = prefix + (t,)
    L = list(groebner_basis(sing + sing_ideal(jbar, k) + [lc.var(lc.divisors[l]) for l in S]))
    G = groebner_basis(L)
    h = gcd_all(G) if G and not G[0].is_ground else lc.ring.one
    if not h.is_ground:
        through = lc.ring.one
        for p, _ in h.factor_list()[1]:
            if _vanishes(p, vals):
                through = through * p
        if not through.is_ground:
            return (t,), {lc.top: [lc.lift([through])]}
    key = lc.key + (tuple(S),)
    cr = ctx.carried.get(key)
    if cr is None or cr.prefix != here:
        cr = _descend(lc, S, L, exps, jbar, exc_vars, b, k, eplus, depth, key, here, ctx)
    child = _inner_from(lc, cr)
    child.divisors = {l: lc.divisors[l] for l in eplus if l in lc.divisors and lc.divisors[l] != cr.yname}
    names = [str(s) for s in cr.ring.symbols]
    bc = cr.b
    sub = {n: point.get(n, 0) for n in names}
    res = _level_point(child, bc, eplus, depth + 1, _inner_start(ctx, depth, start, here), here, ctx, sub)
    if res is None:
        raise RuntimeError("point left the singular locus of the coefficient ideal")
    heads, strata = res
    return (t,) + heads, strata


def _leaf_point(lc: _LevelChart, b: int, labels, depth: int, start: int, ctx: _Ctx, vals):
    fac = lc.factored if lc.factored is not None else _factor_principal(gcd_all(lc.gens))
    x = lc.ring.gens[0]
    exc = _exceptional_labels(labels, ctx, depth, start)
    exc_here = [l for l in exc if l in lc.divisors]
    e = 0
    hit = None
    for p, m in fac.items():
        if not p.is_ground and _vanishes(p, vals):
            e, hit = m, p
    if hit is None or e < b:
        return None
    if hit == x and exc_here:
        head = GammaHead(1, Fraction(e, b), (ctx.index[exc_here[0]],))
        return (head,), {lc.top: [lc.lift([x])]}
    w = Fraction(e, b)
    i0 = _first_of_run(ctx, depth, start, w)
    n = 1 if (hit == x and any(ctx.births[l] <= i0 for l in lc.divisors)) else 0
    return (THead(w, n),), {lc.top: [lc.lift([hit])]}


def g_at_point(
    obj: BasicObject,
    chart_id: str,
    point: Mapping[str, object],
    history: Sequence[InvValue] = (),
    carried: Optional[Mapping[Tuple, Carried]] = None,
) -> Tuple[InvValue, Gens]:
    """Value of the resolution function at a rational point of a chart.

    Also returns equations of the stratum through the point (the points
    near it where the value is the same).  Outside ``Sing(J, b)`` the value
    is the bottom element and the stratum is empty.
    """
    ch = obj.chart(chart_id)
    if not ch.contains_point(point):
        raise ValueError(f"point is outside chart {chart_id}")
    ctx = _context(obj, history)
    ctx.carried = dict(carried or {})
    lc = _LevelChart(chart_id, ch.ring, list(obj.J[chart_id]), ch.units, dict(ch.divisors), key=(chart_id,))
    res = _level_point(lc, obj.b, obj.labels, 0, 0, (), ctx, point)
    if res is None:
        return InvValue.bottom(obj.dim), []
    heads, strata = res
    return InvValue(obj.dim, heads), strata[chart_id][0]
