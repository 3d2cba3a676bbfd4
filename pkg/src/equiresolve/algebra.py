"""Exact polynomial ideals over a field of characteristic zero.

Polynomials are sympy ``PolyElement`` objects living in rings built by
:func:`poly_ring` (graded reverse lexicographic order unless stated
otherwise).  Most helpers take a plain sequence of generators; the
:class:`Ideal` class is the validated public wrapper that refuses the zero
ideal.

Charts of a blow-up are open subsets ``D(u1*...*uk)`` of affine space, so
many helpers accept ``units``: polynomials that are inverted on the chart.
Emptiness there is decided with the Rabinowitsch trick.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.groebnertools import groebner as _sympy_groebner
from sympy.polys.orderings import grevlex, lex
from sympy.polys.rings import PolyElement, PolyRing

from .errors import ZeroIdealError

Rat = Fraction
Poly = PolyElement

__all__ = [
    "Rat",
    "Poly",
    "Ideal",
    "IdealRep",
    "poly_ring",
    "groebner_basis",
    "normal_form",
    "ideal_contains",
    "is_unit_ideal",
    "locus_empty",
    "locus_contained",
    "loci_equal",
    "delta",
    "delta_power",
    "sing_ideal",
    "order_at_point",
    "max_order",
    "factor_out",
    "variable_valuation",
    "gcd_all",
    "ideal_power",
    "ideal_product",
    "restrict",
    "dimension",
    "jacobian_rank_at",
    "unit_cofactor",
    "cofactor_pair",
    "split_components",
    "to_domain",
    "to_rat",
]

def _install_same_field_shortcut() -> None:
    # sympy converts between two copies of one number field by a round trip
    # through expressions and a field isomorphism search; elements of equal
    # fields can be passed through unchanged.
    from sympy.polys.domains.algebraicfield import AlgebraicField

    convert = AlgebraicField.from_AlgebraicField
    if getattr(convert, "_same_field_shortcut", False):
        return

    def from_algebraic_field(K1, a, K0):
        if K1 == K0:
            return a
        return convert(K1, a, K0)

    from_algebraic_field._same_field_shortcut = True  # type: ignore[attr-defined]
    AlgebraicField.from_AlgebraicField = from_algebraic_field


_install_same_field_shortcut()

_RING_CACHE: Dict[tuple, PolyRing] = {}
_GB_CACHE: Dict[tuple, Tuple[PolyElement, ...]] = {}
_GB_CACHE_LIMIT = 50_000
_AUX = "_s"


def poly_ring(names: Sequence[str], domain=QQ, order=grevlex) -> PolyRing:
    """Return a cached polynomial ring on ``names`` over ``domain``."""
    key = (tuple(names), domain, order)
    R = _RING_CACHE.get(key)
    if R is None:
        if not names:
            raise ValueError("a polynomial ring needs at least one variable")
        R = PolyRing(",".join(names), domain, order)
        _RING_CACHE[key] = R
    return R


def to_domain(value, domain):
    """Convert an int, ``Fraction`` or domain element into ``domain``."""
    if isinstance(value, Fraction):
        return domain.convert(QQ(value.numerator, value.denominator))
    if isinstance(value, int):
        return domain.convert(QQ(value))
    try:
        return domain.convert(value)
    except Exception:  # pragma: no cover - exotic input
        return domain.from_sympy(value)


def to_rat(value) -> Fraction:
    """Convert a rational domain element to ``Fraction``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if num is not None and den is not None:
        return Fraction(int(num), int(den))
    raise TypeError(f"not a rational number: {value!r}")


def _ring_of(gens: Sequence[PolyElement]) -> PolyRing:
    return gens[0].ring


def _clean(gens: Iterable[PolyElement]) -> List[PolyElement]:
    out: List[PolyElement] = []
    seen = set()
    for g in gens:
        if g.is_zero:
            continue
        g = g.monic()
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def groebner_basis(gens: Sequence[PolyElement], ring: Optional[PolyRing] = None) -> Tuple[PolyElement, ...]:
    """Reduced Groebner basis of the ideal spanned by ``gens``.

    An empty result stands for the zero ideal.
    """
    gens = _clean(gens)
    if not gens:
        return ()
    R = ring or _ring_of(gens)
    key = (R, frozenset(gens))
    hit = _GB_CACHE.get(key)
    if hit is not None:
        return hit
    if any(g.is_ground for g in gens):
        G: Tuple[PolyElement, ...] = (R.one,)
    else:
        G = tuple(_sympy_groebner(gens, R))
    if len(_GB_CACHE) > _GB_CACHE_LIMIT:
        _GB_CACHE.clear()
    _GB_CACHE[key] = G
    return G


def normal_form(f: PolyElement, basis: Sequence[PolyElement]) -> PolyElement:
    """Remainder of ``f`` on division by a Groebner basis."""
    if not basis:
        return f
    return f.rem(list(basis))


def ideal_contains(gens: Sequence[PolyElement], f: PolyElement) -> bool:
    """Membership test ``f in (gens)`` in the polynomial ring."""
    if f.is_zero:
        return True
    return normal_form(f, groebner_basis(gens, f.ring)).is_zero


def is_unit_ideal(gens: Sequence[PolyElement]) -> bool:
    """True when ``gens`` generate the whole polynomial ring."""
    G = groebner_basis(gens)
    return len(G) == 1 and G[0].is_ground


def _gcd_many(gens: Sequence[PolyElement]) -> PolyElement:
    h = gens[0]
    for g in gens[1:]:
        if h.is_ground:
            break
        h = h.gcd(g)
    return h


def _with_aux(R: PolyRing) -> PolyRing:
    return poly_ring(tuple(str(s) for s in R.symbols) + (_AUX,), R.domain, grevlex)


def _product(polys: Iterable[PolyElement], R: PolyRing) -> PolyElement:
    out = R.one
    for p in polys:
        out = out * p
    return out


def locus_empty(gens: Sequence[PolyElement], units: Sequence[PolyElement] = ()) -> bool:
    """Decide whether ``V(gens)`` misses the open set where all units are nonzero."""
    gens = [g for g in gens if not g.is_zero]
    if not gens:
        return False
    R = _ring_of(gens)
    units = [u for u in units if not u.is_ground]
    if not units:
        return is_unit_ideal(gens)
    h = _gcd_many(gens)
    if not h.is_ground:
        # V(h) is a union of hypersurfaces; each must lie inside V(units)
        for p, _ in h.factor_list()[1]:
            if not any(u.div(p)[1].is_zero for u in units):
                return False
        gens = [g.exquo(h) for g in gens]
        if any(g.is_ground for g in gens):
            return True
    if is_unit_ideal(gens):
        return True
    G = groebner_basis(gens)
    if any(normal_form(u, G).is_zero for u in units):
        return True
    S = _with_aux(R)
    s = S.gens[-1]
    lifted = [g.set_ring(S) for g in gens]
    u = _product((v.set_ring(S) for v in units), S)
    return is_unit_ideal(lifted + [S.one - s * u])


def locus_contained(
    first: Sequence[PolyElement], second: Sequence[PolyElement], units: Sequence[PolyElement] = ()
) -> bool:
    """Decide ``V(first) <= V(second)`` inside the chart cut out by ``units``."""
    first = [g for g in first if not g.is_zero]
    second = [g for g in second if not g.is_zero]
    if not first:
        return not second
    for g in second:
        if g.is_ground:
            if not locus_empty(first, units):
                return False
            continue
        if not locus_empty(first, list(units) + [g]):
            return False
    return True


def loci_equal(first: Sequence[PolyElement], second: Sequence[PolyElement], units: Sequence[PolyElement] = ()) -> bool:
    """Two-sided :func:`locus_contained`."""
    return locus_contained(first, second, units) and locus_contained(second, first, units)


def delta(gens: Sequence[PolyElement]) -> List[PolyElement]:
    """The generators together with all their first partial derivatives."""
    out = list(_clean(gens))
    if not out:
        return out
    R = _ring_of(out)
    extra = [g.diff(x) for g in out for x in R.gens]
    return _clean(out + extra)


def delta_power(gens: Sequence[PolyElement], k: int) -> List[PolyElement]:
    """``k``-fold iteration of :func:`delta`, interreduced after each step."""
    cur = list(groebner_basis(gens))
    for _ in range(k):
        if len(cur) == 1 and cur[0].is_ground:
            break
        cur = list(groebner_basis(delta(cur)))
    return cur


def sing_ideal(gens: Sequence[PolyElement], b: int) -> List[PolyElement]:
    """Generators of ``Delta^(b-1)(J)``, whose zero set is ``Sing(J, b)``."""
    return delta_power(gens, b - 1)


def _translate(f: PolyElement, point: Mapping[str, object]) -> PolyElement:
    R = f.ring
    pairs = []
    for x in R.gens:
        a = point.get(str(x), 0)
        if a != 0:
            pairs.append((x, x + to_domain(a, R.domain)))
    return f.compose(pairs) if pairs else f


def _min_degree(f: PolyElement) -> Optional[int]:
    if f.is_zero:
        return None
    return min(sum(m) for m in f.monoms())


def order_at_point(gens: Sequence[PolyElement], point: Mapping[str, object]) -> int:
    """Largest ``k`` with ``J`` inside ``m_p^k``; the zero ideal is rejected."""
    gens = [g for g in gens if not g.is_zero]
    if not gens:
        raise ZeroIdealError("order of the zero ideal is undefined")
    return min(_min_degree(_translate(g, point)) for g in gens)


def max_order(gens: Sequence[PolyElement], units: Sequence[PolyElement] = ()) -> int:
    """Maximum order of ``J`` over the chart; ``0`` when ``V(J)`` misses it."""
    gens = [g for g in gens if not g.is_zero]
    if not gens:
        raise ZeroIdealError("order of the zero ideal is undefined")
    bound = min(max(sum(m) for m in g.monoms()) for g in gens) + 1
    cur = list(groebner_basis(gens))
    for k in range(bound + 1):
        if locus_empty(cur, units):
            return k
        cur = list(groebner_basis(delta(cur)))
    return bound  # pragma: no cover - the bound always suffices


def variable_valuation(f: PolyElement, v: PolyElement) -> int:
    """Exponent of the variable ``v`` dividing ``f``."""
    i = f.ring.gens.index(v)
    return min(m[i] for m in f.monoms())


def factor_out(f: PolyElement, v: PolyElement) -> Tuple[PolyElement, int]:
    """Split ``f = v^e * g`` with ``v`` not dividing ``g``."""
    if f.is_zero:
        raise ZeroIdealError("cannot factor the zero polynomial")
    e = variable_valuation(f, v)
    return (f.exquo(v**e) if e else f), e


def gcd_all(gens: Sequence[PolyElement]) -> PolyElement:
    """Monic gcd of all generators."""
    gens = [g for g in gens if not g.is_zero]
    if not gens:
        raise ZeroIdealError("gcd of the zero ideal is undefined")
    g = gens[0]
    for h in gens[1:]:
        if g.is_ground:
            break
        g = g.gcd(h)
    return g.monic() if not g.is_ground else g.ring.one


def ideal_product(first: Sequence[PolyElement], second: Sequence[PolyElement]) -> List[PolyElement]:
    """Generators of the product ideal, interreduced."""
    return list(groebner_basis([f * g for f in first for g in second]))


def ideal_power(gens: Sequence[PolyElement], e: int) -> List[PolyElement]:
    """Generators of ``J^e`` by repeated squaring with interreduction."""
    if e == 0:
        return [_ring_of(gens).one]
    base = list(groebner_basis(gens))
    result: Optional[List[PolyElement]] = None
    while e:
        if e & 1:
            result = base if result is None else ideal_product(result, base)
        e >>= 1
        if e:
            base = ideal_product(base, base)
    return result or []


def restrict(
    gens: Sequence[PolyElement], var: PolyElement, expr: PolyElement, target: PolyRing
) -> List[PolyElement]:
    """Substitute ``var -> expr`` and move the result into ``target``."""
    out = []
    for g in gens:
        h = g.compose(var, expr) if g.degree(var) > 0 else g
        h = h.set_ring(target)
        if not h.is_zero:
            out.append(h)
    return out


def dimension(gens: Sequence[PolyElement], units: Sequence[PolyElement] = ()) -> int:
    """Krull dimension of ``V(gens)`` inside the chart; ``-1`` when empty."""
    gens = [g for g in gens if not g.is_zero]
    if gens:
        R = _ring_of(gens)
    elif units:
        R = units[0].ring
    else:
        raise ValueError("cannot infer the ring of an empty generator list")
    if gens and locus_empty(gens, units):
        return -1
    nontrivial = [u for u in units if not u.is_ground]
    if nontrivial:
        S = _with_aux(R)
        s = S.gens[-1]
        work = [g.set_ring(S) for g in gens] + [S.one - s * _product((u.set_ring(S) for u in nontrivial), S)]
        n = len(S.gens)
    else:
        S, work, n = R, gens, len(R.gens)
    if not work:
        return n
    leads = [g.LM for g in groebner_basis(work, S)]
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            allowed = set(subset)
            if not any(all(e == 0 or i in allowed for i, e in enumerate(m)) for m in leads):
                return size
    return 0  # pragma: no cover


def jacobian_rank_at(gens: Sequence[PolyElement], point: Mapping[str, object], variables=None) -> int:
    """Rank of the Jacobian matrix of ``gens`` evaluated at ``point``."""
    from sympy import Matrix

    gens = [g for g in gens if not g.is_zero]
    if not gens:
        return 0
    R = _ring_of(gens)
    variables = list(R.gens if variables is None else variables)
    values = [to_domain(point.get(str(x), 0), R.domain) for x in R.gens]
    rows = []
    for g in gens:
        row = []
        for x in variables:
            d = g.diff(x)
            val = d(*values) if len(R.gens) > 1 else d(values[0])
            row.append(R.domain.to_sympy(val))
        rows.append(row)
    return Matrix(rows).rank()


def unit_cofactor(
    first: Sequence[PolyElement], second: Sequence[PolyElement], units: Sequence[PolyElement] = ()
) -> Optional[PolyElement]:
    """Return ``a`` in ``(first)`` with ``u - a`` in ``(second)``; see :func:`cofactor_pair`."""
    got = cofactor_pair(first, second, units)
    return None if got is None else got[0]


def cofactor_pair(
    first: Sequence[PolyElement], second: Sequence[PolyElement], units: Sequence[PolyElement] = ()
) -> Optional[Tuple[PolyElement, PolyElement]]:
    """Return ``(a, u)`` with ``a`` in ``(first)`` and ``u - a`` in ``(second)``.

    Without ``units`` the target ``u`` is 1; otherwise it is a power of the
    product of the units, which is what comaximality means inside the chart
    where they are inverted.  ``None`` when no such element exists.  The
    search runs a Buchberger loop that tracks, for every basis element, the
    part coming from ``first``.
    """
    first = _clean(first)
    second = _clean(second)
    if not first or not second:
        return None
    R = _ring_of(first)
    units = [u for u in units if not u.is_ground]
    G = groebner_basis(first + second)
    if len(G) == 1 and G[0].is_ground:
        target = R.one
    elif units:
        U = _product(units, R)
        target = None
        power = U
        for _ in range(8):
            if normal_form(power, G).is_zero:
                target = power
                break
            power = power * U
        if target is None:
            return None
    else:
        return None
    basis: List[Tuple[PolyElement, PolyElement]] = [(f, f) for f in first] + [(g, R.zero) for g in second]

    def reduce(h: PolyElement, tag: PolyElement) -> Tuple[PolyElement, PolyElement]:
        changed = True
        while changed and not h.is_zero:
            changed = False
            for g, gt in basis:
                m = R.monomial_div(h.LM, g.LM)
                if m is None:
                    continue
                c = R.domain.quo(h.LC, g.LC)
                h = h - g.mul_term((m, c))
                tag = tag - gt.mul_term((m, c))
                changed = True
                break
        return h, tag

    unit_target = target == R.one
    if unit_target:
        for g, gt in basis:
            if g.is_ground:
                return gt.quo_ground(g.LC), target
    pairs = [(i, j) for i in range(len(basis)) for j in range(i)]
    while pairs:
        i, j = pairs.pop(0)
        (f, ft), (g, gt) = basis[i], basis[j]
        lcm = R.monomial_lcm(f.LM, g.LM)
        mf = R.monomial_div(lcm, f.LM)
        mg = R.monomial_div(lcm, g.LM)
        cf = R.domain.quo(R.domain.one, f.LC)
        cg = R.domain.quo(R.domain.one, g.LC)
        h = f.mul_term((mf, cf)) - g.mul_term((mg, cg))
        ht = ft.mul_term((mf, cf)) - gt.mul_term((mg, cg))
        h, ht = reduce(h, ht)
        if h.is_zero:
            continue
        if unit_target and h.is_ground:
            return ht.quo_ground(h.LC), target
        basis.append((h, ht))
        k = len(basis) - 1
        pairs.extend((k, m) for m in range(k))
    rest, tag = reduce(target, R.zero)
    if not rest.is_zero:  # pragma: no cover - target was checked to lie in the ideal
        return None
    return -tag, target


def split_components(gens: Sequence[PolyElement], units: Sequence[PolyElement] = ()) -> List[List[PolyElement]]:
    """Split ``V(gens)`` into pieces by factoring basis elements.

    The result is a list of ideals whose zero sets cover ``V(gens)`` within
    the chart; each piece has a Groebner basis of irreducible elements over
    the base field.  Empty and redundant pieces are dropped.
    """
    todo = [list(groebner_basis(gens))]
    done: List[List[PolyElement]] = []
    while todo:
        cur = todo.pop()
        if not cur or locus_empty(cur, units):
            continue
        split = None
        for g in cur:
            if g.is_ground:
                continue
            _, factors = g.factor_list()
            if len(factors) > 1 or factors[0][1] > 1:
                split = (g, [f for f, _ in factors])
                break
        if split is None:
            done.append(cur)
            continue
        g, factors = split
        rest = [h for h in cur if h != g]
        for f in factors:
            todo.append(list(groebner_basis(rest + [f])))
    # drop pieces contained in others
    kept: List[List[PolyElement]] = []
    for i, piece in enumerate(done):
        redundant = False
        for j, other in enumerate(done):
            if i == j:
                continue
            if locus_contained(piece, other, units):
                if not locus_contained(other, piece, units) or j < i:
                    redundant = True
                    break
        if not redundant:
            kept.append(piece)
    return kept


def lex_basis(gens: Sequence[PolyElement], order: Sequence[str]) -> List[PolyElement]:
    """Reduced lexicographic basis with variables ranked as in ``order``."""
    R = _ring_of(gens)
    L = poly_ring(tuple(order), R.domain, lex)
    G = _sympy_groebner(_clean([g.set_ring(L) for g in gens]), L)
    return [g.set_ring(R) for g in G]


class Ideal:
    """A nonzero ideal of a polynomial ring, given by generators."""

    __slots__ = ("ring", "gens")

    def __init__(self, gens: Iterable[PolyElement], ring: Optional[PolyRing] = None):
        gens = list(gens)
        if ring is None:
            if not gens:
                raise ZeroIdealError("an ideal needs at least one generator")
            ring = gens[0].ring
        gens = [g.set_ring(ring) if g.ring != ring else g for g in gens]
        kept = [g for g in gens if not g.is_zero]
        if not kept:
            raise ZeroIdealError("the zero ideal is not a valid input")
        self.ring = ring
        self.gens = tuple(kept)

    @classmethod
    def parse(cls, names: Sequence[str], texts: Sequence[str], domain=QQ) -> "Ideal":
        from .syntax import parse_poly

        R = poly_ring(tuple(names), domain)
        return cls([parse_poly(t, R) for t in texts], R)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(str(s) for s in self.ring.symbols)

    def __iter__(self):
        return iter(self.gens)

    def __len__(self) -> int:
        return len(self.gens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal) or other.ring != self.ring:
            return NotImplemented
        return groebner_basis(self.gens) == groebner_basis(other.gens)

    def __hash__(self) -> int:
        return hash((self.ring, groebner_basis(self.gens)))

    def __repr__(self) -> str:
        from .syntax import format_poly

        return "Ideal(" + ", ".join(format_poly(g) for g in self.gens) + ")"

    def order_at_point(self, point: Mapping[str, object]) -> int:
        return order_at_point(self.gens, point)

    def delta(self) -> "Ideal":
        return Ideal(delta(self.gens), self.ring)

    def delta_power(self, k: int) -> "Ideal":
        return Ideal(delta_power(self.gens, k), self.ring)

    def sing_ideal(self, b: int) -> "Ideal":
        return Ideal(sing_ideal(self.gens, b), self.ring)

    def max_order(self, units: Sequence[PolyElement] = ()) -> int:
        return max_order(self.gens, units)

    def is_unit_ideal(self) -> bool:
        return is_unit_ideal(self.gens)

    def locus_contained(self, other: "Ideal", units: Sequence[PolyElement] = ()) -> bool:
        return locus_contained(self.gens, other.gens, units)

    def gcd_all(self) -> PolyElement:
        return gcd_all(self.gens)

    def contains(self, f: PolyElement) -> bool:
        return ideal_contains(self.gens, f)

    def groebner(self) -> Tuple[PolyElement, ...]:
        return groebner_basis(self.gens)

    def vanishes_at(self, point: Mapping[str, object]) -> bool:
        R = self.ring
        values = [to_domain(point.get(str(x), 0), R.domain) for x in R.gens]
        return all(g(*values) == 0 if len(values) > 1 else g(values[0]) == 0 for g in self.gens)


IdealRep = Ideal
