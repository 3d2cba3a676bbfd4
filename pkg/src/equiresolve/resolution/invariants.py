"""Values of the resolution function and their total order.

A value in dimension ``d`` is the bottom element, the top element, or a
sequence of at most ``d`` heads.  Missing trailing heads stand for the
infinity tail, so ``(t,)`` in dimension 2 reads ``(t, inf)``.  A Gamma head
is always the last one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Tuple, Union


def _fmt(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class THead:
    """Head ``(w-ord, n)`` used while the weak order is positive."""

    w: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "w", Fraction(self.w))
        if self.w <= 0:
            raise ValueError("a t-head needs a positive w-ord")

    def key(self) -> tuple:
        return (1, self.w, self.n)

    def to_json(self) -> dict:
        return {"kind": "t", "w": _fmt(self.w), "n": self.n}

    def __str__(self) -> str:
        return f"({_fmt(self.w)},{self.n})"


@dataclass(frozen=True)
class GammaHead:
    """Head ``(-p, w, idx)`` of the monomial phase."""

    p: int
    w: Fraction
    idx: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", Fraction(self.w))
        object.__setattr__(self, "idx", tuple(sorted(self.idx, reverse=True)))

    def key(self) -> tuple:
        return (0, -self.p, self.w, self.idx)

    def to_json(self) -> dict:
        return {"kind": "gamma", "p": self.p, "w": _fmt(self.w), "idx": list(self.idx)}

    def __str__(self) -> str:
        return "G(-%d,%s,(%s))" % (self.p, _fmt(self.w), ",".join(map(str, self.idx)))


Head = Union[THead, GammaHead]
_INF_KEY = (2,)


@total_ordering
@dataclass(frozen=True)
class InvValue:
    """Element of the ordered set of values in dimension ``dim``."""

    dim: int
    heads: Tuple[Head, ...] = ()
    kind: str = "value"

    def __post_init__(self):
        object.__setattr__(self, "heads", tuple(self.heads))
        if self.kind not in ("value", "bottom", "top"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "value":
            if not self.heads:
                raise ValueError("a value needs at least one head")
            if len(self.heads) > self.dim:
                raise ValueError("more heads than the dimension allows")
            for h in self.heads[:-1]:
                if isinstance(h, GammaHead):
                    raise ValueError("a Gamma head must be the last head")

    @classmethod
    def bottom(cls, dim: int) -> "InvValue":
        return cls(dim, (), "bottom")

    @classmethod
    def top(cls, dim: int) -> "InvValue":
        return cls(dim, (), "top")

    def key(self) -> tuple:
        if self.kind == "bottom":
            return ((0,),)
        if self.kind == "top":
            return ((3,),)
        padded = [h.key() for h in self.heads] + [_INF_KEY] * (self.dim - len(self.heads))
        return ((1,),) + tuple(padded)

    def _check(self, other: "InvValue") -> None:
        if not isinstance(other, InvValue):
            raise TypeError("can only compare InvValue objects")
        if other.dim != self.dim:
            raise ValueError(f"values live in different dimensions ({self.dim} and {other.dim})")

    def __lt__(self, other: "InvValue") -> bool:
        self._check(other)
        return self.key() < other.key()

    def __eq__(self, other) -> bool:
        if not isinstance(other, InvValue):
            return NotImplemented
        return self.dim == other.dim and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.dim, self.key()))

    @property
    def w_ord(self) -> Fraction:
        """Top weak order; zero in the monomial phase and at the bottom."""
        if self.kind == "value" and isinstance(self.heads[0], THead):
            return self.heads[0].w
        return Fraction(0)

    @property
    def t(self) -> Tuple[Fraction, int]:
        """Top ``t`` pair; ``(0, 0)`` outside the positive-order phase."""
        if self.kind == "value" and isinstance(self.heads[0], THead):
            return (self.heads[0].w, self.heads[0].n)
        return (Fraction(0), 0)

    def to_json(self) -> dict:
        if self.kind != "value":
            return {"dim": self.dim, "kind": self.kind, "heads": []}
        return {"dim": self.dim, "kind": "value", "heads": [h.to_json() for h in self.heads]}

    def __str__(self) -> str:
        if self.kind == "bottom":
            return "0"
        if self.kind == "top":
            return "inf"
        parts = [str(h) for h in self.heads]
        if len(self.heads) < self.dim and not isinstance(self.heads[-1], GammaHead):
            parts.append("inf")
        return "(" + ", ".join(parts) + ")"


def lambda_embed(value: InvValue, extra: int) -> InvValue:
    """View a value of dimension ``d`` in dimension ``d + extra``."""
    if extra < 0:
        raise ValueError("cannot embed into a smaller dimension")
    return InvValue(value.dim + extra, value.heads, value.kind)


def head_from_json(data: dict) -> Head:
    if data["kind"] == "t":
        return THead(Fraction(data["w"]), int(data["n"]))
    return GammaHead(int(data["p"]), Fraction(data["w"]), tuple(data["idx"]))


def value_from_json(data: dict) -> InvValue:
    return InvValue(int(data["dim"]), tuple(head_from_json(h) for h in data["heads"]), data["kind"])


def strictly_decreasing(values: Iterable[InvValue]) -> bool:
    vals = list(values)
    return all(b < a for a, b in zip(vals, vals[1:]))
