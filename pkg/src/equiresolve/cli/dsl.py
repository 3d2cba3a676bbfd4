"""Problem files: a small line-oriented language and its canonical printer.

A problem file declares coordinates, an ideal and a list of tasks::

    # the cusp as a basic object
    vars x y
    ideal x^2 - y^3
    b = 2
    task resolve

Families add ``params`` and sample points::

    vars x y
    params t
    ideal x^2 - y^2*(y + t)
    task stratify (0, 1, -1, 2)

Every identifier must be declared before it is used.  Printing a parsed
file and parsing the result gives back the same :class:`ProblemFile`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from ..algebra import poly_ring
from ..syntax import PolySyntaxError, format_poly, parse_poly

__all__ = ["DSLError", "ProblemFile", "Task", "TASKS", "format_problem", "parse_problem"]

#: Task names, mapped to the argument they take.
TASKS = {
    "resolve": None,
    "principalize": None,
    "desingularize": None,
    "tau": "point",
    "stratify": "points",
    "check-ae": "points",
    "check-tau": "points",
    "check-thm23": "points",
}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED = {"vars", "params", "divisor", "ideal", "b", "task"}

Point = Tuple[Fraction, ...]


class DSLError(ValueError):
    """A problem file that does not parse; positions are 1-based."""

    code = "parse-error"

    def __init__(self, message: str, line: int, column: int, kind: str = "syntax"):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.kind = kind

    def to_json(self) -> dict:
        return {"code": self.code, "kind": self.kind, "line": self.line, "column": self.column, "message": self.message}


@dataclass(frozen=True)
class Task:
    name: str
    points: Tuple[Point, ...] = ()


@dataclass(frozen=True)
class ProblemFile:
    vars: Tuple[str, ...]
    ideal: Tuple[str, ...]
    params: Tuple[str, ...] = ()
    divisors: Tuple[Tuple[str, str], ...] = ()
    b: int = 1
    tasks: Tuple[Task, ...] = field(default_factory=tuple)

    @property
    def names(self) -> Tuple[str, ...]:
        return self.vars + self.params

    @property
    def is_family(self) -> bool:
        return bool(self.params)


# ---------------------------------------------------------------------------
# printing


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_point(p: Point) -> str:
    return "(" + ", ".join(_fmt_rational(q) for q in p) + ")"


def _fmt_points(points: Tuple[Point, ...], m: int) -> str:
    if m == 1:
        return "(" + ", ".join(_fmt_rational(p[0]) for p in points) + ")"
    return "(" + ", ".join(_fmt_point(p) for p in points) + ")"


def format_problem(p: ProblemFile) -> str:
    """Canonical text of a problem file."""
    lines = ["vars " + " ".join(p.vars)]
    if p.params:
        lines.append("params " + " ".join(p.params))
    for label, eq in p.divisors:
        lines.append(f"divisor {label} = {eq}")
    lines.append("ideal " + ", ".join(p.ideal))
    lines.append(f"b = {p.b}")
    for t in p.tasks:
        arg = TASKS[t.name]
        if arg is None:
            lines.append(f"task {t.name}")
        elif arg == "point":
            lines.append(f"task {t.name} {_fmt_point(t.points[0])}")
        else:
            lines.append(f"task {t.name} {_fmt_points(t.points, len(p.params))}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing


class _Line:
    """Cursor over one source line."""

    def __init__(self, text: str, number: int):
        self.text = text
        self.number = number
        self.pos = 0

    def error(self, message: str, pos: Optional[int] = None, kind: str = "syntax") -> DSLError:
        return DSLError(message, self.number, (self.pos if pos is None else pos) + 1, kind)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def ident(self, what: str) -> str:
        self.skip()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return m.group()

    def literal(self, token: str) -> None:
        self.skip()
        if not self.text.startswith(token, self.pos):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def finish(self) -> None:
        if not self.at_end():
            raise self.error(f"unexpected {self.text[self.pos:].split()[0]!r}")

    def rest(self) -> Tuple[str, int]:
        self.skip()
        start = self.pos
        self.pos = len(self.text)
        return self.text[start:], start


_NUMBER = re.compile(r"[+-]?\d+(?:/\d+)?")


def _parse_tuple(line: _Line):
    """A parenthesized, possibly nested, tuple of rationals."""
    line.literal("(")
    items: list = []
    while True:
        line.skip()
        if line.text.startswith("(", line.pos):
            items.append(_parse_tuple(line))
        else:
            m = _NUMBER.match(line.text, line.pos)
            if not m:
                raise line.error("expected a rational number")
            num = m.group()
            if "/" in num and int(num.split("/")[1]) == 0:
                raise line.error("zero denominator")
            items.append(Fraction(num))
            line.pos = m.end()
        line.skip()
        if line.text.startswith(",", line.pos):
            line.pos += 1
            continue
        line.literal(")")
        return tuple(items)


def _as_point(item, m: int, line: _Line, start: int) -> Point:
    if isinstance(item, Fraction):
        item = (item,)
    if any(not isinstance(q, Fraction) for q in item):
        raise line.error("points are tuples of rationals", start)
    if len(item) != m:
        raise line.error(f"a point needs {m} coordinates, got {len(item)}", start)
    return tuple(item)


def _split_top(text: str, offset: int) -> List[Tuple[str, int]]:
    """Split at commas outside parentheses, keeping each piece's offset."""
    pieces, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            pieces.append((text[start:i], offset + start))
            start = i + 1
    pieces.append((text[start:], offset + start))
    return pieces


class _Parser:
    def __init__(self):
        self.vars: Optional[Tuple[str, ...]] = None
        self.params: Optional[Tuple[str, ...]] = None
        self.divisors: List[Tuple[str, str]] = []
        self.ideal: Optional[Tuple[str, ...]] = None
        self.b: Optional[int] = None
        self.tasks: List[Task] = []

    @property
    def names(self) -> Tuple[str, ...]:
        return (self.vars or ()) + (self.params or ())

    def poly(self, line: _Line, text: str, start: int) -> str:
        lead = len(text) - len(text.lstrip())
        if not text.strip():
            raise line.error("expected a polynomial", start + lead)
        if not self.names:
            m = _IDENT.search(text)
            if m:
                raise line.error(f"undeclared identifier {m.group()!r}", start + m.start(), "undeclared")
        try:
            f = parse_poly(text.strip(), poly_ring(self.names or ("_",)))
        except PolySyntaxError as exc:
            kind = "undeclared" if exc.identifier else "syntax"
            msg = f"undeclared identifier {exc.identifier!r}" if exc.identifier else str(exc)
            raise line.error(msg, start + lead + exc.position, kind) from None
        return format_poly(f)

    def declare(self, line: _Line, attr: str) -> None:
        if getattr(self, attr) is not None:
            raise line.error(f"duplicate {attr} declaration", 0, "duplicate")
        names = []
        while not line.at_end():
            pos = line.pos
            name = line.ident("an identifier")
            if name in _RESERVED:
                raise line.error(f"{name!r} is a keyword", pos)
            if name in names or name in self.names:
                raise line.error(f"duplicate declaration of {name!r}", pos, "duplicate")
            if name in {d for d, _ in self.divisors}:
                raise line.error(f"{name!r} already names a divisor", pos, "duplicate")
            names.append(name)
        if not names:
            raise line.error(f"{attr} needs at least one identifier")
        setattr(self, attr, tuple(names))

    def statement(self, line: _Line) -> None:
        start = line.pos
        key = line.ident("a statement keyword")
        if key == "vars" or key == "params":
            if key == "params" and self.vars is None:
                raise line.error("params must follow vars", start)
            if key == "vars" and self.ideal is not None:
                raise line.error("vars must precede the ideal", start)
            self.declare(line, key)
        elif key == "divisor":
            line.skip()
            pos = line.pos
            label = line.ident("a divisor label")
            if label in {d for d, _ in self.divisors} or label in self.names:
                raise line.error(f"duplicate declaration of {label!r}", pos, "duplicate")
            line.literal("=")
            text, at = line.rest()
            self.divisors.append((label, self.poly(line, text, at)))
        elif key == "ideal":
            if self.ideal is not None:
                raise line.error("duplicate ideal declaration", start, "duplicate")
            text, at = line.rest()
            gens = [self.poly(line, piece, off) for piece, off in _split_top(text, at)]
            if all(g == "0" for g in gens):
                raise line.error("the ideal is zero", at, "zero-ideal")
            self.ideal = tuple(g for g in gens if g != "0")
        elif key == "b":
            if self.b is not None:
                raise line.error("duplicate b declaration", start, "duplicate")
            line.literal("=")
            line.skip()
            m = re.compile(r"\d+").match(line.text, line.pos)
            if not m:
                raise line.error("expected a positive integer")
            if int(m.group()) < 1:
                raise line.error("b must be at least 1")
            self.b = int(m.group())
            line.pos = m.end()
            line.finish()
        elif key == "task":
            self.task(line)
        else:
            raise line.error(f"unknown statement {key!r}", start)

    def task(self, line: _Line) -> None:
        line.skip()
        pos = line.pos
        m = re.compile(r"[a-z][a-z0-9-]*").match(line.text, pos)
        if not m or m.group() not in TASKS:
            raise line.error("expected a task name", pos)
        name = m.group()
        line.pos = m.end()
        arg = TASKS[name]
        if arg is None:
            line.finish()
            self.tasks.append(Task(name))
            return
        if not self.params:
            raise line.error(f"task {name} needs declared params", pos, "undeclared")
        m_ = len(self.params)
        line.skip()
        at = line.pos
        items = _parse_tuple(line)
        line.finish()
        if arg == "point":
            points = (_as_point(items, m_, line, at),)
        elif m_ == 1 and all(isinstance(q, Fraction) for q in items):
            points = tuple((q,) for q in items)
        else:
            if any(isinstance(q, Fraction) for q in items):
                raise line.error("expected a list of parenthesized points", at)
            points = tuple(_as_point(q, m_, line, at) for q in items)
        if not points:
            raise line.error("the point list is empty", at)
        self.tasks.append(Task(name, points))

    def result(self, last_line: int) -> ProblemFile:
        if self.vars is None:
            raise DSLError("missing vars declaration", last_line, 1)
        if self.ideal is None:
            raise DSLError("missing ideal declaration", last_line, 1)
        return ProblemFile(
            vars=self.vars,
            ideal=self.ideal,
            params=self.params or (),
            divisors=tuple(self.divisors),
            b=1 if self.b is None else self.b,
            tasks=tuple(self.tasks),
        )


def parse_problem(text: str) -> ProblemFile:
    """Parse problem-file text; raises :class:`DSLError` with a position."""
    parser = _Parser()
    number = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        line = _Line(body, number)
        if line.at_end():
            continue
        parser.statement(line)
    return parser.result(max(number, 1))
