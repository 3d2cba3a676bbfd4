"""Argument checks shared by the estimators."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

import numpy as np

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def check_names(names, what: str = "variables", allow_empty: bool = False) -> Tuple[str, ...]:
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    names = tuple(str(n) for n in names)
    if not names and not allow_empty:
        raise ValueError(f"{what} must not be empty")
    bad = [n for n in names if not _IDENT.match(n)]
    if bad:
        raise ValueError(f"invalid {what}: {bad}")
    if len(set(names)) != len(names):
        raise ValueError(f"{what} must be distinct")
    return names


def check_positive_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError(f"{what} must be a positive integer, got {value!r}")
    return int(value)


def check_ideals(X) -> List[Tuple[str, ...]]:
    """Normalize a batch of ideals.

    Each item is either one polynomial string, which may list several
    generators separated by commas, or a sequence of generator strings.
    """
    if isinstance(X, str):
        raise TypeError("expected a sequence of ideals, got a single string; wrap it in a list")
    out = []
    for item in X:
        if isinstance(item, str):
            gens = tuple(g.strip() for g in item.split(",") if g.strip())
        elif isinstance(item, Iterable):
            gens = tuple(str(g).strip() for g in item)
        else:
            raise TypeError(f"cannot read an ideal from {item!r}")
        if not gens:
            raise ValueError("an ideal needs at least one generator")
        out.append(gens)
    if not out:
        raise ValueError("expected at least one ideal")
    return out


def _rational(value) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("booleans are not parameter values")
    if isinstance(value, (np.integer, np.floating)):
        value = value.item()
    if isinstance(value, (int, float, str, Fraction)):
        return Fraction(value)
    num, den = getattr(value, "numerator", None), getattr(value, "denominator", None)
    if num is not None and den is not None:
        return Fraction(int(num), int(den))
    raise TypeError(f"not a rational number: {value!r}")


def check_samples(T, m: int) -> List[Tuple[Fraction, ...]]:
    """Parameter samples as tuples of rationals of length ``m``.

    Scalars are accepted when ``m == 1``; floats must be exact binary
    fractions, so pass strings such as ``"1/3"`` for other rationals.
    """
    if isinstance(T, np.ndarray) and T.ndim == 2 and T.shape[1] != m:
        raise ValueError(f"expected samples with {m} columns, got {T.shape[1]}")
    out = []
    for row in T:
        if isinstance(row, (str, int, float, Fraction, np.number)) and not isinstance(row, bool):
            row = (row,)
        values = tuple(_rational(v) for v in row)
        if len(values) != m:
            raise ValueError(f"a sample needs {m} values, got {len(values)}")
        out.append(values)
    if not out:
        raise ValueError("expected at least one sample")
    return out


def as_int_array(values: Sequence[int]) -> np.ndarray:
    return np.asarray(list(values), dtype=np.int64)
