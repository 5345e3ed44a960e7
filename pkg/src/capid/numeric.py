"""Number handling for the two arithmetic modes.

Exact mode works on :class:`fractions.Fraction` (and ints) and compares with
zero tolerance.  Float mode keeps IEEE doubles and compares with an absolute
tolerance of 1e-9.  A value collection is "exact" when every member is a
Fraction or an int; mixing a single float switches all comparisons on that
object to the toleranced versions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from .errors import ValidationError

Num = Union[Fraction, int, float]

#: Absolute comparison tolerance used whenever float values are involved.
FLOAT_TOL = 1e-9

ZERO = Fraction(0)
ONE = Fraction(1)


def is_exact_value(x: Num) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def all_exact(values: Iterable[Num]) -> bool:
    return all(is_exact_value(v) for v in values)


def tol_for(*collections: Iterable[Num]) -> Num:
    """Zero for all-exact inputs, FLOAT_TOL as soon as any float appears."""
    for values in collections:
        if not all_exact(values):
            return FLOAT_TOL
    return ZERO


def ge(a: Num, b: Num, tol: Num) -> bool:
    """a >= b up to tol."""
    return a >= b - tol


def eq(a: Num, b: Num, tol: Num) -> bool:
    """a == b up to tol."""
    return abs(a - b) <= tol


def as_fraction(x: Num) -> Fraction:
    """Exact conversion; floats map to their exact binary value."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def parse_number(value, exact: bool) -> Num:
    """Parse a JSON-borne number.

    Exact mode accepts ints, "p/q" strings and decimal strings/numbers
    (decimals are read at face value, so 0.25 means 1/4).  Float mode
    coerces everything to float.
    """
    if isinstance(value, bool):
        raise ValidationError(f"expected a number, got {value!r}")
    if exact:
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            try:
                return Fraction(value)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValidationError(f"cannot parse number {value!r}") from exc
        if isinstance(value, float):
            # decimal reading: the JSON text 0.1 means 1/10, not the binary double
            return Fraction(repr(value))
        raise ValidationError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse number {value!r}") from exc
    raise ValidationError(f"expected a number, got {value!r}")


def format_number(x: Num) -> Union[str, float]:
    """Lossless report encoding: "p/q" strings in exact mode, floats otherwise."""
    if is_exact_value(x):
        return str(Fraction(x))
    return float(x)
