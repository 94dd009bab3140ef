"""Rational helpers shared by every module.

``fractions.Fraction`` is the exact carrier: always in lowest terms with a
positive denominator, zero stored as 0/1.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import comb

__all__ = [
    "Fraction",
    "as_fraction",
    "binomial",
    "factorial",
    "format_fraction",
    "parse_fraction",
    "reciprocal_factorial",
]

_FRACTION_RE = re.compile(r"^[-−]?\d+(/\d+)?$")


@lru_cache(maxsize=None)
def factorial(n: int) -> int:
    if n < 0:
        raise ValueError(f"factorial of negative integer {n}")
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def reciprocal_factorial(n: int) -> Fraction:
    """1/n!, with 1/n! = 0 for every negative n.

    This is the single place where the negative-factorial convention lives;
    all formulas whose index ranges reach below zero go through it.
    """
    if n < 0:
        return Fraction(0)
    return Fraction(1, factorial(n))


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def parse_fraction(text: str, *, require_reduced: bool = False) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` (optionally signed, ASCII or U+2212 minus)."""
    s = text.strip()
    if not _FRACTION_RE.match(s):
        raise ValueError(f"not a rational literal: {text!r}")
    negative = s[0] in "-−"
    if negative:
        s = s[1:]
    if "/" in s:
        p_str, q_str = s.split("/")
        p, q = int(p_str), int(q_str)
        if q == 0:
            raise ValueError(f"zero denominator in {text!r}")
        value = Fraction(p, q)
        if require_reduced and (value.numerator != p or value.denominator != q or q == 1):
            raise ValueError(f"fraction {text!r} is not in reduced form")
    else:
        value = Fraction(int(s))
    return -value if negative else value


def format_fraction(x: Fraction | int) -> str:
    """``"p/q"`` in lowest terms, integers without ``/1``."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
