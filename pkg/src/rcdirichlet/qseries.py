"""Truncated q-expansions with exact rational coefficients.

A :class:`PiGradedSeries` stands for

    f(z) = sum_e (2 pi i / h)^e sum_{k=0}^{N} c_{e,k} q^k + O(q^{N+1}),
    q = exp(2 pi i z / h),

where the transcendental factor ``2 pi i / h`` is kept as a formal
indeterminate.  z-differentiation multiplies by it exactly once, so every
identity between derivatives of forms can be compared over the rationals,
grade by grade.

Each slice is stored as a common positive denominator plus a tuple of
integer numerators, so Cauchy products and derivatives run on Python ints
and only canonicalize once per slice.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

from ._rational import as_fraction

__all__ = [
    "EvalPoint",
    "GradingError",
    "PiGradedSeries",
    "add",
    "eval_at",
    "homogeneous_grade",
    "make_series",
    "mul",
    "nth_z_derivative",
    "one",
    "scale",
    "sum_series",
    "z_derivative",
    "zero",
]


class GradingError(ValueError):
    """Raised when a series is not homogeneous in the formal 2*pi*i/h grade."""


# (denominator, numerators); canonical means gcd(den, *nums) == 1, den > 0,
# and not all numerators zero.
_Slice = tuple[int, tuple[int, ...]]


def _canonical(den: int, nums: Sequence[int]) -> _Slice | None:
    g = reduce(math.gcd, nums, 0)
    if g == 0:
        return None
    g = math.gcd(g, den)
    if den < 0:
        g = -g
    if g != 1:
        return den // g, tuple(c // g for c in nums)
    return den, tuple(nums)


def _slice_from_fractions(values: Iterable) -> _Slice | None:
    fracs = [as_fraction(v) for v in values]
    den = math.lcm(*(c.denominator for c in fracs)) if fracs else 1
    return _canonical(den, [c.numerator * (den // c.denominator) for c in fracs])


def _truncate(s: _Slice, n: int) -> _Slice | None:
    den, nums = s
    if len(nums) == n + 1:
        return s
    return _canonical(den, nums[: n + 1])


def _convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    # Truncated Cauchy product over the support of ``a``; q-expansions of
    # cusp forms and derivatives have zero leading terms, so skip zeros.
    out = [0] * (n + 1)
    support = [(i, c) for i, c in enumerate(a[: n + 1]) if c]
    for i, c in support:
        bi = b[: n + 1 - i]
        for j, d in enumerate(bi):
            if d:
                out[i + j] += c * d
    return out


class PiGradedSeries:
    """Truncated Fourier expansion graded by formal powers of 2*pi*i/h.

    Instances are immutable; arithmetic operators return new series.  The
    zero series has an empty slice map.
    """

    __slots__ = ("_width", "_precision", "_data", "_fractions")

    def __init__(self, width_h, precision: int, data: Mapping[int, _Slice]):
        # Internal constructor; use make_series() for validated input.
        self._width = as_fraction(width_h)
        self._precision = precision
        self._data: dict[int, _Slice] = dict(sorted(data.items()))
        self._fractions: dict[int, tuple[Fraction, ...]] | None = None

    @property
    def width_h(self) -> Fraction:
        return self._width

    @property
    def precision(self) -> int:
        return self._precision

    @property
    def grades(self) -> tuple[int, ...]:
        return tuple(self._data)

    @property
    def slices(self) -> dict[int, tuple[Fraction, ...]]:
        if self._fractions is None:
            self._fractions = {
                e: tuple(Fraction(c, den) for c in nums)
                for e, (den, nums) in self._data.items()
            }
        return dict(self._fractions)

    def coefficients(self, grade: int) -> tuple[Fraction, ...]:
        """Slice at ``grade``; an all-zero vector if the grade is absent."""
        if grade not in self._data:
            return (Fraction(0),) * (self._precision + 1)
        return self.slices[grade]

    def is_zero(self) -> bool:
        return not self._data

    def truncate(self, precision: int) -> PiGradedSeries:
        if precision > self._precision:
            raise ValueError(
                f"cannot extend precision {self._precision} to {precision}"
            )
        if precision == self._precision:
            return self
        data = {}
        for e, s in self._data.items():
            t = _truncate(s, precision)
            if t is not None:
                data[e] = t
        return PiGradedSeries(self._width, precision, data)

    def _check_partner(self, other: PiGradedSeries) -> None:
        if not isinstance(other, PiGradedSeries):
            raise TypeError(f"expected PiGradedSeries, got {type(other).__name__}")
        if self._width != other._width:
            raise ValueError(
                f"width mismatch: h={self._width} versus h={other._width}"
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = one(self._width, self._precision).scale(other)
        elif not isinstance(other, PiGradedSeries):
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> PiGradedSeries:
        return PiGradedSeries(
            self._width,
            self._precision,
            {e: (den, tuple(-c for c in nums)) for e, (den, nums) in self._data.items()},
        )

    def __sub__(self, other):
        if not isinstance(other, (int, Fraction, PiGradedSeries)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, PiGradedSeries):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        return NotImplemented

    def scale(self, c) -> PiGradedSeries:
        return scale(self, c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiGradedSeries):
            return NotImplemented
        return (
            self._width == other._width
            and self._precision == other._precision
            and self._data == other._data
        )

    def __hash__(self) -> int:
        return hash((self._width, self._precision, tuple(self._data.items())))

    def __repr__(self) -> str:
        parts = []
        for e, coeffs in self.slices.items():
            shown = ", ".join(str(c) for c in coeffs[:6])
            more = ", ..." if len(coeffs) > 6 else ""
            parts.append(f"{e}: [{shown}{more}]")
        return (
            f"PiGradedSeries(h={self._width}, N={self._precision}, "
            f"{{{'; '.join(parts)}}})"
        )


def make_series(width_h, precision_N: int, slices: Mapping[int, Sequence]) -> PiGradedSeries:
    """Build a canonical series from ``{grade: [c_0, ..., c_N]}``.

    Coefficients may be ints, Fractions or ``"p/q"`` strings.  All-zero
    slices are dropped.
    """
    width = as_fraction(width_h)
    if width <= 0:
        raise ValueError(f"width h must be positive, got {width}")
    if precision_N < 0:
        raise ValueError(f"precision must be nonnegative, got {precision_N}")
    data = {}
    for e, vec in slices.items():
        e = int(e)
        if e < 0:
            raise ValueError(f"grade must be nonnegative, got {e}")
        if len(vec) != precision_N + 1:
            raise ValueError(
                f"slice {e} has length {len(vec)}, expected {precision_N + 1}"
            )
        s = _slice_from_fractions(vec)
        if s is not None:
            data[e] = s
    return PiGradedSeries(width, precision_N, data)


def zero(width_h=1, precision_N: int = 0) -> PiGradedSeries:
    return make_series(width_h, precision_N, {})


def one(width_h=1, precision_N: int = 0) -> PiGradedSeries:
    return make_series(width_h, precision_N, {0: [1] + [0] * precision_N})


def add(f: PiGradedSeries, g: PiGradedSeries) -> PiGradedSeries:
    f._check_partner(g)
    n = min(f.precision, g.precision)
    data: dict[int, _Slice] = {}
    for e in sorted(set(f._data) | set(g._data)):
        a = f._data.get(e)
        b = g._data.get(e)
        if a is None or b is None:
            s = _truncate(a if b is None else b, n)
        else:
            (da, na), (db, nb) = a, b
            den = math.lcm(da, db)
            sa, sb = den // da, den // db
            s = _canonical(den, [x * sa + y * sb for x, y in zip(na[: n + 1], nb[: n + 1])])
        if s is not None:
            data[e] = s
    return PiGradedSeries(f.width_h, n, data)


def scale(f: PiGradedSeries, c) -> PiGradedSeries:
    c = as_fraction(c)
    if c == 0:
        return PiGradedSeries(f.width_h, f.precision, {})
    data = {}
    for e, (den, nums) in f._data.items():
        data[e] = _canonical(den * c.denominator, [x * c.numerator for x in nums])
    return PiGradedSeries(f.width_h, f.precision, data)


def mul(f: PiGradedSeries, g: PiGradedSeries) -> PiGradedSeries:
    f._check_partner(g)
    n = min(f.precision, g.precision)
    acc: dict[int, tuple[int, list[int]]] = {}
    for ea, (da, na) in f._data.items():
        for eb, (db, nb) in g._data.items():
            prod = _convolve(na, nb, n)
            e, den = ea + eb, da * db
            if e in acc:
                d0, v0 = acc[e]
                common = math.lcm(d0, den)
                s0, s1 = common // d0, common // den
                acc[e] = (common, [x * s0 + y * s1 for x, y in zip(v0, prod)])
            else:
                acc[e] = (den, prod)
    data = {}
    for e, (den, nums) in acc.items():
        s = _canonical(den, nums)
        if s is not None:
            data[e] = s
    return PiGradedSeries(f.width_h, n, data)


def z_derivative(f: PiGradedSeries) -> PiGradedSeries:
    """d/dz = (2 pi i / h) q d/dq: slice (e, c_k) becomes (e + 1, k c_k)."""
    data = {}
    for e, (den, nums) in f._data.items():
        s = _canonical(den, [k * c for k, c in enumerate(nums)])
        if s is not None:
            data[e + 1] = s
    return PiGradedSeries(f.width_h, f.precision, data)


def nth_z_derivative(f: PiGradedSeries, r: int) -> PiGradedSeries:
    if r < 0:
        raise ValueError(f"derivative order must be nonnegative, got {r}")
    if r == 0:
        return f
    data = {}
    for e, (den, nums) in f._data.items():
        s = _canonical(den, [k**r * c for k, c in enumerate(nums)])
        if s is not None:
            data[e + r] = s
    return PiGradedSeries(f.width_h, f.precision, data)


def homogeneous_grade(f: PiGradedSeries) -> int:
    if f.is_zero():
        raise GradingError("the zero series has no grade")
    if len(f._data) != 1:
        raise GradingError(f"series is inhomogeneous, grades {list(f._data)}")
    return next(iter(f._data))


@dataclass(frozen=True)
class EvalPoint:
    z: complex
    truncation_terms: int

    def __post_init__(self):
        if complex(self.z).imag <= 0:
            raise ValueError(f"point {self.z} is not in the upper half-plane")
        if self.truncation_terms < 1:
            raise ValueError("truncation_terms must be positive")


def eval_at(f: PiGradedSeries, p: EvalPoint | complex) -> complex:
    """Evaluate in double precision, summing ascending k then ascending e.

    A bare complex number uses every known coefficient.
    """
    if not isinstance(p, EvalPoint):
        p = EvalPoint(complex(p), f.precision + 1)
    if p.truncation_terms > f.precision + 1:
        raise ValueError(
            f"{p.truncation_terms} terms requested but series is known "
            f"through q^{f.precision}"
        )
    h = float(f.width_h)
    z = complex(p.z)
    q = cmath.exp(2j * math.pi * z / h)
    pi_tilde = 2j * math.pi / h
    terms = p.truncation_terms
    total = 0j
    for e, (den, nums) in f._data.items():
        inner = 0j
        qk = 1 + 0j
        for c in nums[:terms]:
            if c:
                inner += (c / den) * qk
            qk *= q
        total += pi_tilde**e * inner
    return total


def sum_series(items: Iterable[PiGradedSeries], width_h, precision: int) -> PiGradedSeries:
    """Sum an iterable of series; an empty iterable gives zero at ``precision``."""
    out = zero(width_h, precision)
    for s in items:
        out = add(out, s)
    return out
