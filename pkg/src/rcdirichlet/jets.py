"""Polynomials over q-series, the Lambda/Xi isomorphisms and slash actions.

An element of F_m[X] is stored as its coefficient list ``(f_0, ..., f_m)``
of :class:`~rcdirichlet.qseries.PiGradedSeries`.  Two thin subclasses tag
which side of the correspondence a polynomial lives on:

* :class:`ModularPolynomial`: coefficient r carries grade r (images of Xi);
* :class:`QuasimodularPolynomial`: coefficient r carries grade m - r
  (images of Lambda and products of them).

Exact maps (``lambda_map``, ``xi_map``, ``qp_mul``, ``project``) work over
the rationals.  The slash actions are numeric: they evaluate the series at
points of the upper half-plane in double precision.  ``check_equivariance``
needs z-derivatives of slashed functions, which it gets from truncated
complex Taylor expansions ("jets") around the evaluation point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._rational import binomial, factorial, reciprocal_factorial
from .forms import FormDescriptor
from .qseries import (
    EvalPoint,
    GradingError,
    PiGradedSeries,
    eval_at,
    nth_z_derivative,
    one,
    sum_series,
    zero,
)

__all__ = [
    "GroupElement",
    "IDENTITY",
    "ModularPolynomial",
    "QuasimodularPolynomial",
    "S",
    "scaled_residual",
    "T",
    "TS",
    "check_equivariance",
    "dslash",
    "embed_modular",
    "evaluate_polynomial",
    "fit_quasimodular_coefficients",
    "invariance_residual",
    "lambda_map",
    "project",
    "qp_mul",
    "slash_X",
    "slash_weight",
    "xi_map",
]


# --------------------------------------------------------------------------
# Polynomials


class _SeriesPolynomial:
    __slots__ = ("weight", "coeffs")

    def __init__(self, weight: int, coeffs: Sequence[PiGradedSeries]):
        if not coeffs:
            raise ValueError("a polynomial needs at least the X^0 coefficient")
        h = coeffs[0].width_h
        for c in coeffs:
            if c.width_h != h:
                raise ValueError("all coefficients must share the same width h")
        self.weight = int(weight)
        self.coeffs = tuple(coeffs)

    @property
    def degree_bound(self) -> int:
        return len(self.coeffs) - 1

    @property
    def width_h(self) -> Fraction:
        return self.coeffs[0].width_h

    @property
    def precision(self) -> int:
        return min(c.precision for c in self.coeffs)

    def expected_grade(self, r: int) -> int:
        raise NotImplementedError

    def grading_ok(self) -> bool:
        for r, c in enumerate(self.coeffs):
            if not c.is_zero() and c.grades != (self.expected_grade(r),):
                return False
        return True

    def check_grading(self) -> None:
        for r, c in enumerate(self.coeffs):
            if not c.is_zero() and c.grades != (self.expected_grade(r),):
                raise GradingError(
                    f"{type(self).__name__} coefficient X^{r} has grades "
                    f"{list(c.grades)}, expected [{self.expected_grade(r)}]"
                )

    def _like(self, coeffs):
        return type(self)(self.weight, coeffs)

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if other.weight != self.weight or other.degree_bound != self.degree_bound:
            raise ValueError("polynomials differ in weight or degree bound")
        return self._like([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> _SeriesPolynomial:
        return self._like([s.scale(c) for s in self.coeffs])

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.weight == other.weight and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((type(self).__name__, self.weight, self.coeffs))

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(weight={self.weight}, "
            f"m={self.degree_bound}, h={self.width_h}, N={self.precision})"
        )


class ModularPolynomial(_SeriesPolynomial):
    """Element of MP^m_lambda: X^r coefficient of weight lambda + 2r, grade r."""

    def expected_grade(self, r: int) -> int:
        return r


class QuasimodularPolynomial(_SeriesPolynomial):
    """Element of QP^m_lambda: X^r coefficient of grade m - r."""

    def expected_grade(self, r: int) -> int:
        return self.degree_bound - r


def embed_modular(fd: FormDescriptor, m: int) -> ModularPolynomial:
    """The constant polynomial fd (degree bound m) as a modular polynomial."""
    if fd.depth != 0:
        raise ValueError(f"{fd.name} has depth {fd.depth}; only modular forms embed")
    if m < 0:
        raise ValueError(f"degree bound must be nonnegative, got {m}")
    z = zero(fd.width_h, fd.precision)
    return ModularPolynomial(fd.weight, [fd.series] + [z] * m)


# --------------------------------------------------------------------------
# Lambda / Xi


def _check_lambda(m: int, lam: int) -> None:
    # Xi needs (lam - 2m - 2)! to exist.
    if lam < 2 * m + 2:
        raise ValueError(f"weight lambda={lam} too small for degree {m}; need lambda >= {2 * m + 2}")


@lru_cache(maxsize=None)
def _lambda_terms(m: int, lam: int) -> tuple[tuple[tuple[int, int, Fraction], ...], ...]:
    # For each output index r: terms (source index, derivative order, coefficient).
    rows = []
    for r in range(m + 1):
        terms = []
        for ell in range(m - r + 1):
            c = reciprocal_factorial(r) * reciprocal_factorial(ell) * reciprocal_factorial(lam - 2 * r - ell - 1)
            if c:
                terms.append((m - r - ell, ell, c))
        rows.append(tuple(terms))
    return tuple(rows)


@lru_cache(maxsize=None)
def _xi_terms(m: int, lam: int) -> tuple[tuple[tuple[int, int, Fraction], ...], ...]:
    rows = []
    for r in range(m + 1):
        lead = lam + 2 * r - 2 * m - 1
        terms = []
        for ell in range(r + 1):
            c = Fraction(
                lead * (-1) ** ell * factorial(m - r + ell) * factorial(2 * r + lam - 2 * m - ell - 2),
                factorial(ell),
            )
            if c:
                terms.append((m - r + ell, ell, c))
        rows.append(tuple(terms))
    return tuple(rows)


def _apply_terms(rows, coeffs: Sequence[PiGradedSeries]) -> list[PiGradedSeries]:
    h = coeffs[0].width_h
    n = min(c.precision for c in coeffs)
    cache: dict[tuple[int, int], PiGradedSeries] = {}

    def deriv(i: int, ell: int) -> PiGradedSeries:
        key = (i, ell)
        if key not in cache:
            cache[key] = nth_z_derivative(coeffs[i], ell)
        return cache[key]

    return [
        sum_series((deriv(i, ell).scale(c) for i, ell, c in terms), h, n)
        for terms in rows
    ]


def lambda_map(F: ModularPolynomial, lam: int) -> QuasimodularPolynomial:
    """Lambda^m_lambda: MP^m_{lambda-2m} -> QP^m_lambda."""
    m = F.degree_bound
    _check_lambda(m, lam)
    if F.weight != lam - 2 * m:
        raise ValueError(
            f"weight mismatch: F has weight {F.weight}, Lambda^{m}_{lam} expects {lam - 2 * m}"
        )
    return QuasimodularPolynomial(lam, _apply_terms(_lambda_terms(m, lam), F.coeffs))


def xi_map(Phi: QuasimodularPolynomial) -> ModularPolynomial:
    """Xi^m_lambda: QP^m_lambda -> MP^m_{lambda-2m}, the inverse of lambda_map."""
    m, lam = Phi.degree_bound, Phi.weight
    _check_lambda(m, lam)
    return ModularPolynomial(lam - 2 * m, _apply_terms(_xi_terms(m, lam), Phi.coeffs))


def project(Phi: _SeriesPolynomial, ell: int) -> PiGradedSeries:
    """The X^ell coefficient."""
    if not 0 <= ell <= Phi.degree_bound:
        raise ValueError(f"index {ell} outside 0..{Phi.degree_bound}")
    return Phi.coeffs[ell]


def qp_mul(Phi: QuasimodularPolynomial, Psi: QuasimodularPolynomial) -> QuasimodularPolynomial:
    if Phi.width_h != Psi.width_h:
        raise ValueError(f"width mismatch: h={Phi.width_h} versus h={Psi.width_h}")
    m, n = Phi.degree_bound, Psi.degree_bound
    prec = min(Phi.precision, Psi.precision)
    h = Phi.width_h
    out = []
    for s in range(m + n + 1):
        pieces = (
            Phi.coeffs[i] * Psi.coeffs[s - i]
            for i in range(max(0, s - n), min(m, s) + 1)
            if not Phi.coeffs[i].is_zero() and not Psi.coeffs[s - i].is_zero()
        )
        out.append(sum_series(pieces, h, prec))
    return QuasimodularPolynomial(Phi.weight + Psi.weight, out)


def constant_polynomial(width_h=1, precision: int = 0) -> QuasimodularPolynomial:
    """The unit of qp_mul: the constant 1, weight 0, degree bound 0."""
    return QuasimodularPolynomial(0, [one(width_h, precision)])


# --------------------------------------------------------------------------
# Group elements


@dataclass(frozen=True)
class GroupElement:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        exact = all(isinstance(x, int) for x in (self.a, self.b, self.c, self.d))
        if (exact and det != 1) or (not exact and abs(det - 1) > 1e-14):
            raise ValueError(f"determinant {det} != 1")

    def __matmul__(self, other: GroupElement) -> GroupElement:
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def automorphy(self, z: complex) -> complex:
        """J(gamma, z) = cz + d."""
        j = self.c * z + self.d
        if j == 0:
            raise ZeroDivisionError("cz + d vanishes")
        return j

    def kappa(self, z: complex) -> complex:
        """K(gamma, z) = c / (cz + d)."""
        return self.c / self.automorphy(z)

    def act(self, z: complex) -> complex:
        return (self.a * z + self.b) / self.automorphy(z)


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)
TS = T @ S


# --------------------------------------------------------------------------
# Numeric evaluation and slash actions


def _point(p: EvalPoint | complex, f: PiGradedSeries | None = None) -> EvalPoint:
    if isinstance(p, EvalPoint):
        return p
    if f is None:
        raise TypeError("a bare complex point needs a series to size truncation")
    return EvalPoint(complex(p), f.precision + 1)


def _at(f: PiGradedSeries, w: complex, p: EvalPoint) -> complex:
    if w.imag <= 0:
        raise ValueError(f"image point {w} left the upper half-plane")
    return eval_at(f, EvalPoint(w, p.truncation_terms))


def evaluate_polynomial(F: _SeriesPolynomial, p: EvalPoint | complex) -> np.ndarray:
    """X-coefficients of F(z, X) at z."""
    p = _point(p, F.coeffs[0])
    return np.array([_at(c, complex(p.z), p) for c in F.coeffs], dtype=complex)


def slash_weight(f: PiGradedSeries, lam: int, gamma: GroupElement, p: EvalPoint | complex) -> complex:
    """(f |_lambda gamma)(z) = J(gamma, z)^(-lambda) f(gamma z)."""
    p = _point(p, f)
    z = complex(p.z)
    return gamma.automorphy(z) ** (-lam) * _at(f, gamma.act(z), p)


def slash_X(F: _SeriesPolynomial, lam: int, gamma: GroupElement, p: EvalPoint | complex) -> np.ndarray:
    """X-coefficients of (F |^X_lambda gamma)(z, X): coefficient r slashed in weight lambda + 2r."""
    p = _point(p, F.coeffs[0])
    return np.array(
        [slash_weight(c, lam + 2 * r, gamma, p) for r, c in enumerate(F.coeffs)],
        dtype=complex,
    )


def dslash(Phi: _SeriesPolynomial, lam: int, gamma: GroupElement, p: EvalPoint | complex) -> np.ndarray:
    """X-coefficients of J^(-lambda) Phi(gamma z, J^2 (X - K))."""
    p = _point(p, Phi.coeffs[0])
    z = complex(p.z)
    j, k = gamma.automorphy(z), gamma.kappa(z)
    w = gamma.act(z)
    vals = [_at(c, w, p) for c in Phi.coeffs]
    m = len(vals) - 1
    out = np.zeros(m + 1, dtype=complex)
    for r, v in enumerate(vals):
        if v == 0:
            continue
        base = v * j ** (2 * r - lam)
        for s in range(r + 1):
            out[s] += base * binomial(r, s) * (-k) ** (r - s)
    return out


def scaled_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """max |lhs - rhs| over X-coefficients, divided by max(1, max |lhs|, max |rhs|).

    Xi-images carry factorial-sized coefficients (|F(z)| ~ 1e12 at m + n = 5),
    so an absolute bound would only measure double-precision rounding.
    """
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def invariance_residual(P: _SeriesPolynomial, lam: int, gamma: GroupElement, p: EvalPoint | complex) -> float:
    """Scaled residual of P slash gamma = P at z (|^X for modular, || for quasimodular P)."""
    p = _point(p, P.coeffs[0])
    action = dslash if isinstance(P, QuasimodularPolynomial) else slash_X
    return scaled_residual(action(P, lam, gamma, p), evaluate_polynomial(P, p))


# Truncated Taylor expansions in t = z - z0; entry j is the t^j coefficient.


def _jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)[: len(a)]


def _jet_recip(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    out[0] = 1 / a[0]
    for k in range(1, len(a)):
        out[k] = -np.dot(a[1 : k + 1], out[k - 1 :: -1]) / a[0]
    return out


def _jet_pow(a: np.ndarray, e: int) -> np.ndarray:
    if e < 0:
        return _jet_pow(_jet_recip(a), -e)
    out = np.zeros_like(a)
    out[0] = 1
    for _ in range(e):
        out = _jet_mul(out, a)
    return out


def _series_jet(f: PiGradedSeries, w: complex, order: int, p: EvalPoint) -> np.ndarray:
    return np.array(
        [_at(nth_z_derivative(f, j), w, p) / math.factorial(j) for j in range(order + 1)],
        dtype=complex,
    )


def _compose(f: PiGradedSeries, inner: np.ndarray, p: EvalPoint) -> np.ndarray:
    # Jet of f(inner(t)); inner[0] is the base point.
    order = len(inner) - 1
    outer = _series_jet(f, complex(inner[0]), order, p)
    u = inner.copy()
    u[0] = 0
    out = np.zeros_like(inner)
    power = np.zeros_like(inner)
    power[0] = 1
    for i in range(order + 1):
        out += outer[i] * power
        power = _jet_mul(power, u)
    return out


def _group_jets(gamma: GroupElement, z: complex, order: int):
    j = np.zeros(order + 1, dtype=complex)
    j[0] = gamma.automorphy(z)
    if order >= 1:
        j[1] = gamma.c
    num = np.zeros(order + 1, dtype=complex)
    num[0] = gamma.a * z + gamma.b
    if order >= 1:
        num[1] = gamma.a
    jinv = _jet_recip(j)
    return j, _jet_mul(num, jinv), gamma.c * jinv


def _apply_terms_numeric(rows, jets: Sequence[np.ndarray]) -> np.ndarray:
    # Same term tables as the exact maps; derivative ell is ell! * jet[ell].
    out = np.zeros(len(rows), dtype=complex)
    for r, terms in enumerate(rows):
        acc = 0j
        for i, ell, c in terms:
            acc += float(c) * math.factorial(ell) * jets[i][ell]
        out[r] = acc
    return out


def check_equivariance(
    F: ModularPolynomial, lam: int, gamma: GroupElement, p: EvalPoint | complex
) -> float:
    """Largest scaled residual (see :func:`scaled_residual`) of the two relations

        (Lambda F) || gamma = Lambda(F |^X gamma),
        (Xi Phi) |^X gamma = Xi(Phi || gamma)   with Phi = Lambda F,

    evaluated at p.  The right-hand sides need derivatives of slashed
    functions; these come from Taylor jets of order m at z.
    """
    p = _point(p, F.coeffs[0])
    m = F.degree_bound
    Phi = lambda_map(F, lam)
    z = complex(p.z)
    if gamma == IDENTITY:
        return 0.0
    jz, gz, kz = _group_jets(gamma, z, m)

    # Lambda side
    lhs = dslash(Phi, lam, gamma, p)
    slashed = []
    for r, c in enumerate(F.coeffs):
        jet = _compose(c, gz, p) if not c.is_zero() else np.zeros(m + 1, dtype=complex)
        slashed.append(_jet_mul(_jet_pow(jz, -(lam - 2 * m + 2 * r)), jet))
    rhs = _apply_terms_numeric(_lambda_terms(m, lam), slashed)
    res_lambda = scaled_residual(lhs, rhs)

    # Xi side
    lhs = slash_X(F, lam - 2 * m, gamma, p)
    phi_at = [_compose(c, gz, p) if not c.is_zero() else None for c in Phi.coeffs]
    minus_k = -kz
    transformed = []
    for s in range(m + 1):
        acc = np.zeros(m + 1, dtype=complex)
        for r in range(s, m + 1):
            if phi_at[r] is None:
                continue
            term = _jet_mul(phi_at[r], _jet_pow(jz, 2 * r - lam))
            term = _jet_mul(term, _jet_pow(minus_k, r - s))
            acc += binomial(r, s) * term
        transformed.append(acc)
    rhs = _apply_terms_numeric(_xi_terms(m, lam), transformed)
    res_xi = scaled_residual(lhs, rhs)
    return max(res_lambda, res_xi)


def fit_quasimodular_coefficients(
    f: PiGradedSeries,
    lam: int,
    depth: int,
    p: EvalPoint | complex,
    gammas: Sequence[GroupElement],
) -> np.ndarray:
    """Least-squares values f_0(z), ..., f_depth(z) with

        (f |_lambda gamma)(z) = sum_r f_r(z) K(gamma, z)^r

    across the supplied group elements (which need distinct K(gamma, z)).
    """
    p = _point(p, f)
    z = complex(p.z)
    rows = np.array([[g.kappa(z) ** r for r in range(depth + 1)] for g in gammas], dtype=complex)
    rhs = np.array([slash_weight(f, lam, g, p) for g in gammas], dtype=complex)
    sol, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    return sol
