"""Rankin-Cohen brackets and the scalar constants of the bracket expansion.

Bilinear differential operators in two forms f, g are represented here as
``{(a, b): c}`` meaning sum c * f^(a) g^(b); this lets the constants be
checked symbolically as well as on q-expansions.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Literal

from ._rational import binomial, factorial, reciprocal_factorial
from .forms import FormDescriptor
from .qseries import PiGradedSeries, nth_z_derivative, sum_series

__all__ = [
    "BracketSpec",
    "TheoremCoefficient",
    "a_coefficient",
    "b_constant",
    "bracket_operator",
    "bracket_series",
    "bracket_symmetry_residual",
    "coefficient_table",
    "k_constant",
    "rankin_cohen",
    "xi_coefficient_direct",
    "xi_operator",
]

Route = Literal["printed", "derived"]
Operator = dict[tuple[int, int], Fraction]


@dataclass(frozen=True)
class BracketSpec:
    mu: int
    nu: int
    w: int

    def __post_init__(self):
        if self.mu < 1 or self.nu < 1:
            raise ValueError(f"weights must be positive, got ({self.mu}, {self.nu})")
        if self.w < 0:
            raise ValueError(f"bracket index must be nonnegative, got {self.w}")


@dataclass(frozen=True)
class TheoremCoefficient:
    """a^{m,n}_{mu,nu}(ell) with the factor (2 pi i / h)^ell removed."""

    m: int
    n: int
    mu: int
    nu: int
    ell: int
    value_normalized: Fraction
    route: Route


def _check_pair(phi: FormDescriptor, psi: FormDescriptor) -> None:
    for fd in (phi, psi):
        if fd.depth != 0:
            raise ValueError(f"{fd.name} has depth {fd.depth}; brackets need modular forms")
    if phi.width_h != psi.width_h:
        raise ValueError(f"width mismatch: h={phi.width_h} versus h={psi.width_h}")


def bracket_operator(mu: int, nu: int, w: int) -> Operator:
    return {
        (r, w - r): Fraction((-1) ** r * binomial(mu + w - 1, w - r) * binomial(nu + w - 1, r))
        for r in range(w + 1)
    }


def apply_operator(op: Operator, f: PiGradedSeries, g: PiGradedSeries) -> PiGradedSeries:
    """Evaluate sum c f^(a) g^(b) on q-expansions."""
    n = min(f.precision, g.precision)
    fd: dict[int, PiGradedSeries] = {}
    gd: dict[int, PiGradedSeries] = {}
    pieces = []
    for (a, b), c in sorted(op.items()):
        if not c:
            continue
        if a not in fd:
            fd[a] = nth_z_derivative(f, a)
        if b not in gd:
            gd[b] = nth_z_derivative(g, b)
        pieces.append((fd[a] * gd[b]).scale(c))
    return sum_series(pieces, f.width_h, n)


def bracket_series(f: PiGradedSeries, g: PiGradedSeries, mu: int, nu: int, w: int) -> PiGradedSeries:
    return apply_operator(bracket_operator(mu, nu, w), f, g)


def rankin_cohen(phi: FormDescriptor, psi: FormDescriptor, spec: BracketSpec) -> PiGradedSeries:
    """[phi, psi]^{(mu, nu)}_w on q-expansions; homogeneous of grade w."""
    _check_pair(phi, psi)
    if (phi.weight, psi.weight) != (spec.mu, spec.nu):
        raise ValueError(
            f"weights ({phi.weight}, {psi.weight}) do not match bracket "
            f"({spec.mu}, {spec.nu})"
        )
    return bracket_series(phi.series, psi.series, spec.mu, spec.nu, spec.w)


def bracket_symmetry_residual(phi: FormDescriptor, psi: FormDescriptor, spec: BracketSpec) -> PiGradedSeries:
    """[phi, psi]_w - (-1)^w [psi, phi]_w (weights swapped accordingly)."""
    forward = rankin_cohen(phi, psi, spec)
    backward = rankin_cohen(psi, phi, BracketSpec(spec.nu, spec.mu, spec.w))
    return forward - backward.scale((-1) ** spec.w)


def k_constant(m: int, n: int, mu: int, nu: int, k: int, r: int) -> Fraction:
    """Coefficient of phi^(m-k) psi^(n-r+k) X^r in the product of the two Lambda-images."""
    if not 0 <= k <= r <= m + n:
        raise ValueError(f"need 0 <= k <= r <= m + n, got k={k}, r={r}, m+n={m + n}")
    return (
        reciprocal_factorial(k)
        * reciprocal_factorial(r - k)
        * reciprocal_factorial(m - k)
        * reciprocal_factorial(n - r + k)
        * reciprocal_factorial(mu + m - k - 1)
        * reciprocal_factorial(nu + n - r + k - 1)
    )


def xi_operator(m: int, n: int, mu: int, nu: int, ell: int) -> Operator:
    """X^ell coefficient of Xi applied to Lambda(phi) * Lambda(psi), as an operator.

    Triple sum over (j, k, p): j indexes the Xi formula, k the product
    coefficient, p the Leibniz expansion of the j-th derivative.
    """
    if not 0 <= ell <= m + n:
        raise ValueError(f"need 0 <= ell <= m + n, got ell={ell}, m+n={m + n}")
    op: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    lead = mu + nu + 2 * ell - 1
    for j in range(ell + 1):
        r = m + n - ell + j
        outer = Fraction((-1) ** j * factorial(r) * factorial(2 * ell + mu + nu - j - 2), factorial(j))
        for k in range(r + 1):
            kc = k_constant(m, n, mu, nu, k, r)
            if not kc:
                continue
            for p in range(j + 1):
                a = m - k + j - p
                b = ell + k + p - m - j
                if a < 0 or b < 0:
                    continue
                op[(a, b)] += lead * outer * binomial(j, p) * kc
    return {key: c for key, c in sorted(op.items()) if c}


def xi_coefficient_direct(phi: FormDescriptor, psi: FormDescriptor, m: int, n: int, ell: int) -> PiGradedSeries:
    _check_pair(phi, psi)
    op = xi_operator(m, n, phi.weight, psi.weight, ell)
    return apply_operator(op, phi.series, psi.series)


@lru_cache(maxsize=None)
def b_constant(m: int, n: int, mu: int, nu: int, w: int) -> Fraction:
    """Scalar with (X^w coefficient of Xi(Lambda phi * Lambda psi)) = b_w [phi, psi]_w."""
    if not 0 <= w <= m + n:
        raise ValueError(f"need 0 <= w <= m + n, got w={w}, m+n={m + n}")
    if mu < 1 or nu < 1:
        raise ValueError("weights must be positive")
    total = Fraction(0)
    for j in range(max(0, w - n), w + 1):
        num = factorial(m + n - w + j) * factorial(2 * w + mu + nu - j - 2)
        den = factorial(j) * factorial(n - w + j) * factorial(w - j) * factorial(nu + w - j - 1)
        total += Fraction(num if j % 2 == 0 else -num, den)
    return Fraction((mu + nu + 2 * w - 1) * factorial(w), factorial(mu + w - 1) * factorial(m)) * total


@lru_cache(maxsize=None)
def _printed(m: int, n: int, mu: int, nu: int, ell: int) -> Fraction:
    # Closed form exactly as stated for the theorem, (2 pi i / h)^ell removed.
    prefactor = Fraction(
        factorial(n) * factorial(mu + m - 1) * factorial(nu + n - 1) * factorial(mu + nu + 2 * ell - 1),
        factorial(mu + ell - 1) * factorial(mu + nu + 2 * m + 2 * n - ell - 1),
    )
    total = Fraction(0)
    for j in range(max(0, ell - n), ell + 1):
        num = factorial(m + n - ell + j) * factorial(2 * ell + mu + nu - j - 2)
        den = factorial(j) * factorial(ell - j) * factorial(n - ell + j) * factorial(nu + ell - j - 1)
        total += Fraction(num if j % 2 == 0 else -num, den)
    return prefactor * total


@lru_cache(maxsize=None)
def _derived(m: int, n: int, mu: int, nu: int, ell: int) -> Fraction:
    # X^0 coefficient of the product polynomial is phi^(m) psi^(n) / norm; its
    # Dirichlet series expands over the Xi-components, and the X^{m+n-ell}
    # component is b_{m+n-ell} times the bracket of that index.
    lam = mu + nu + 2 * m + 2 * n
    norm = factorial(m) * factorial(n) * factorial(mu + m - 1) * factorial(nu + n - 1)
    return Fraction(norm, factorial(ell) * factorial(lam - ell - 1)) * b_constant(m, n, mu, nu, m + n - ell)


def a_coefficient(m: int, n: int, mu: int, nu: int, ell: int, route: Route = "derived") -> TheoremCoefficient:
    """Coefficient of L([phi, psi]_{m+n-ell}, s - ell) in L(phi^(m) psi^(n), s)."""
    if m < 0 or n < 0:
        raise ValueError("derivative orders must be nonnegative")
    if mu < 1 or nu < 1:
        raise ValueError("weights must be positive")
    if not 0 <= ell <= m + n:
        raise ValueError(f"need 0 <= ell <= m + n, got ell={ell}, m+n={m + n}")
    if route == "derived":
        value = _derived(m, n, mu, nu, ell)
    elif route == "printed":
        value = _printed(m, n, mu, nu, ell)
    else:
        raise ValueError(f"unknown route {route!r}")
    return TheoremCoefficient(m, n, mu, nu, ell, value, route)


def coefficient_table(m: int, n: int, mu: int, nu: int) -> list[dict]:
    """Rows {l, printed, derived, agree} for 0 <= l <= m + n."""
    rows = []
    for ell in range(m + n + 1):
        printed = a_coefficient(m, n, mu, nu, ell, "printed").value_normalized
        derived = a_coefficient(m, n, mu, nu, ell, "derived").value_normalized
        rows.append({"l": ell, "printed": printed, "derived": derived, "agree": printed == derived})
    return rows
