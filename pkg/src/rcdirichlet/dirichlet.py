"""Formal Dirichlet coefficients and the identity-verification harnesses.

A Dirichlet series L(f, s) = sum_{n>=1} a_n n^-s is handled as its finite
coefficient vector.  Factors (2 pi i / h)^e are never evaluated: they ride
along as the series grade, and every harness asserts that both sides of an
identity have the same grade before comparing rationals.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ._rational import binomial, reciprocal_factorial
from .brackets import BracketSpec, a_coefficient, coefficient_table, rankin_cohen
from .forms import FormDescriptor
from .jets import (
    S,
    T,
    TS,
    GroupElement,
    ModularPolynomial,
    QuasimodularPolynomial,
    check_equivariance,
    embed_modular,
    invariance_residual,
    lambda_map,
    project,
    qp_mul,
    xi_map,
)
from .qseries import EvalPoint, GradingError, PiGradedSeries, homogeneous_grade, make_series, nth_z_derivative

__all__ = [
    "DEFAULT_GAMMAS",
    "DirichletCoefficients",
    "IndexResult",
    "VerificationReport",
    "pipeline_polynomial",
    "random_polynomial",
    "section5_closed_forms",
    "shift",
    "to_dirichlet",
    "verify_equivariance",
    "verify_prop31",
    "verify_roundtrip",
    "verify_section5",
    "verify_section5_grid",
    "verify_section6",
    "verify_theorem",
]


@dataclass(frozen=True)
class DirichletCoefficients:
    grade: int
    coeffs: tuple[Fraction, ...]
    width_h: Fraction = Fraction(1)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> Fraction:
        """a_n, 1-based."""
        if n < 1:
            raise IndexError("Dirichlet coefficients start at n = 1")
        return self.coeffs[n - 1]


def to_dirichlet(f: PiGradedSeries) -> DirichletCoefficients:
    """Drop the constant term; keep a_1..a_N and the (single) grade."""
    if f.is_zero():
        return DirichletCoefficients(0, (Fraction(0),) * f.precision, f.width_h)
    e = homogeneous_grade(f)
    return DirichletCoefficients(e, f.coefficients(e)[1:], f.width_h)


def shift(d: DirichletCoefficients, ell: int) -> DirichletCoefficients:
    """a_n -> n^ell a_n, i.e. L(f, s) -> L(f, s - ell)."""
    if ell < 0:
        raise ValueError(f"shift must be nonnegative, got {ell}")
    return DirichletCoefficients(
        d.grade, tuple(n**ell * a for n, a in enumerate(d.coeffs, start=1)), d.width_h
    )


# --------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class IndexResult:
    n: int
    lhs: Fraction | float
    rhs: Fraction | float
    passed: bool
    label: str = ""


@dataclass
class VerificationReport:
    description: str
    params: dict = field(default_factory=dict)
    per_index: list[IndexResult] = field(default_factory=list)
    coefficient_table: list[dict] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(r.passed for r in self.per_index)

    def failures(self) -> list[IndexResult]:
        return [r for r in self.per_index if not r.passed]

    def merge(self, other: VerificationReport) -> None:
        self.per_index.extend(other.per_index)
        self.coefficient_table.extend(other.coefficient_table)


def _exact_row(n: int, lhs: Fraction, rhs: Fraction, label: str = "") -> IndexResult:
    return IndexResult(n, lhs, rhs, lhs == rhs, label)


# --------------------------------------------------------------------------
# Polynomial builders shared by harnesses


def pipeline_polynomial(phi: FormDescriptor, psi: FormDescriptor, m: int, n: int) -> QuasimodularPolynomial:
    """Lambda(phi) * Lambda(psi) in QP^{m+n}_{mu+nu+2m+2n}."""
    left = lambda_map(embed_modular(phi, m), phi.weight + 2 * m)
    right = lambda_map(embed_modular(psi, n), psi.weight + 2 * n)
    return qp_mul(left, right)


def _random_coefficient(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-60, 60), rng.randint(1, 12))


def random_polynomial(rng: random.Random, kind: type, m: int, weight: int, N: int, density: float = 0.6):
    """Random polynomial with rational coefficients obeying the grading convention of ``kind``."""
    coeffs = []
    for r in range(m + 1):
        grade = r if kind is ModularPolynomial else m - r
        if rng.random() < 0.15:
            vec = [0] * (N + 1)
        else:
            vec = [_random_coefficient(rng) if rng.random() < density else 0 for _ in range(N + 1)]
        coeffs.append(make_series(1, N, {grade: vec}))
    return kind(weight, coeffs)


# --------------------------------------------------------------------------
# Dirichlet relation between a quasimodular form and its Xi-components


def verify_prop31(Phi: QuasimodularPolynomial, lam: int, N: int) -> VerificationReport:
    """Check a_n = sum_ell n^ell c_{m-ell,n} / (ell! (lam-ell-1)!) for 1 <= n <= N.

    a_n are the coefficients of the X^0 coefficient of Phi; c_{r,n} those of
    the X^r coefficient of Xi(Phi).  Both sides are compared after removing
    the common factor (2 pi i / h)^m.
    """
    m = Phi.degree_bound
    if lam != Phi.weight:
        raise ValueError(f"lambda={lam} differs from the polynomial weight {Phi.weight}")
    if lam < 2 * m + 2:
        raise ValueError(f"lambda={lam} too small for degree {m}; need >= {2 * m + 2}")
    if N > Phi.precision:
        raise ValueError(f"N={N} exceeds series precision {Phi.precision}")
    Phi.check_grading()
    report = VerificationReport(
        "Dirichlet series of a quasimodular form via its Xi-components",
        {"m": m, "lambda": lam, "N": N},
    )
    if Phi.is_zero():
        return report
    F = xi_map(Phi)
    F.check_grading()
    a = Phi.coeffs[0].coefficients(m)
    c = [project(F, r).coefficients(r) for r in range(m + 1)]
    weights = [reciprocal_factorial(ell) * reciprocal_factorial(lam - ell - 1) for ell in range(m + 1)]
    for k in range(1, N + 1):
        rhs = sum((k**ell * c[m - ell][k] * weights[ell] for ell in range(m + 1)), Fraction(0))
        report.per_index.append(_exact_row(k, a[k], rhs))
    return report


# --------------------------------------------------------------------------
# Main theorem


def verify_theorem(
    phi: FormDescriptor,
    psi: FormDescriptor,
    m: int,
    n: int,
    N: int,
    route: str = "derived",
) -> VerificationReport:
    """L(phi^(m) psi^(n), s) = sum_ell a(ell) L([phi, psi]_{m+n-ell}, s - ell), first N coefficients."""
    if m < 0 or n < 0:
        raise ValueError("derivative orders must be nonnegative")
    if route not in ("derived", "printed"):
        raise ValueError(f"unknown route {route!r}")
    for fd in (phi, psi):
        if fd.depth != 0:
            raise ValueError(f"{fd.name} has depth {fd.depth}; need modular forms")
        if fd.precision < N:
            raise ValueError(f"{fd.name} known through q^{fd.precision}, need N={N}")
    if phi.width_h != psi.width_h:
        raise ValueError("forms have different widths h")
    mu, nu, total = phi.weight, psi.weight, m + n
    f = phi.series.truncate(N)
    g = psi.series.truncate(N)
    lhs = to_dirichlet(nth_z_derivative(f, m) * nth_z_derivative(g, n))
    if any(lhs.coeffs) and lhs.grade != total:
        raise GradingError(f"product of derivatives has grade {lhs.grade}, expected {total}")

    phi_n = FormDescriptor(phi.name, mu, 0, f)
    psi_n = FormDescriptor(psi.name, nu, 0, g)
    brackets = {}
    for w in range(total + 1):
        d = to_dirichlet(rankin_cohen(phi_n, psi_n, BracketSpec(mu, nu, w)))
        if any(d.coeffs) and d.grade != w:
            raise GradingError(f"bracket of index {w} has grade {d.grade}")
        brackets[w] = d
    coeff = {ell: a_coefficient(m, n, mu, nu, ell, route).value_normalized for ell in range(total + 1)}

    report = VerificationReport(
        f"L({phi.name}^({m}) {psi.name}^({n}), s) as a combination of bracket L-series",
        {"f": phi.name, "g": psi.name, "m": m, "n": n, "mu": mu, "nu": nu, "N": N, "route": route},
        coefficient_table=coefficient_table(m, n, mu, nu),
    )
    for k in range(1, N + 1):
        rhs = Fraction(0)
        for ell in range(total + 1):
            # grade: ell from the coefficient, m + n - ell from the bracket
            rhs += coeff[ell] * k**ell * brackets[total - ell][k]
        report.per_index.append(_exact_row(k, lhs[k], rhs))
    return report


# --------------------------------------------------------------------------
# Closed forms for (m, n) in {(1,1), (2,0), (0,2)}


def section5_closed_forms(case: tuple[int, int], mu: int, nu: int) -> list[Fraction]:
    s = mu + nu
    if case == (1, 1):
        return [Fraction(-2, (s + 2) * (s + 1)), Fraction(mu - nu, (s + 2) * s), Fraction(mu * nu, (s + 1) * s)]
    if case == (2, 0):
        return [Fraction(2, (s + 2) * (s + 1)), Fraction(-2 * (mu + 1), (s + 2) * s), Fraction(mu * (mu + 1), (s + 1) * s)]
    if case == (0, 2):
        return [Fraction(2, (s + 2) * (s + 1)), Fraction(2 * (nu + 1), (s + 2) * s), Fraction(nu * (nu + 1), (s + 1) * s)]
    raise ValueError(f"no closed form for case {case}")


def verify_section5(mu: int, nu: int) -> VerificationReport:
    if mu < 1 or nu < 1:
        raise ValueError("weights must be positive")
    report = VerificationReport("closed-form coefficients for (m,n) in {(1,1),(2,0),(0,2)}", {"mu": mu, "nu": nu})
    idx = len(report.per_index)
    for case in ((1, 1), (2, 0), (0, 2)):
        expected = section5_closed_forms(case, mu, nu)
        for ell in range(3):
            got = a_coefficient(*case, mu, nu, ell).value_normalized
            idx += 1
            report.per_index.append(_exact_row(idx, got, expected[ell], f"mu={mu} nu={nu} case={case} l={ell}"))
    # (0,2) from (2,0) with roles of phi, psi swapped: [psi, phi]_w = (-1)^w [phi, psi]_w
    swapped = section5_closed_forms((2, 0), nu, mu)
    for ell in range(3):
        got = a_coefficient(0, 2, mu, nu, ell).value_normalized
        idx += 1
        report.per_index.append(
            _exact_row(idx, got, (-1) ** (2 - ell) * swapped[ell], f"mu={mu} nu={nu} symmetry l={ell}")
        )
    return report


def verify_section5_grid(mu_max: int = 20, nu_max: int = 20) -> VerificationReport:
    report = VerificationReport(
        "closed-form coefficients for (m,n) in {(1,1),(2,0),(0,2)}", {"mu_max": mu_max, "nu_max": nu_max}
    )
    for mu in range(1, mu_max + 1):
        for nu in range(1, nu_max + 1):
            report.merge(verify_section5(mu, nu))
    report.per_index = [
        IndexResult(i, r.lhs, r.rhs, r.passed, r.label) for i, r in enumerate(report.per_index, start=1)
    ]
    return report


# --------------------------------------------------------------------------
# Binomial-sum identities


def verify_section6(w_max: int, mu_max: int, nu_max: int) -> VerificationReport:
    """sum_r (-1)^r C(mu+w-1, w-r) C(nu+w-1, r) a^{r,w-r}(ell) equals 1 for ell = 0, else 0."""
    if min(w_max, mu_max, nu_max) < 0 or min(mu_max, nu_max) < 1:
        raise ValueError("bounds must be >= 1 (w_max >= 0)")
    report = VerificationReport(
        "bracket expansion of bracket L-series is the identity",
        {"w_max": w_max, "mu_max": mu_max, "nu_max": nu_max},
    )
    idx = 0
    for w in range(w_max + 1):
        for mu in range(1, mu_max + 1):
            for nu in range(1, nu_max + 1):
                weights = [(-1) ** r * binomial(mu + w - 1, w - r) * binomial(nu + w - 1, r) for r in range(w + 1)]
                for ell in range(w + 1):
                    total = sum(
                        (weights[r] * a_coefficient(r, w - r, mu, nu, ell).value_normalized for r in range(w + 1)),
                        Fraction(0),
                    )
                    idx += 1
                    report.per_index.append(
                        _exact_row(idx, total, Fraction(int(ell == 0)), f"w={w} mu={mu} nu={nu} l={ell}")
                    )
    return report


# --------------------------------------------------------------------------
# Lambda/Xi round trip and numeric equivariance


def verify_roundtrip(
    trials: int = 200, seed: int = 0, m_max: int = 6, lam_max: int = 30, N_max: int = 12
) -> VerificationReport:
    """Xi(Lambda F) = F and Lambda(Xi Phi) = Phi on seeded random polynomials."""
    rng = random.Random(seed)
    report = VerificationReport(
        "Lambda and Xi are mutually inverse",
        {"trials": trials, "seed": seed, "m_max": m_max, "lambda_max": lam_max, "N_max": N_max},
    )
    for t in range(1, trials + 1):
        m = rng.randint(0, m_max)
        lam = rng.randint(2 * m + 2, max(lam_max, 2 * m + 2))
        N = rng.randint(0, N_max)
        F = random_polynomial(rng, ModularPolynomial, m, lam - 2 * m, N)
        Phi = random_polynomial(rng, QuasimodularPolynomial, m, lam, N)
        ok_f = xi_map(lambda_map(F, lam)) == F
        ok_phi = lambda_map(xi_map(Phi), lam) == Phi
        report.per_index.append(
            IndexResult(t, Fraction(int(ok_f and ok_phi)), Fraction(1), ok_f and ok_phi, f"m={m} lambda={lam} N={N}")
        )
    return report


DEFAULT_GAMMAS: dict[str, GroupElement] = {"S": S, "T": T, "TS": TS}


def verify_equivariance(
    phi: FormDescriptor,
    psi: FormDescriptor,
    cases: Iterable[tuple[int, int]] = ((1, 1), (2, 0), (0, 2), (2, 1)),
    points: Sequence[complex] = (1j, 2j),
    gammas: dict[str, GroupElement] | None = None,
    terms: int = 41,
    tol: float = 1e-8,
) -> VerificationReport:
    """Numeric invariance of pipeline polynomials and the Lambda/Xi intertwining relations.

    Per (m, n, gamma, z): invariance of Phi = Lambda(phi) Lambda(psi) under
    ||, invariance of Xi(Phi) under |^X, and the intertwining residual of
    Xi(Phi).  Residuals are relative to max(1, |values|).
    """
    gammas = DEFAULT_GAMMAS if gammas is None else gammas
    report = VerificationReport(
        "numeric slash invariance and Lambda/Xi equivariance",
        {"f": phi.name, "g": psi.name, "terms": terms, "tol": tol},
    )
    idx = 0
    for m, n in cases:
        Phi = pipeline_polynomial(phi, psi, m, n)
        lam = Phi.weight
        F = xi_map(Phi)
        for gname, gamma in gammas.items():
            for z in points:
                p = EvalPoint(z, terms)
                checks = {
                    "quasimodular": invariance_residual(Phi, lam, gamma, p),
                    "modular": invariance_residual(F, lam - 2 * (m + n), gamma, p),
                    "equivariance": check_equivariance(F, lam, gamma, p),
                }
                for what, res in checks.items():
                    idx += 1
                    label = f"m={m} n={n} gamma={gname} z={z} {what}"
                    report.per_index.append(IndexResult(idx, res, tol, bool(res < tol) and math.isfinite(res), label))
    return report

