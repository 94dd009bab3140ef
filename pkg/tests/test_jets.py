import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import convolve, derivative, rc_bracket
from rcdirichlet._rational import factorial
from rcdirichlet.dirichlet import pipeline_polynomial, random_polynomial
from rcdirichlet.forms import eisenstein
from rcdirichlet.jets import (
    IDENTITY,
    S,
    T,
    TS,
    GroupElement,
    ModularPolynomial,
    QuasimodularPolynomial,
    check_equivariance,
    constant_polynomial,
    dslash,
    embed_modular,
    evaluate_polynomial,
    fit_quasimodular_coefficients,
    invariance_residual,
    lambda_map,
    project,
    qp_mul,
    slash_weight,
    slash_X,
    xi_map,
)
from rcdirichlet.qseries import EvalPoint, GradingError, eval_at, make_series, nth_z_derivative, zero

P_I = EvalPoint(1j, 41)
P_2I = EvalPoint(2j, 41)


def series0(coeffs, grade=0):
    return make_series(1, len(coeffs) - 1, {grade: coeffs})


# -- embedding --------------------------------------------------------------


def test_embed_modular(E4, E6, E2):
    F = embed_modular(E4, 2)
    assert F.coeffs[0] == E4.series and F.coeffs[1].is_zero() and F.coeffs[2].is_zero()
    assert F.weight == 4 and F.degree_bound == 2
    assert embed_modular(E6, 0).degree_bound == 0
    with pytest.raises(ValueError, match="depth"):
        embed_modular(E2, 1)


# -- Lambda -----------------------------------------------------------------


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_lambda_of_single_form(E6, m):
    mu = E6.weight
    Phi = lambda_map(embed_modular(E6, m), mu + 2 * m)
    for k in range(m + 1):
        expected = nth_z_derivative(E6.series, m - k).scale(
            Fraction(1, factorial(k) * factorial(m - k) * factorial(mu + m - k - 1))
        )
        assert Phi.coeffs[k] == expected
    assert Phi.weight == mu + 2 * m
    Phi.check_grading()


def test_lambda_degree_zero(E4):
    F = embed_modular(E4, 0)
    assert lambda_map(F, 4).coeffs[0] == E4.series.scale(Fraction(1, factorial(3)))


def test_lambda_two_form_example(E4, E6):
    # xi at X^0 (weight lam - 2m), eta at X^1 (weight lam - 2m + 2)
    m, lam = 2, 8
    xi, eta = E4.series, E6.series
    F = ModularPolynomial(lam - 2 * m, [xi, eta, zero(1, xi.precision)])
    Phi = lambda_map(F, lam)
    for k in range(m + 1):
        expected = nth_z_derivative(xi, m - k).scale(lam - k - m)
        if m - k - 1 >= 0:
            expected = expected + nth_z_derivative(eta, m - k - 1).scale(m - k)
        expected = expected.scale(Fraction(1, factorial(k) * factorial(m - k) * factorial(lam - k - m)))
        assert Phi.coeffs[k] == expected


def test_lambda_rejects_bad_weight(E4):
    with pytest.raises(ValueError, match="weight"):
        lambda_map(embed_modular(E4, 1), 8)
    with pytest.raises(ValueError, match="too small"):
        lambda_map(ModularPolynomial(0, [E4.series, E4.series]), 2)


# -- Xi ---------------------------------------------------------------------


def test_xi_degree_zero(E4):
    Phi = QuasimodularPolynomial(4, [E4.series])
    assert xi_map(Phi).coeffs[0] == E4.series.scale(factorial(3))


def test_xi_inverts_lambda_on_forms(E4, E6):
    for fd in (E4, E6):
        for m in range(4):
            F = embed_modular(fd, m)
            assert xi_map(lambda_map(F, fd.weight + 2 * m)) == F


def test_xi_rejects_small_weight(E4):
    with pytest.raises(ValueError):
        xi_map(QuasimodularPolynomial(3, [E4.series, E4.series]))


def test_xi_top_coefficient_is_bracket_two():
    N = 20
    mu, nu = 4, 6
    e4 = eisenstein(4, N)
    e6 = eisenstein(6, N)
    F = xi_map(pipeline_polynomial(e4, e6, 1, 1))
    factor = Fraction(-2 * (mu + nu + 3) * factorial(mu + nu), factorial(mu) * factorial(nu))
    bracket = rc_bracket(e4.series.coefficients(0), e6.series.coefficients(0), mu, nu, 2)
    assert list(F.coeffs[2].coefficients(2)) == [factor * c for c in bracket]


# -- projection and products -------------------------------------------------


def test_project(E4):
    m, mu = 3, E4.weight
    Phi = lambda_map(embed_modular(E4, m), mu + 2 * m)
    assert project(Phi, 0) == nth_z_derivative(E4.series, m).scale(Fraction(1, factorial(m) * factorial(mu + m - 1)))
    assert project(Phi, m) == E4.series.scale(Fraction(1, factorial(m) * factorial(mu - 1)))
    assert project(QuasimodularPolynomial(8, [zero(1, 5)] * 3), 1).is_zero()
    with pytest.raises(ValueError):
        project(Phi, m + 1)


def test_qp_mul_unit(E4):
    Phi = lambda_map(embed_modular(E4, 2), 8)
    assert qp_mul(Phi, constant_polynomial(1, Phi.precision)) == Phi


def test_qp_mul_top_coefficient():
    N = 15
    e4, e6 = eisenstein(4, N), eisenstein(6, N)
    Phi = pipeline_polynomial(e4, e6, 1, 1)
    assert Phi.degree_bound == 2 and Phi.weight == 14
    expected = convolve(e4.series.coefficients(0), e6.series.coefficients(0))
    c = Fraction(4 * 6, factorial(4) * factorial(6))
    assert list(Phi.coeffs[2].coefficients(0)) == [c * x for x in expected]
    Phi.check_grading()


def test_qp_mul_width_mismatch():
    a = QuasimodularPolynomial(4, [make_series(1, 2, {0: [1, 0, 0]})])
    b = QuasimodularPolynomial(4, [make_series(2, 2, {0: [1, 0, 0]})])
    with pytest.raises(ValueError):
        qp_mul(a, b)


def test_grading_check_detects_violation(E4):
    bad = QuasimodularPolynomial(8, [E4.series, E4.series])
    assert not bad.grading_ok()
    with pytest.raises(GradingError):
        bad.check_grading()


# -- group elements and slash actions -----------------------------------------


def test_group_element():
    assert S @ S == GroupElement(-1, 0, 0, -1)
    assert TS == GroupElement(1, -1, 1, 0)
    with pytest.raises(ValueError):
        GroupElement(1, 1, 1, 1)
    with pytest.raises(ZeroDivisionError):
        GroupElement(0, -1, 1, 0).automorphy(0)
    assert S.act(1j) == 1j and S.kappa(2j) == 1 / 2j


def test_slash_identity(E4):
    assert slash_weight(E4.series, 4, IDENTITY, P_I) == eval_at(E4.series, P_I)


@pytest.mark.parametrize("name, k", [("E4", 4), ("E6", 6), ("Delta", 12)])
def test_slash_modular_forms(request, name, k):
    f = request.getfixturevalue(name).series
    for p in (P_I, P_2I, EvalPoint(0.2 + 0.9j, 41)):
        for g in (S, T, TS):
            v = eval_at(f, p)
            assert abs(slash_weight(f, k, g, p) - v) < 1e-8 * max(1.0, abs(v))


def test_e2_slash_residual(E2):
    # E2 |_2 S = E2 + f1 K with f1 = 6/(pi i); K(S, i) = -i gives -6/pi
    res = slash_weight(E2.series, 2, S, P_I) - eval_at(E2.series, P_I)
    assert abs(res - (-6 / math.pi)) < 1e-8


def test_e2_fit_depth_one(E2):
    ST = S @ T
    f0, f1 = fit_quasimodular_coefficients(E2.series, 2, 1, P_I, [IDENTITY, S, ST])
    assert abs(f0 - eval_at(E2.series, P_I)) < 1e-8
    assert abs(f1 - 6 / (math.pi * 1j)) < 1e-8


def test_slash_X(E4, E6):
    F = embed_modular(E4, 2)
    assert np.allclose(slash_X(F, 4, IDENTITY, P_I), evaluate_polynomial(F, P_I), rtol=0, atol=0)
    assert invariance_residual(F, 4, T, P_I) < 1e-12
    N = 40
    F = xi_map(pipeline_polynomial(eisenstein(4, N), eisenstein(6, N), 1, 1))
    assert invariance_residual(F, F.weight, S, P_I) < 1e-8


def test_dslash(E4):
    Phi = lambda_map(embed_modular(E4, 1), 6)
    assert np.array_equal(dslash(Phi, 6, IDENTITY, P_I), evaluate_polynomial(Phi, P_I))
    assert invariance_residual(Phi, 6, S, P_I) < 1e-8
    assert len(dslash(Phi, 6, S, P_I)) == Phi.degree_bound + 1


def test_check_equivariance(E4, E6):
    assert check_equivariance(embed_modular(E4, 2), 8, IDENTITY, P_I) == 0.0
    assert check_equivariance(embed_modular(E4, 2), 8, S, P_I) < 1e-8
    assert check_equivariance(embed_modular(E6, 1), 8, T, P_I) < 1e-12


def test_equivariance_without_modularity(E4):
    # E4 in the X^1 slot has the wrong weight, so F is not invariant;
    # the intertwining relation still holds since it is formal in F
    F = ModularPolynomial(4, [E4.series, E4.series])
    assert invariance_residual(F, 4, S, P_I) > 1e-3
    assert check_equivariance(F, 6, S, P_I) < 1e-8
    assert check_equivariance(F, 6, GroupElement(2, 1, 1, 1), EvalPoint(0.1 + 1.1j, 41)) < 1e-8


# -- properties -----------------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)
small = st.fractions(-9, 9, max_denominator=7)


def _draw(seed, kind, m=None, lam=None):
    rng = random.Random(seed)
    m = rng.randint(0, 6) if m is None else m
    lam = rng.randint(2 * m + 2, 30) if lam is None else lam
    N = rng.randint(0, 12)
    weight = lam - 2 * m if kind is ModularPolynomial else lam
    return random_polynomial(rng, kind, m, weight, N), m, lam


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_round_trip(seed):
    F, m, lam = _draw(seed, ModularPolynomial)
    assert xi_map(lambda_map(F, lam)) == F
    Phi, _, _ = _draw(seed + 1, QuasimodularPolynomial, m, lam)
    assert lambda_map(xi_map(Phi), lam) == Phi


@settings(max_examples=40, deadline=None)
@given(seeds, small, small)
def test_linearity(seed, a, b):
    rng = random.Random(seed)
    m = rng.randint(0, 4)
    lam = rng.randint(2 * m + 2, 24)
    N = rng.randint(0, 8)
    F = random_polynomial(rng, ModularPolynomial, m, lam - 2 * m, N)
    G = random_polynomial(rng, ModularPolynomial, m, lam - 2 * m, N)
    assert lambda_map(a * F + b * G, lam) == a * lambda_map(F, lam) + b * lambda_map(G, lam)
    P = random_polynomial(rng, QuasimodularPolynomial, m, lam, N)
    Q = random_polynomial(rng, QuasimodularPolynomial, m, lam, N)
    assert xi_map(a * P + b * Q) == a * xi_map(P) + b * xi_map(Q)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_qp_mul_associative_commutative(seed):
    rng = random.Random(seed)
    N = rng.randint(0, 8)
    A, B, C = (random_polynomial(rng, QuasimodularPolynomial, rng.randint(0, 3), rng.randint(2, 12), N) for _ in range(3))
    assert qp_mul(qp_mul(A, B), C) == qp_mul(A, qp_mul(B, C))
    assert qp_mul(A, B) == qp_mul(B, A)
    assert qp_mul(A, B).degree_bound == A.degree_bound + B.degree_bound
    assert qp_mul(A, B).grading_ok()


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_maps_preserve_grading(seed):
    F, m, lam = _draw(seed, ModularPolynomial)
    Phi = lambda_map(F, lam)
    assert Phi.grading_ok()
    P, _, _ = _draw(seed + 7, QuasimodularPolynomial, m, lam)
    assert xi_map(P).grading_ok()


def test_derivative_oracle_agrees():
    # coefficient lists from the oracle and the library describe the same series
    e4 = eisenstein(4, 10)
    assert list(nth_z_derivative(e4.series, 3).coefficients(3)) == derivative(e4.series.coefficients(0), 3)
