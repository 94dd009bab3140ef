"""Exact q-expansions of quasimodular forms, Rankin-Cohen brackets and the
expansion of L(phi^(m) psi^(n), s) over Dirichlet series of brackets."""

from .brackets import (
    BracketSpec,
    TheoremCoefficient,
    a_coefficient,
    b_constant,
    bracket_symmetry_residual,
    k_constant,
    rankin_cohen,
    xi_coefficient_direct,
)
from .dirichlet import (
    DirichletCoefficients,
    VerificationReport,
    shift,
    to_dirichlet,
    verify_prop31,
    verify_section5,
    verify_section6,
    verify_theorem,
)
from .forms import FormDescriptor, delta, divisor_sigma, eisenstein, load_form, save_form
from .jets import (
    GroupElement,
    ModularPolynomial,
    QuasimodularPolynomial,
    check_equivariance,
    dslash,
    embed_modular,
    lambda_map,
    project,
    qp_mul,
    slash_X,
    slash_weight,
    xi_map,
)
from .qseries import (
    EvalPoint,
    GradingError,
    PiGradedSeries,
    add,
    eval_at,
    homogeneous_grade,
    make_series,
    mul,
    nth_z_derivative,
    z_derivative,
)

__version__ = "0.1.0"
