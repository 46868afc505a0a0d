"""Generalised Cesaro summation machinery.

Cesaro-adapted polynomial scales (rescaled periodised Bernoulli
polynomials), the averaging operator P in exact-symbolic and numeric form,
a formal tau-series engine with deferred limit-based evaluation, Riemann
and Hurwitz zeta by independent routes, Fourier identities of the
generalised scale members, and the associated combinatorial results --
every checkable identity ships as an executable test.
"""

from . import cesaro, combinat, errors, formal, fourier, scale, special, zetafns
from .cesaro import (
    GridFunction,
    OperatorPolynomial,
    Term,
    TermSum,
    apply_P_numeric,
    apply_P_symbolic,
    cesaro_limit,
    operator_identity_check,
    regular_poly,
)
from .formal import (
    EpsLaurent,
    TauMonomial,
    TauSeries,
    drho_qcheck,
    evaluate_with_limits,
    expand_binomial,
    multiply,
    qcheck_rho,
)
from .scale import (
    RationalPolynomial,
    ScaleFamily,
    bernoulli_numbers,
    bernoulli_poly,
    build_scale,
    qcheck_at_half,
    qcheck_poly,
    sum_powers_poly,
)
from .special import binom, cpow, gamma, polylog, zeta, zeta_deriv
from .zetafns import (
    EMApproximation,
    PSum,
    euler_maclaurin,
    hurwitz_cesaro,
    hurwitz_taylor,
    psum_eval,
    psum_term_expansion,
)

__version__ = "0.1.0"

__all__ = [
    "GridFunction", "OperatorPolynomial", "Term", "TermSum",
    "apply_P_numeric", "apply_P_symbolic", "cesaro_limit",
    "operator_identity_check", "regular_poly",
    "EpsLaurent", "TauMonomial", "TauSeries", "drho_qcheck",
    "evaluate_with_limits", "expand_binomial", "multiply", "qcheck_rho",
    "RationalPolynomial", "ScaleFamily", "bernoulli_numbers",
    "bernoulli_poly", "build_scale", "qcheck_at_half", "qcheck_poly",
    "sum_powers_poly",
    "binom", "cpow", "gamma", "polylog", "zeta", "zeta_deriv",
    "EMApproximation", "PSum", "euler_maclaurin", "hurwitz_cesaro",
    "hurwitz_taylor", "psum_eval", "psum_term_expansion",
    "cesaro", "combinat", "errors", "formal", "fourier", "scale",
    "special", "zetafns",
]
