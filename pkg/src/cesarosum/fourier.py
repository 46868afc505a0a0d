"""Fourier side of the generalised scale members.

qcheck_rho is a period-1 function, so it has Fourier coefficients

    a_n(rho) = e^{i pi rho} Gamma(rho+1) / (-2 pi i n)^{rho+1},   a_0 = 0,

with principal-branch powers, and the sine-form reconstruction

    qcheck_rho(a) = -(e^{i pi rho} Gamma(rho+1) / (2^rho pi^{rho+1}))
                    * sum_{n>=1} sin(2 pi n a + pi rho / 2) / n^{rho+1}.

Specialising the reconstruction to a = 0 yields the functional equation of
the Riemann zeta function; since the zeta evaluator in this package never
uses reflection, the residual computed here is a genuine two-sided check.

The module also carries the singular-limit diagnostics for rho near the
negative integers, where the family degenerates distributionally: only the
numerically checkable leading-order statements are implemented, not a
delta-function calculus.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleError
from .formal import qcheck_rho
from .special import cpow, gamma, polylog, zeta

_TWO_PI = 2.0 * math.pi


def fourier_coeff_closed(rho, n: int) -> complex:
    """a_n(rho) = e^{i pi rho} Gamma(rho+1) / (-2 pi i n)^{rho+1}; a_0 = 0."""
    rho = complex(rho)
    if n == 0:
        return 0j
    if abs(rho.imag) < 1e-13 and abs(rho.real - round(rho.real)) < 1e-13 \
            and round(rho.real) < 0:
        raise PoleError("Gamma pole at rho + 1 <= 0", location=int(round(rho.real)))
    num = cmath.exp(1j * math.pi * rho) * gamma(rho + 1.0)
    return num / cpow(-_TWO_PI * 1j * n, rho + 1.0)


@dataclass
class FourierCoefficientSet:
    """Coefficients a_n for |n| <= N at a fixed rho (a_0 = 0 always)."""
    rho: complex
    coefficients: dict = field(default_factory=dict)

    @classmethod
    def closed_form(cls, rho, N: int) -> "FourierCoefficientSet":
        rho = complex(rho)
        coeffs = {0: 0j}
        for n in range(1, N + 1):
            coeffs[n] = fourier_coeff_closed(rho, n)
            coeffs[-n] = fourier_coeff_closed(rho, -n)
        return cls(rho=rho, coefficients=coeffs)


def _gauss_panel(f, a: float, b: float, nodes, weights) -> complex:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * sum(w * f(mid + half * t) for t, w in zip(nodes, weights))


def fourier_coeff_quadrature(rho, n: int, rel_tol: float = 1e-11) -> complex:
    """a_n(rho) by adaptive composite Gauss quadrature of
    qcheck_rho(a) e^{-2 pi i n a} over [0, 1].

    For Re(rho) < 0 the integrand grows like (1-a)^{Re rho} at the right
    endpoint; the substitution a = 1 - u^{1/(1+Re rho)} flattens it (the
    transformed integrand is bounded), after which dyadic panel refinement
    converges.  Very negative Re(rho) (<= -0.9) exhausts the refinement
    budget; the achieved estimate is still returned.
    """
    rho = complex(rho)
    if rho.real <= -1.0:
        raise DomainError("integrability needs Re(rho) > -1")
    if abs(rho.imag) < 1e-13 and abs(rho.real - round(rho.real)) < 1e-13 \
            and round(rho.real) < 0:
        raise DomainError("rho in Z_{<0} is distributional")
    nodes, weights = np.polynomial.legendre.leggauss(24)

    if rho.real >= 0:
        def f(a):
            return qcheck_rho(rho, a) * cmath.exp(-_TWO_PI * 1j * n * a)
        grading = None
    else:
        beta = 1.0 / (1.0 + rho.real)

        def f(u):
            # a = 1 - u^beta; da = -beta u^{beta-1} du, orientation folded in
            a = 1.0 - u ** beta
            if a >= 1.0:
                a = math.nextafter(1.0, 0.0)
            if a < 0.0:
                a = 0.0
            w = beta * u ** (beta - 1.0) if u > 0 else 0.0
            return qcheck_rho(rho, a) * cmath.exp(-_TWO_PI * 1j * n * a) * w
        grading = beta

    def composite(m: int) -> complex:
        total = 0j
        for p in range(m):
            total += _gauss_panel(f, p / m, (p + 1) / m, nodes, weights)
        return total

    prev = composite(4)
    for m in (8, 16, 32, 64):
        cur = composite(m)
        if abs(cur - prev) < rel_tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    # graded cases near the integrability edge may stop here; the last
    # refinement is the achieved accuracy
    _ = grading
    return prev


def reconstruct(rho, alpha: float, N: int) -> complex:
    """Partial Fourier reconstruction of qcheck_rho at alpha:

    -(e^{i pi rho} Gamma(rho+1) / (2^rho pi^{rho+1}))
        * sum_{n=1}^{N} sin(2 pi n alpha + pi rho / 2) / n^{rho+1}.

    Absolutely convergent for Re(rho) > 0 with tail below
    |coef| * N^{-Re rho} / Re rho; conditionally convergent (no tail
    guarantee) for Re(rho) <= 0.
    """
    rho = complex(rho)
    coef = -(cmath.exp(1j * math.pi * rho) * gamma(rho + 1.0)
             / (cpow(2.0, rho) * cpow(math.pi, rho + 1.0)))
    total = 0j
    for n in range(1, N + 1):
        total += cmath.sin(_TWO_PI * n * alpha + math.pi * rho / 2.0) \
            / cpow(n, rho + 1.0)
    return coef * total


def reconstruction_tail_bound(rho, N: int) -> float:
    rho = complex(rho)
    if rho.real <= 0:
        raise DomainError("no tail guarantee for Re(rho) <= 0")
    coef = abs(cmath.exp(1j * math.pi * rho) * gamma(rho + 1.0)
               / (cpow(2.0, rho) * cpow(math.pi, rho + 1.0)))
    # |sin| on the critical strip of the sum stays O(e^{pi |Im rho| / 2})
    osc = math.cosh(math.pi * abs(rho.imag) / 2.0)
    return coef * osc * N ** (-rho.real) / rho.real


def functional_equation_residual(s) -> complex:
    """zeta(s) - 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s).

    A genuine cross-check: the zeta evaluator never uses reflection.  At
    negative even integers the sine zero meets the trivial zero; the right
    side is exact 0 there and the residual is zeta(s) itself (which the
    Euler-Maclaurin machinery reproduces at the 1e-13 level).
    """
    s = complex(s)
    if s == 0 or s == 1:
        raise DomainError("s in {0, 1} excluded")
    if abs(s.imag) < 1e-13 and abs(s.real - round(s.real)) < 1e-13:
        n = int(round(s.real))
        if n < 0 and n % 2 == 0:
            return zeta(s) - 0.0
        if n > 1:
            raise DomainError("Gamma(1-s) pole for integer s > 1")
    rhs = (cpow(2.0, s) * cpow(math.pi, s - 1.0) * cmath.sin(math.pi * s / 2.0)
           * gamma(1.0 - s) * zeta(1.0 - s))
    return zeta(s) - rhs


@dataclass
class SingularLimitReport:
    """Numerically checkable content of the distributional limit story.

    As rho approaches a negative integer, qcheck_rho(alpha) blows up at
    alpha -> 1- like the polylog Li_{rho+1}(alpha) (times 1/Gamma(-rho)),
    while the difference against the zeta-to-1 replacement model
    e^{i pi rho} (1 - alpha)^rho stays bounded: the divergence is entirely
    the one-sided power singularity whose Gamma-normalised limit is the
    delta-function mechanism.
    """
    rho: complex
    alpha_grid: list
    model_values: list
    differences: list
    polylog_ratio: list

    @property
    def max_difference(self) -> float:
        return max(abs(d) for d in self.differences)

    @property
    def max_model(self) -> float:
        return max(abs(m) for m in self.model_values)


def singular_limit_diagnostic(rho, alpha_grid) -> SingularLimitReport:
    """Compare qcheck_rho against its leading singular model on a grid.

    The model replaces every zeta(j - rho) by 1, which sums in closed form
    to e^{i pi rho} (1 - alpha)^rho; the difference series has coefficients
    proportional to zeta(j-rho) - 1 = O(2^{-j}) and is bounded up to
    alpha = 1.  The polylog comparison divides by the Appendix-normalised
    Li_{rho+1}(alpha) / Gamma(-rho) to exhibit the leading-order constant.
    """
    rho = complex(rho)
    if not (-1.0 < rho.real < 0.0):
        raise DomainError("diagnostic zone is -1 < Re(rho) < 0")
    phase = cmath.exp(1j * math.pi * rho)
    models, diffs, ratios = [], [], []
    for a in alpha_grid:
        a = float(a)
        if not 0.0 < a < 1.0:
            raise DomainError("alpha grid must lie inside (0, 1)")
        model = phase * cpow(1.0 - a, rho)
        value = qcheck_rho(rho, a)
        models.append(model)
        diffs.append(value - model)
        li_model = phase * polylog(rho + 1.0, a) / gamma(-rho)
        ratios.append(value / li_model if li_model != 0 else complex("inf"))
    return SingularLimitReport(rho=rho, alpha_grid=[float(a) for a in alpha_grid],
                               model_values=models, differences=diffs,
                               polylog_ratio=ratios)
