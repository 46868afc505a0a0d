"""Classical special functions on complex doubles.

Everything downstream (the tau-series engine, the Cesaro operator suites,
the Fourier identities) consumes these reference evaluators:

* ``cpow``       -- principal-branch complex power
* ``gamma``      -- Lanczos rational kernel, reflection for Re z < 1/2
* ``zeta``       -- Euler-Maclaurin tail summation, no reflection shortcut
* ``zeta_deriv`` -- term-wise differentiated Euler-Maclaurin
* ``binom``      -- generalised binomial coefficient with pole bookkeeping
* ``polylog``    -- power series Li_s(x) on |x| < 1

The zeta evaluator deliberately never uses the functional equation, so the
functional-equation residual computed in :mod:`cesarosum.fourier` is a
genuine cross-validation and not a tautology.

All functions raise (:mod:`cesarosum.errors`) instead of returning NaN.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from .errors import (
    DomainError,
    IndeterminateError,
    PoleError,
    require_finite,
)
from .scale import bernoulli_numbers

# Euler-Mascheroni and the first Stieltjes constants, gamma_1..gamma_3.
# These drive the Laurent expansion of zeta about its pole:
#   zeta(1 + d) = 1/d + gamma_0 - gamma_1 d + gamma_2 d^2/2 - gamma_3 d^3/6 + ...
EULER_GAMMA = 0.5772156649015328606065121
STIELTJES = (
    EULER_GAMMA,
    -0.07281584548367672486058638,
    -0.009690363192872318484530386,
    0.002053834420303345866160047,
)

_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    3.3994649984811888699e-5,
    4.6523628927048575665e-5,
    -9.8374475304879564677e-5,
    1.5808870322491248884e-4,
    -2.1026444172410488319e-4,
    2.1743961811521264320e-4,
    -1.6431810653676389022e-4,
    8.4418223983852743293e-5,
    -2.6190838401581408670e-5,
    3.6899182659531622704e-6,
)


def _as_complex(z) -> complex:
    return complex(z)


def _is_real_integer(z: complex, tol: float = 1e-12) -> bool:
    return abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


def cpow(base, exponent) -> complex:
    """base**exponent with the principal logarithm, Arg in (-pi, pi].

    A zero base is allowed only when the exponent has positive real part
    (the limit is 0); otherwise it is a domain error.
    """
    b = _as_complex(base)
    e = _as_complex(exponent)
    if b == 0:
        if e == 0:
            return 1.0 + 0j
        if e.real > 0:
            return 0j
        raise DomainError("cpow: zero base with non-positive-real-part exponent")
    if e == 0:
        return 1.0 + 0j
    return require_finite(cmath.exp(e * cmath.log(b)), "cpow")


def gamma(z) -> complex:
    """Gamma(z) to ~1e-13 relative on |z| <= 30 away from poles."""
    z = _as_complex(z)
    if _is_real_integer(z) and round(z.real) <= 0:
        raise PoleError(f"gamma pole at z = {int(round(z.real))}",
                        location=int(round(z.real)))
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return require_finite(
            math.pi / (cmath.sin(math.pi * z) * gamma(1.0 - z)), "gamma")
    w = z - 1.0
    a = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        a += _LANCZOS_C[k] / (w + k)
    t = w + _LANCZOS_G + 0.5
    return require_finite(
        math.sqrt(2.0 * math.pi) * cpow(t, w + 0.5) * cmath.exp(-t) * a,
        "gamma")


def loggamma(z) -> complex:
    """log Gamma(z), principal on the right half-plane (Re z > 0)."""
    z = _as_complex(z)
    if z.real <= 0 and _is_real_integer(z):
        raise PoleError("loggamma pole", location=int(round(z.real)))
    if z.real < 0.5:
        # log-reflection keeps moderate |Im z| cases usable
        return cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - loggamma(1.0 - z)
    w = z - 1.0
    a = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        a += _LANCZOS_C[k] / (w + k)
    t = w + _LANCZOS_G + 0.5
    return (w + 0.5) * cmath.log(t) - t + 0.5 * math.log(2.0 * math.pi) + cmath.log(a)


@lru_cache(maxsize=None)
def _bern_float(n: int) -> float:
    return float(bernoulli_numbers(n)[n])


def digamma(z) -> complex:
    """psi(z) = Gamma'(z)/Gamma(z); recurrence into the asymptotic zone."""
    z = _as_complex(z)
    if _is_real_integer(z) and round(z.real) <= 0:
        raise PoleError("digamma pole", location=int(round(z.real)))
    acc = 0j
    while z.real < 10.0:
        acc -= 1.0 / z
        z = z + 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    s = cmath.log(z) - 0.5 * inv
    p = inv2
    for k in range(1, 8):
        s -= _bern_float(2 * k) / (2 * k) * p
        p *= inv2
    return require_finite(acc + s, "digamma")


def trigamma(z) -> complex:
    """psi'(z); same recurrence + asymptotic-series strategy as digamma."""
    z = _as_complex(z)
    if _is_real_integer(z) and round(z.real) <= 0:
        raise PoleError("trigamma pole", location=int(round(z.real)))
    acc = 0j
    while z.real < 10.0:
        acc += 1.0 / (z * z)
        z = z + 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    s = inv + 0.5 * inv2
    p = inv * inv2
    for k in range(1, 8):
        s += _bern_float(2 * k) * p
        p *= inv2
    return require_finite(acc + s, "trigamma")


# ---------------------------------------------------------------------------
# zeta by Euler-Maclaurin, computed as a truncated Taylor jet in a shift
# variable so that zeta', zeta'', zeta''' come from the one formula.
# ---------------------------------------------------------------------------

_DEFAULT_M = 14


def _jet_mul(a, b, K):
    return [
        sum(a[i] * b[q - i] for i in range(max(0, q - len(b) + 1), min(q + 1, len(a))))
        for q in range(K + 1)
    ]


def _jet_pow(x: float, expo: complex, K: int):
    """x^(expo - d) as a jet in d (x > 0 real)."""
    lx = math.log(x)
    base = cmath.exp(expo * lx)
    out = []
    term = 1.0 + 0j
    for q in range(K + 1):
        out.append(base * term)
        term *= (-lx) / (q + 1)
    return out


def _zeta_em_jet(s: complex, N: int, M: int, K: int):
    """Jet coefficients [c_0..c_K] of zeta(s + d) about d = 0.

    Direct sum to N-1, integral tail N^{1-s}/(s-1), half-term N^{-s}/2 and M
    Bernoulli corrections; every ingredient carried as a truncated Taylor
    polynomial in the shift d, so c_q = zeta^(q)(s)/q!.

    Returns (coeffs, first_dropped) where first_dropped estimates the first
    omitted correction term (relative truncation control).
    """
    tot = [0j] * (K + 1)
    for n in range(1, N):
        t = _jet_pow(n, -s, K)
        for q in range(K + 1):
            tot[q] += t[q]
    t = _jet_pow(N, 1.0 - s, K)
    a = s - 1.0
    inv = [(-1.0) ** q / a ** (q + 1) for q in range(K + 1)]
    for q, v in enumerate(_jet_mul(t, inv, K)):
        tot[q] += v
    t = _jet_pow(N, -s, K)
    for q in range(K + 1):
        tot[q] += 0.5 * t[q]
    poch = [1.0 + 0j] + [0j] * K
    last = 0j
    for r in range(1, M + 1):
        # extend poch(s+d, 2r-1) from poch(s+d, 2r-3) by two linear factors
        lo = 2 * r - 3 if r > 1 else 0
        for i in range(lo, 2 * r - 1):
            poch = _jet_mul(poch, [s + i, 1.0 + 0j], K)
        c = _bern_float(2 * r) / math.factorial(2 * r)
        t = _jet_pow(N, -s - 2 * r + 1, K)
        term = _jet_mul(poch, t, K)
        last = c * term[0]
        for q in range(K + 1):
            tot[q] += c * term[q]
    # first dropped correction, crude but adequate as a truncation sentinel
    poch = _jet_mul(poch, [s + 2 * M - 1, 1.0 + 0j], 0)
    poch = _jet_mul(poch, [s + 2 * M, 1.0 + 0j], 0)
    dropped = abs(_bern_float(2 * M + 2) / math.factorial(2 * M + 2) * poch[0]) * N ** (
        -s.real - 2 * M - 1)
    return tot, dropped


def _default_N(s: complex) -> int:
    return 25 + math.ceil(abs(s.imag))


@lru_cache(maxsize=4096)
def _zeta_jet_cached(s: complex, N: int, M: int, K: int):
    coeffs, dropped = _zeta_em_jet(s, N, M, K)
    scale = max(abs(coeffs[0]), 1e-300)
    if dropped > 1e-13 * scale:
        # one adaptive retry with a bigger N; beyond that we report what we have
        coeffs, dropped = _zeta_em_jet(s, 2 * N, M + 2, K)
    return tuple(coeffs)


def zeta_exact_at_int(m: int):
    """Exact float of zeta at an integer argument, or None.

    zeta(0) = -1/2, zeta(-k) = -B_{k+1}/(k+1), zeta(2m) from B_{2m}.  Odd
    positive arguments have no elementary closed form and return None.
    """
    if m == 0:
        return -0.5
    if m == 1:
        return None
    if m < 0:
        k = -m
        if k + 1 <= 60:
            return float(-bernoulli_numbers(k + 1)[k + 1] / Fraction(k + 1))
        return None
    if m % 2 == 0 and m <= 60:
        frac = Fraction(2) ** (m - 1) * abs(bernoulli_numbers(m)[m]) / Fraction(
            math.factorial(m))
        return float(frac) * math.pi ** m
    return None


def zeta_jet(s, order: int = 0, N: int | None = None, M: int | None = None):
    """[zeta(s), zeta'(s), ..., zeta^(order)(s)] via one Euler-Maclaurin pass.

    Integer arguments get their exact Bernoulli value substituted for the
    0th entry: the plain EM combination at s << 0 suffers float cancellation
    (the partial sum grows like N^{1-Re s}) and the exact value removes it.
    """
    s = _as_complex(s)
    if s == 1.0:
        raise PoleError("zeta pole at s = 1", location=1)
    n = N if N is not None else _default_N(s)
    m = M if M is not None else _DEFAULT_M
    coeffs = list(_zeta_jet_cached(s, n, m, order))
    out = [coeffs[q] * math.factorial(q) for q in range(order + 1)]
    if _is_real_integer(s) and N is None and M is None:
        ze = zeta_exact_at_int(int(round(s.real)))
        if ze is not None:
            out[0] = complex(ze)
    return out


def zeta(s, N: int | None = None, M: int | None = None) -> complex:
    """Riemann zeta by Euler-Maclaurin tail summation (no reflection)."""
    return require_finite(zeta_jet(s, 0, N=N, M=M)[0], "zeta")


def zeta_deriv(s, N: int | None = None, M: int | None = None) -> complex:
    """zeta'(s) from the term-wise differentiated Euler-Maclaurin formula."""
    return require_finite(zeta_jet(s, 1, N=N, M=M)[1], "zeta_deriv")


def binom(rho, j: int) -> complex:
    """Generalised binomial coefficient C(rho, j) for integer j.

    j >= 0 uses the falling-factorial product (exact zeros for integer rho
    out of range come out of the product itself).  j < 0 is 0 whenever only
    the Gamma denominator is singular; if rho is also a negative integer the
    numerator Gamma(rho+1) is singular with no countervailing fabric and the
    value is genuinely indeterminate.
    """
    rho = _as_complex(rho)
    if j >= 0:
        out = 1.0 + 0j
        for i in range(j):
            out *= (rho - i) / (i + 1)
        return out
    if _is_real_integer(rho) and round(rho.real) < 0:
        raise IndeterminateError(
            f"binom({rho}, {j}): numerator and denominator Gamma both singular; "
            "resolve through the coefficient fabric instead")
    return 0j


def polylog(s, alpha) -> complex:
    """Li_s(alpha) = sum_{j>=1} j^{-s} alpha^j for |alpha| < 1."""
    s = _as_complex(s)
    alpha = _as_complex(alpha)
    if abs(alpha) >= 1.0:
        raise DomainError("polylog: |alpha| must be < 1")
    if alpha == 0:
        return 0j
    total = 0j
    aj = 1.0 + 0j
    for jj in range(1, 200000):
        aj *= alpha
        term = aj * cpow(jj, -s)
        total += term
        if abs(term) < 1e-14 * max(abs(total), 1e-30) and jj > 4:
            break
    return require_finite(total, "polylog")
