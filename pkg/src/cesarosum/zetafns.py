"""p-sum builders, the Euler-Maclaurin engine, and Hurwitz zeta by
independent routes.

The p-sum of a power kernel, s(X) = sum_{j<=floor(X)} (z0+j)^{-s}, has the
exact representation

    s(X) = X^{1-s}/(1-s) + zeta(s) - sum_{j>=0} (-1)^j C(-s,j) X^{-s-j} qc_j

(the (X - qcheck)^{-s} expansion), which this module materialises as a
TermSum, and the compact Euler-Maclaurin form sum f(n) ~ C_f - f(k + tau)
whose tau-expansion reproduces the classical Bernoulli corrections term by
term.

The Hurwitz zeta (the paper this machinery follows calls it "Hurewicz";
the formulas are the standard Hurwitz function shifted by one,
zeta_H(z0; s) = sum_{j>=1} (z0+j)^{-s}) comes by three genuinely different
routes: the Taylor series in z0, the Cesaro limit of its p-sum, and the
subject-changed asymptotic series.  Cross-route agreement is one of the
package's main verification targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cesaro import (
    GridFunction,
    Term,
    TermSum,
    _grid,
    cesaro_limit,
    regular_poly,
)
from .errors import ContractError, DomainError, PoleError
from .formal import expand_binomial, evaluate_with_limits
from .scale import bernoulli_numbers
from .special import binom, cpow, zeta, zeta_exact_at_int

# ---------------------------------------------------------------------------
# p-sums
# ---------------------------------------------------------------------------


def psum_eval(z0, s, X: float) -> complex:
    """Direct Kahan-compensated partial sum sum_{j<=floor(X)} (z0+j)^{-s}."""
    z0 = complex(z0)
    s = complex(s)
    if X < 0:
        raise DomainError("X must be >= 0")
    total = 0j
    comp = 0j
    for j in range(1, math.floor(X) + 1):
        base = z0 + j
        if base == 0:
            raise PoleError(f"summand pole at j = {j}", location=j)
        y = cpow(base, -s) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


@dataclass
class PSum:
    """The partial-sum step function of a power kernel, grid-realisable.

    A step function has a closed-form cumulative integral, which is what
    keeps the first averaging pass of the Cesaro operator error-free.
    """
    z0: complex
    s: complex

    def value(self, X: float) -> complex:
        return psum_eval(self.z0, self.s, X)

    def realize(self, x_max: float, step: float) -> GridFunction:
        X = _grid(x_max, step)
        kmax = int(math.floor(X[-1]))
        a = np.zeros(kmax + 1, dtype=complex)
        js = np.arange(1, kmax + 1)
        bases = (complex(self.z0) + js).astype(complex)
        if np.any(bases == 0):
            raise PoleError("summand pole on the ray", location=None)
        a[1:] = np.exp(-complex(self.s) * np.log(bases))
        S = np.cumsum(a)
        W = np.cumsum(a * np.arange(kmax + 1))
        kk = np.floor(X).astype(int)
        samples = S[kk]
        cumint = X * S[kk] - W[kk]
        return GridFunction(x_max=x_max, step=step, samples=samples,
                            exact_cumint=cumint, z0=complex(self.z0))


def psum_term_expansion(s, J: int) -> TermSum:
    """Exact TermSum for the zeta p-sum:
    X^{1-s}/(1-s) + zeta(s) - sum_{j=0}^{J} (-1)^j C(-s,j) X^{-s-j} qc_j.

    For s = -n (n in Z_{>=0}) the expansion terminates by itself at j = n
    and the identity is exact once J >= n; otherwise J is an asymptotic
    truncation whose tail is super-exponentially small for X >> J/(2 pi).
    """
    s = complex(s)
    if s == 1:
        raise PoleError("s = 1 is the zeta pole", location=1)
    terms = [Term("pow", 1.0 / (1.0 - s), 1.0 - s),
             Term("pow", zeta(s), 0j)]
    for j in range(J + 1):
        c = -((-1.0) ** (j % 2)) * binom(-s, j)
        if c != 0:
            terms.append(Term("powq", c, -s - j, j))
    return TermSum(terms)


# ---------------------------------------------------------------------------
# Euler-Maclaurin, classical and compact
# ---------------------------------------------------------------------------

@dataclass
class EMApproximation:
    """Both faces of the Euler-Maclaurin sum formula at a point k.

    classical:  sum_{n<=k} f(n) ~ A(k) + C_f + f(k)/2
                              + sum_{r>=2} B_r/r! f^(r-1)(k)
    compact:    sum_{n<=k} f(n) ~ C_f - f(k + tau), where
                -f(k+tau) = A(k) - sum_{r>=0} zeta(-r) f^(r)(k)/r!

    A is the caller's antiderivative; its anchoring constant is absorbed
    into the C_f slot, which is fitted so the classical form reproduces the
    direct sum at k.  ``compact_terms[r]`` pairs with ``half_term`` (r = 0)
    or ``correction_terms[r-1]`` (r >= 1); the pairs agree exactly because
    zeta(-r) = -B_{r+1}/(r+1) and the odd Bernoulli numbers vanish.
    """
    integral_part: complex
    constant_part: complex
    half_term: complex
    correction_terms: list = field(default_factory=list)
    compact_terms: list = field(default_factory=list)
    truncation_order: int = 0

    @property
    def classical_total(self) -> complex:
        return (self.integral_part + self.constant_part + self.half_term
                + sum(self.correction_terms))

    @property
    def compact_total(self) -> complex:
        return self.integral_part + self.constant_part + sum(self.compact_terms)


def euler_maclaurin(f, k: int, M: int, derivatives=None,
                    antiderivative=None, reference_sum=None) -> EMApproximation:
    """Euler-Maclaurin approximation of sum_{n=1}^{k} f(n).

    The caller supplies the function, its derivatives up to order 2M as
    ``derivatives(order, x)``, and an antiderivative; an "amenable"
    function is operationalised as exactly that contract and nothing is
    differentiated automatically.  ``reference_sum`` replaces the direct
    sum used to anchor the C_f slot (useful when k is large).
    """
    if derivatives is None or antiderivative is None:
        raise ContractError("euler_maclaurin needs derivatives(order, x) and "
                            "an antiderivative(x)")
    k = int(k)
    if k < 1:
        raise DomainError("k must be >= 1")
    if M < 1:
        raise DomainError("M must be >= 1")
    integral = complex(antiderivative(k))
    fk = complex(f(k))
    half = 0.5 * fk
    corrections = []
    compact = [-zeta_exact_at_int(0) * fk]  # r = 0: +f(k)/2
    bern = bernoulli_numbers(2 * M + 1)
    for r in range(1, 2 * M + 1):
        d = complex(derivatives(r, k))
        compact.append(-zeta_exact_at_int(-r) * d / math.factorial(r))
        b = float(bern[r + 1])
        corrections.append(b / math.factorial(r + 1) * d)
    direct = complex(reference_sum) if reference_sum is not None else \
        sum(complex(f(n)) for n in range(1, k + 1))
    constant = direct - (integral + half + sum(corrections))
    return EMApproximation(integral_part=integral, constant_part=constant,
                           half_term=half, correction_terms=corrections,
                           compact_terms=compact, truncation_order=M)


def compact_psum_zeta(s, k: int) -> complex:
    """zeta(s) - (k+tau)^{-s}: the compact form of the zeta p-sum.

    The subject-changed expansion is materialised through the formal engine
    (its j = -1 fabric term carries the k^{1-s}/(1-s) piece) and truncated
    near the optimal asymptotic index ~ 2 pi k.  Equals psum_eval(0, s, k)
    to machine-level accuracy for k >= 5.
    """
    s = complex(s)
    if s == 1:
        raise PoleError("s = 1 is the zeta pole", location=1)
    if k < 1:
        raise DomainError("k must be >= 1")
    j_top = max(4, min(56, int(2 * math.pi * k) - 4))
    ser = expand_binomial("k_plus_tau", -s, -1, j_top)
    return zeta(s) - evaluate_with_limits(ser, float(k))


# ---------------------------------------------------------------------------
# Hurwitz zeta, three ways
# ---------------------------------------------------------------------------

def hurwitz_taylor(z0, s) -> complex:
    """zeta_H(z0; s) = sum_j C(-s, j) zeta(s+j) z0^j on |z0| < 1.

    For s = -n (non-positive integer) the series is the finite closed form
    with the fabric limit -z0^{n+1}/(n+1) standing in for the singular
    index j = n + 1.
    """
    z0 = complex(z0)
    s = complex(s)
    if abs(z0) >= 1.0:
        raise DomainError("hurwitz_taylor needs |z0| < 1; use the "
                          "subject-changed asymptotic route for large z0")
    if abs(s.imag) < 1e-13 and abs(s.real - round(s.real)) < 1e-13:
        n = int(round(s.real))
        if n >= 1:
            raise DomainError("s in Z_{>0} excluded (s = 1 is a pole at the "
                              "j = 0 term; other positive integers are plain "
                              "zeta values)")
        n = -n
        total = 0j
        for j in range(n + 1):
            total += binom(complex(n), j) * zeta(float(j - n)) * z0 ** j
        total -= z0 ** (n + 1) / (n + 1)
        return total
    if z0 == 0:
        return zeta(s)
    total = 0j
    cj = 1.0 + 0j
    zj = 1.0 + 0j
    prev = math.inf
    for j in range(0, 200000):
        term = cj * zeta(s + j) * zj
        total += term
        mag = abs(term)
        if j >= 50:
            # Appendix-style bound: |C(-s, j)| <= K j^{Re s - 1} with K read
            # off at the current index
            K = abs(cj) * j ** (1.0 - s.real)
            tail = (K * (j + 1) ** (s.real - 1.0) * abs(zj * z0)
                    / max(1e-30, 1.0 - abs(z0)))
            if tail < 1e-13 * max(1.0, abs(total)):
                break
        elif j > 10 and mag < 1e-16 * max(1.0, abs(total)) and prev < 1e-15:
            break
        prev = mag
        cj *= (-s - j) / (j + 1)
        zj *= z0
    return total


def hurwitz_asymptotic(z0, s) -> complex:
    """zeta_H by the subject-changed expansion of (z0 + tau)^{-s}:
    -z0^{1-s}/(1-s) + sum_{j>=0} C(-s,j) zeta(-j) z0^{-s-j}, truncated at
    the smallest term.  This is the Euler-Maclaurin shape of the function
    read directly off the formal series; accurate for |z0| >~ 8.
    """
    z0 = complex(z0)
    s = complex(s)
    if s == 1:
        raise PoleError("s = 1 pole", location=1)
    if abs(z0) < 2.0:
        raise DomainError("asymptotic route needs moderately large |z0|")
    total = -cpow(z0, 1.0 - s) / (1.0 - s)
    cj = 1.0 + 0j
    zpow = cpow(z0, -s)
    best = math.inf
    for j in range(0, 58):
        zv = zeta_exact_at_int(-j)
        mag = abs(cj * zpow)
        if zv != 0:
            if mag * abs(zv) > 4 * best:
                break  # asymptotic divergence setting in
            best = min(best, mag * abs(zv))
            total += cj * zv * zpow
        cj *= (-s - j) / (j + 1)
        zpow /= z0
    return total


def hurwitz_eval(z0, s) -> complex:
    """Best-effort zeta_H(z0; s): Taylor inside |z0| <= 1/2, otherwise pull
    out enough leading summands to reach the asymptotic zone."""
    z0 = complex(z0)
    s = complex(s)
    if abs(z0) <= 0.5:
        return hurwitz_taylor(z0, s)
    n_pull = max(0, int(math.ceil(10 - z0.real)))
    pulled = 0j
    for j in range(1, n_pull + 1):
        pulled += cpow(z0 + j, -s)
    return pulled + hurwitz_asymptotic(z0 + n_pull, s)


def hurwitz_cesaro(z0, s, x_max: float = 2000.0, step: float = 1.0 / 128):
    """zeta_H(z0; s) as the Cesaro limit of its p-sum.

    The leading z^{1-s}/(1-s) is subtracted exactly and the regular
    polynomial q(P; s) = ((2-s)/(1-s))(P - 1/(2-s)) P^{floor(Re(-s))+1} is
    applied on the grid, with the averaging dividing by z = z0 + X.  The
    transformed residual decays like z^{-s-r} plus boundary 1/z terms,
    which is exactly the fit basis used for the limit.

    Returns (value, error_estimate).
    """
    z0 = complex(z0)
    s = complex(s)
    if s.real > 1:
        raise DomainError("Cesaro route covers Re(s) <= 1, s != 1")
    op = regular_poly(s, "theorem2")
    gf = PSum(z0=z0, s=s).realize(x_max, step)
    X = gf.X
    zs = (z0 + X).astype(complex)
    lead = np.zeros(len(X), dtype=complex)
    anti = np.zeros(len(X), dtype=complex)
    nz = np.abs(zs) > 0
    lead[nz] = np.exp((1.0 - s) * np.log(zs[nz])) / (1.0 - s)
    anti[nz] = np.exp((2.0 - s) * np.log(zs[nz])) / ((1.0 - s) * (2.0 - s))
    anti0 = cpow(z0, 2.0 - s) / ((1.0 - s) * (2.0 - s)) if z0 != 0 else 0j
    g = GridFunction(x_max=x_max, step=step, samples=gf.samples - lead,
                     exact_cumint=gf.exact_cumint - (anti - anti0), z0=z0)
    r = op.power
    e1 = -s - r
    basis = ["log0", "log1"] if abs(e1 + 1.0) < 0.05 else [e1, "log0"]
    return cesaro_limit(g, op, x_max=x_max, step=step, fit_basis=basis)


def hurwitz_integral_check(s, panels: int = 24, order: int = 24) -> complex:
    """int_{-1}^{0} zeta_H(z0; s) dz0, expected 0 for s outside Z_{>0}.

    Substituting u = z0 + 1 gives int_0^1 [u^{-s} + zeta_H(u; s)] du; the
    u^{-s} piece (the j = 1 summand, carrying the endpoint singularity at
    z0 = -1) integrates analytically to 1/(1-s) and the remaining integrand
    is smooth on [0, 1], where composite Gauss-Legendre converges fast.
    """
    s = complex(s)
    if abs(s.imag) < 1e-13 and abs(s.real - round(s.real)) < 1e-13 \
            and round(s.real) >= 1:
        raise DomainError("s in Z_{>0} excluded")
    if s.real >= 1:
        raise DomainError("endpoint z0 = -1 not integrable for Re(s) >= 1")
    total = 1.0 / (1.0 - s)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    for p in range(panels):
        a, b = p / panels, (p + 1) / panels
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        for t, w in zip(nodes, weights):
            total += w * half * hurwitz_eval(mid + half * t, s)
    return total
