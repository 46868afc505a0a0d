"""Combinatorial and asymptotic side results.

* the modified Pascal triangle: coefficients of (a d/da)^n over the basis
  a^m (d/da)^m, built by entry = m * above-left + above-right;
* binomial-coefficient asymptotics C(rho, j) ~ (-1)^j C j^{-rho-1}
  (1 + a1/j + ...) with the constants fitted over large-j windows;
* the expansion of ln C(rho, j) whose 1/j^m coefficients are
  (qcheck_m(rho+1) + zeta(-m)) / m;
* ray behaviour of the integer scale members on the critical line
  alpha = 1/2 + i t, and the exact relation between |qcheck_n(1/2)| and
  the coefficients of the theta(T) asymptotic series.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateFitError, DomainError
from .scale import qcheck_at_half, qcheck_poly
from .special import EULER_GAMMA, zeta_exact_at_int


@dataclass
class Triangle:
    """rows[n-1] lists the coefficients of (a d/da)^n over a^m d^m,
    ordered m = n down to m = 1 (leftmost entry is the top power)."""
    rows: list = field(default_factory=list)

    def entry(self, n: int, m: int) -> int:
        """Coefficient of a^m d^m in (a d/da)^n."""
        if not 1 <= m <= n <= len(self.rows):
            raise DomainError("entry out of range")
        return self.rows[n - 1][n - m]

    def row(self, n: int):
        return list(self.rows[n - 1])


def triangle(rows: int) -> Triangle:
    """Build the modified Pascal triangle by its recurrence:
    entry(n, m) = m * entry(n-1, m) + entry(n-1, m-1), edges = 1."""
    if rows < 1:
        raise DomainError("rows must be >= 1")
    by_power = [[1]]  # row n stored ascending in m here
    for n in range(2, rows + 1):
        prev = by_power[-1]
        cur = []
        for m in range(1, n + 1):
            above = prev[m - 1] if m <= len(prev) else 0
            above_left = prev[m - 2] if m >= 2 else 0
            cur.append(m * above + above_left)
        by_power.append(cur)
    return Triangle(rows=[list(reversed(r)) for r in by_power])


def _falling(j: int, m: int) -> int:
    out = 1
    for i in range(m):
        out *= (j - i)
    return out


def alpha_ddalpha_apply(n: int, j: int) -> int:
    """Apply (a d/da)^n to the monomial a^j through the triangle expansion:
    sum_m entry(n, m) * j(j-1)...(j-m+1) -- must equal j^n exactly."""
    if n < 0 or j < 0:
        raise DomainError("n, j must be >= 0")
    if n == 0:
        return 1
    tri = triangle(n)
    return sum(tri.entry(n, m) * _falling(j, m) for m in range(1, n + 1))


def formal_operator_series(nu, m_max: int):
    """Truncated expansion coefficients of (a d/da)^nu over a^m d^m.

    The coefficient of the m-th basis operator is the forward-difference
    value Delta^m [z^nu](0) / m! (the continuous "fabric" under the
    triangle); at integer nu it reproduces the triangle rows exactly and
    terminates.  For non-integer nu this is a truncation experiment only:
    no convergence claim is made.
    """
    nu = complex(nu)
    out = []
    for m in range(1, m_max + 1):
        acc = 0j
        for i in range(0, m + 1):
            if i == 0:
                if nu == 0:
                    acc += (-1.0) ** (m % 2)
                continue
            acc += (-1.0) ** ((m - i) % 2) * math.comb(m, i) \
                * complex(i) ** nu
        out.append(acc / math.factorial(m))
    return out


# ---------------------------------------------------------------------------
# binomial asymptotics
# ---------------------------------------------------------------------------

@dataclass
class AsymptoticFit:
    C: complex
    a_coeffs: list
    residual: float


def _log_binom_cumsum(rho: complex, j_max: int) -> np.ndarray:
    """partial[j] = sum_{i<j} [log(rho - i) - log(i + 1)]; exp(partial[j])
    recovers C(rho, j) branch-independently."""
    i = np.arange(j_max)
    return np.cumsum(np.log((rho - i).astype(complex)) - np.log(i + 1.0))


def binom_asym_fit(rho, j_window, n_terms: int = 3) -> AsymptoticFit:
    """Fit C, a1, a2 in C(rho, j) = (-1)^j C j^{-rho-1} (1 + a1/j + a2/j^2 ...)
    over an index window (log-spaced samples, least squares in 1/j)."""
    rho = complex(rho)
    if abs(rho.imag) < 1e-13 and abs(rho.real - round(rho.real)) < 1e-13 \
            and round(rho.real) >= 0:
        raise DegenerateFitError("integer rho >= 0: C(rho, j) vanishes for "
                                 "j > rho, nothing to fit")
    j_lo, j_hi = int(min(j_window)), int(max(j_window))
    if j_lo < 10:
        raise DomainError("window must start at j >= 10")
    logs = _log_binom_cumsum(rho, j_hi + 1)
    js = np.unique(np.geomspace(j_lo, j_hi, 24).astype(int))
    # r_j = (-1)^j C(rho, j) j^{rho+1} = C (1 + a1/j + ...)
    r = np.array([
        cmath.exp(complex(logs[j - 1]) + (rho + 1.0) * math.log(j)
                  + 1j * math.pi * j)
        for j in js
    ])
    A = np.vstack([js ** (-float(m)) for m in range(n_terms)]).T.astype(complex)
    sol, *_ = np.linalg.lstsq(A, r, rcond=None)
    resid = float(np.max(np.abs(A @ sol - r)))
    return AsymptoticFit(C=complex(sol[0]),
                         a_coeffs=[complex(c / sol[0]) for c in sol[1:]],
                         residual=resid)


def binom_decay_exponent(rho, j_window) -> float:
    """Log-log slope of |C(rho, j)|; the asymptotic exponent -Re(rho) - 1."""
    rho = complex(rho)
    j_lo, j_hi = int(min(j_window)), int(max(j_window))
    logs = _log_binom_cumsum(rho, j_hi + 1)
    js = np.unique(np.geomspace(j_lo, j_hi, 12).astype(int))
    y = np.array([complex(logs[j - 1]).real for j in js])
    A = np.vstack([np.ones(len(js)), np.log(js)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(sol[1])


def ln_binom_expansion_check(rho, j_window, n_fit: int = 4):
    """Fit the 1/j coefficients of ln C(rho, j) and compare against
    (qcheck_m(rho+1) + zeta(-m)) / m for m = 1, 2.

    Restricted to rho + 1 in (0, 1), where the periodised and polynomial
    readings of qcheck_m coincide.  Returns a dict with the fitted and
    expected coefficients, the constant-term cross-check and the maximum
    deviation over m = 1, 2.
    """
    rho = complex(rho)
    x = rho + 1.0
    if not (abs(x.imag) < 1e-13 and 0.0 < x.real < 1.0):
        raise DomainError("check requires rho + 1 in (0, 1)")
    x = x.real
    j_lo, j_hi = int(min(j_window)), int(max(j_window))
    if j_hi <= j_lo or j_lo < 20:
        raise DomainError("fit window ill-conditioned")
    # real arithmetic: ln|C(rho, j)| = ln C(rho,j) - i pi j for real rho < 0
    i = np.arange(j_hi)
    logs = np.cumsum(np.log(np.abs(rho.real - i)) - np.log(i + 1.0))
    js = np.unique(np.geomspace(j_lo, j_hi - 1, 40).astype(int))
    g = np.array([logs[j - 1] + x * math.log(j) for j in js])
    A = np.vstack([js ** (-float(m)) for m in range(n_fit)]).T
    sol, *_ = np.linalg.lstsq(A, g, rcond=None)
    expected = {}
    fitted = {}
    for m in (1, 2):
        expected[m] = (float(qcheck_poly(m)(x)) + zeta_exact_at_int(-m)) / m
        fitted[m] = float(sol[m])
    # constant term: -(gamma x + sum_{m>=2} zeta(m) x^m / m)
    const = -EULER_GAMMA * x
    for m in range(2, 200):
        zm = zeta_exact_at_int(m)
        if zm is None:
            from .special import zeta as _zeta
            zm = _zeta(float(m)).real
        term = zm * x ** m / m
        const -= term
        if term < 1e-18:
            break
    deviation = max(abs(fitted[m] - expected[m]) for m in (1, 2))
    return {
        "fitted": fitted,
        "expected": expected,
        "constant_fitted": float(sol[0]),
        "constant_expected": const,
        "max_deviation": deviation,
    }


# ---------------------------------------------------------------------------
# critical-line behaviour
# ---------------------------------------------------------------------------

_RAYS = ("Im_pos", "Re_neg", "Im_neg", "Re_pos")


def ray_behaviour_check(n: int, t_grid):
    """Evaluate the polynomial qcheck_n at 1/2 + i t on a grid.

    The shifted polynomial has pure parity about 1/2, so its values lie
    exactly on one coordinate axis; the ray cycles with n as
    Im_pos, Re_neg, Im_neg, Re_pos.  Returns a report dict with the ray
    name, the max off-axis component and the on-ray values.
    """
    if not 0 <= n <= 7:
        raise DomainError("tabulated range is 0 <= n <= 7")
    q = qcheck_poly(n)
    ray = _RAYS[n % 4]
    on_axis = []
    off = 0.0
    for t in t_grid:
        v = complex(q(0.5 + 1j * float(t)))
        if ray in ("Im_pos", "Im_neg"):
            off = max(off, abs(v.real))
            on_axis.append(v.imag)
        else:
            off = max(off, abs(v.imag))
            on_axis.append(v.real)
    sign_ok = all(
        (c >= -1e-15 if ray in ("Im_pos", "Re_pos") else c <= 1e-15)
        for c in on_axis)
    return {
        "n": n,
        "ray": ray,
        "max_off_axis": off,
        "on_axis_values": on_axis,
        "sign_consistent": sign_ok,
        "value_at_half": qcheck_at_half(n),
    }


#: coefficients of 1/T, 1/T^3, 1/T^5 in the theta(T) asymptotic series
THETA_SERIES_COEFFS = {
    1: Fraction(1, 48),
    3: Fraction(7, 5760),
    5: Fraction(31, 80640),
}


def theta_coefficient_check():
    """|qcheck_n(1/2)| = 2n * (coefficient of T^{-n} in theta(T)), exactly
    in rational arithmetic for n in {1, 3, 5}."""
    report = {}
    for n, c in THETA_SERIES_COEFFS.items():
        lhs = abs(qcheck_at_half(n))
        rhs = 2 * n * c
        report[n] = {"qcheck_half_abs": lhs, "2n_times_coeff": rhs,
                     "equal": lhs == rhs}
    return report
