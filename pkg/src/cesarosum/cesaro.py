"""The Cesaro averaging operator P in exact-symbolic and numeric form.

P[f](X) = (1/X) int_0^X f(x) dx smooths divergent oscillation; iterated
powers and regular polynomials in P extract generalised limits.  Two
realisations cooperate here:

* a symbolic one on finite sums of basis terms  c * X^delta * qcheck_r(X),
  where the integration-by-parts recursion is exact and residuals keep a
  closed-form evaluator;
* a numeric one on grid samples (exact first-pass integrals for step
  functions, cumulative Simpson afterwards; grid steps are 1/2**m so unit
  breakpoints land on even nodes and Simpson pairs never straddle a jump
  or kink).

In the remainder setting the ray variable is z = z0 + X and the averaging
divides by z, which is what makes z**delta an eigenfunction up to O(1/z).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import (
    DomainError,
    GridResolutionError,
    NoLimitError,
    PoleError,
)
from .scale import alpha_power_in_qcheck_basis, qcheck_poly
from .special import binom, cpow

_INT_TOL = 1e-12


def _as_int_power(delta: complex):
    if abs(delta.imag) < _INT_TOL and abs(delta.real - round(delta.real)) < _INT_TOL:
        return int(round(delta.real))
    return None


# ---------------------------------------------------------------------------
# symbolic term algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    """One basis term of the symbolic domain of P.

    kind:
      "pow"    c * X^delta                       (delta = 0 is a constant)
      "powq"   c * X^delta * qcheck_r(X)
      "qres"   c * X^{-1} (qcheck_{r+1}(X) - qcheck_{r+1}(0)) / (r+1)
               -- the image P[qcheck_r]; boundary_shift records the
               subtracted constant
      "pint"   c * P[X^delta qcheck_r](X) with -1 < Re delta <= 0,
               evaluated by exact per-interval integration
      "pqres"  c * P[qres_r](X), one more averaging of a residual
    """
    kind: str
    coeff: complex
    x_power: complex = 0j
    scale_index: int = 0
    boundary_shift: complex = 0j

    def key(self):
        return (self.kind, _group(self.x_power), self.scale_index)


def _group(p: complex):
    p = complex(p)
    return (round(p.real, 10), round(p.imag, 10))


class TermSum:
    """Canonical finite linear combination of Terms."""

    def __init__(self, terms=()):
        merged: dict = {}
        for t in terms:
            k = t.key()
            if k in merged:
                merged[k] = replace(merged[k], coeff=merged[k].coeff + t.coeff)
            else:
                merged[k] = t
        self.terms = tuple(t for t in merged.values() if t.coeff != 0)

    def __add__(self, other):
        return TermSum(self.terms + other.terms)

    def scale(self, c):
        return TermSum(tuple(replace(t, coeff=t.coeff * c) for t in self.terms))

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c):
        return cls((Term("pow", complex(c), 0j),))

    @classmethod
    def x_power(cls, delta, c=1.0):
        return cls((Term("pow", complex(c), complex(delta)),))

    @classmethod
    def x_power_qcheck(cls, delta, r: int, c=1.0):
        return cls((Term("powq", complex(c), complex(delta), r),))

    @classmethod
    def from_k_alpha(cls, n: int, r: int):
        """k^n alpha^r expanded over X = k + alpha into the X / qcheck basis.

        k^n = (X - alpha)^n; each alpha power splits exactly into its mean
        plus zero-mean qcheck members.
        """
        terms = []
        for j in range(n + 1):
            c = math.comb(n, j) * (-1.0) ** (j % 2)
            mean, qparts = alpha_power_in_qcheck_basis(r + j)
            delta = complex(n - j)
            terms.append(Term("pow", c * float(mean), delta))
            for m, cm in qparts.items():
                terms.append(Term("powq", c * float(cm), delta, m))
        return cls(terms)

    @classmethod
    def x_minus_qcheck_power(cls, n: int):
        """(X - qcheck)^n = sum_j (-1)^j C(n, j) X^{n-j} qcheck_j."""
        terms = []
        for j in range(n + 1):
            c = (-1.0) ** (j % 2) * math.comb(n, j)
            terms.append(Term("powq", complex(c), complex(n - j), j))
        return cls(terms)

    # -- evaluation ----------------------------------------------------------
    def __call__(self, x: float) -> complex:
        total = 0j
        for t in self.terms:
            total += t.coeff * _eval_term(t, float(x))
        return total

    def split_standalone(self):
        """(pure power part, oscillatory part) as TermSums."""
        pure = [t for t in self.terms if t.kind == "pow"]
        rest = [t for t in self.terms if t.kind != "pow"]
        return TermSum(tuple(pure)), TermSum(tuple(rest))

    def realize(self, x_max: float, step: float) -> "GridFunction":
        """Sample on the standard grid with an exact-where-it-matters first
        cumulative integral.

        Terms with a jump at the unit breakpoints (q-check index 0 and bare
        powers entering the basis through step functions) get closed-form
        cumulative integrals: any quadrature rule is O(step)-biased across
        a jump.  Continuous terms (q-check index >= 1, kinks only, and
        kinks land on Simpson pair boundaries) are integrated by cumulative
        Simpson and added in; integrals are additive, so the two buckets
        compose.
        """
        X = _grid(x_max, step)
        samples = np.zeros(len(X), dtype=complex)
        cumint = np.zeros(len(X), dtype=complex)
        simpson_bucket = np.zeros(len(X), dtype=complex)
        ok = True
        for t in self.terms:
            vals = t.coeff * _sample_term(t, X)
            samples += vals
            if t.kind == "pow":
                cumint += t.coeff * _cumint_term(t, X)
            elif t.kind == "powq":
                m = _as_int_power(t.x_power)
                if m is not None and m >= 0:
                    cumint += t.coeff * _cumint_term(t, X)
                elif t.scale_index == 0 and t.x_power.real > -1.0:
                    cumint += t.coeff * _cumint_term_general(t, X)
                elif t.scale_index >= 1 and t.x_power.real > -1.0:
                    simpson_bucket += vals
                else:
                    ok = False
            elif t.kind == "qres":
                simpson_bucket += vals
            else:
                ok = False
        if not ok:
            return GridFunction(x_max=x_max, step=step, samples=samples)
        if np.any(simpson_bucket != 0):
            cumint = cumint + _cumulative_simpson(X, simpson_bucket)
        return GridFunction(x_max=x_max, step=step, samples=samples,
                            exact_cumint=cumint)


def _eval_term(t: Term, x: float) -> complex:
    if t.kind == "pow":
        if x == 0:
            return 1.0 + 0j if t.x_power == 0 else 0j
        return cpow(x, t.x_power)
    if t.kind == "powq":
        q = qcheck_poly(t.scale_index)
        base = 1.0 + 0j if (x == 0 and t.x_power == 0) else \
            (0j if x == 0 else cpow(x, t.x_power))
        return base * q.eval_periodised(x)
    if t.kind == "qres":
        r = t.scale_index
        q = qcheck_poly(r + 1)
        if x == 0:
            return complex(qcheck_poly(r)(0.0))  # limit of the quotient
        return (q.eval_periodised(x) - float(q(0.0))) / ((r + 1) * x)
    if t.kind == "pint":
        if x == 0:
            return 0j
        return _integral_power_qcheck(t.x_power, t.scale_index, x) / x
    if t.kind == "pqres":
        r = t.scale_index
        if x == 0:
            return complex(qcheck_poly(r)(0.0))
        return _integral_qres(r, x) / x
    raise DomainError(f"unknown term kind {t.kind}")


def _sample_term(t: Term, X: np.ndarray) -> np.ndarray:
    if t.kind == "pow":
        out = np.zeros(len(X), dtype=complex)
        if t.x_power == 0:
            out[:] = 1.0
        else:
            out[1:] = np.exp(complex(t.x_power) * np.log(X[1:]))
            out[0] = 0.0
        return out
    if t.kind == "powq":
        q = qcheck_poly(t.scale_index)
        alpha = X - np.floor(X)
        qv = np.polyval([float(c) for c in reversed(q.coeffs)], alpha)
        out = np.zeros(len(X), dtype=complex)
        if t.x_power == 0:
            out[:] = qv
        else:
            out[1:] = np.exp(complex(t.x_power) * np.log(X[1:])) * qv[1:]
        return out
    # residual kinds are never realized on grids (they only appear in
    # symbolic images); evaluate pointwise as a fallback
    return np.array([_eval_term(t, float(x)) for x in X], dtype=complex)


def _cumint_term(t: Term, X: np.ndarray) -> np.ndarray:
    """Exact cumulative integral on the grid for integer-power terms."""
    if t.kind == "pow":
        d = t.x_power
        return np.exp((d + 1) * np.log(np.where(X > 0, X, 1.0))) \
            * (X > 0) / (d + 1) if d != -1 else np.log(np.where(X > 0, X, 1.0))
    if t.kind != "powq":
        raise DomainError("exact cumulative integral only for pow/powq terms")
    m = _as_int_power(t.x_power)
    r = t.scale_index
    if m is None or m < 0:
        raise DomainError("exact cumulative integral needs integer x-power >= 0")
    # int_0^X x^m qcheck_r dx by repeated integration by parts: emitted
    # boundary terms are exact; accumulate per-interval via the polynomial
    # antiderivative of (k+u)^m qcheck_r(u) on u in [0, 1).
    k = np.floor(X)
    u = X - k
    kmax = int(k[-1])
    # antiderivative coefficients of (k+u)^m * qcheck_r(u) in u, per k:
    # expand (k+u)^m = sum_i C(m,i) k^{m-i} u^i exactly.
    q = [float(c) for c in qcheck_poly(r).coeffs]  # ascending in u
    deg = len(q) - 1
    ks = np.arange(kmax + 1, dtype=float)
    # poly[i] (per k) = coefficient of u^i in the integrand
    poly = np.zeros((kmax + 1, m + deg + 1))
    for i in range(m + 1):
        ci = math.comb(m, i)
        kpow = ks ** (m - i)
        for a, qa in enumerate(q):
            poly[:, i + a] += ci * qa * kpow
    # unit-interval integrals and partial integrals
    powers = 1.0 / (np.arange(m + deg + 1) + 1.0)
    unit = poly @ powers
    cum_unit = np.concatenate(([0.0], np.cumsum(unit)))
    kk = k.astype(int)
    upow = np.ones(len(X))
    partial = np.zeros(len(X))
    for i in range(m + deg + 1):
        upow = upow * u
        partial += poly[kk, i] * powers[i] * upow
    return (cum_unit[kk] + partial).astype(complex)


def _cumint_term_general(t: Term, X: np.ndarray) -> np.ndarray:
    """Exact cumulative integral of X^delta qcheck_r for non-integer delta.

    On [k, k+1) the periodic factor is the shifted polynomial
    qcheck_r(x - k) = sum_m d_m(k) x^m, so every interval integral is a sum
    of plain power integrals.  The d_m(k) carry k**degree cancellation,
    which is why realize() caps the degree for this path.
    """
    d = complex(t.x_power)
    r = t.scale_index
    q = [float(c) for c in qcheck_poly(r).coeffs]
    deg = len(q) - 1
    kmax = int(math.floor(X[-1]))
    ks = np.arange(kmax + 1, dtype=float)
    # d_m(k) = sum_i q_i C(i, m) (-k)^{i-m}
    dm = np.zeros((kmax + 1, deg + 1))
    for i, qi in enumerate(q):
        for m in range(i + 1):
            dm[:, m] += qi * math.comb(i, m) * (-ks) ** (i - m)
    # antiderivative of x^{d+m}: x^{d+m+1}/(d+m+1); per-interval integrals
    def powint(x):
        # x^{d+m+1} for m = 0..deg, columns; x may contain 0 -> 0 (Re d > -1)
        out = np.zeros((len(x), deg + 1), dtype=complex)
        pos = x > 0
        lx = np.log(x[pos])
        for m in range(deg + 1):
            out[pos, m] = np.exp((d + m + 1) * lx) / (d + m + 1)
        return out

    edges = np.arange(kmax + 2, dtype=float)
    pe = powint(edges)
    unit = np.zeros(kmax + 1, dtype=complex)
    for m in range(deg + 1):
        unit += dm[:, m] * (pe[1:, m] - pe[:-1, m])
    cum_unit = np.concatenate(([0j], np.cumsum(unit)))
    kk = np.floor(X).astype(int)
    px = powint(X)
    partial = np.zeros(len(X), dtype=complex)
    for m in range(deg + 1):
        partial += dm[kk, m] * (px[:, m] - pe[kk, m])
    return cum_unit[kk] + partial


# -- exact-ish residual integrals -------------------------------------------

def _poly_shift_coeffs(r: int):
    return [float(c) for c in qcheck_poly(r).coeffs]


def _integral_power_qcheck(delta: complex, r: int, x: float,
                           subtract: float = 0.0) -> complex:
    """int_0^x t^delta (qcheck_r(t) - subtract) dt for -1 < Re delta <= 0.

    First (possibly partial) unit interval: exact monomial integrals.
    Later intervals: expand t^delta binomially about the interval midpoint
    (ratio <= 1/3, ~40 terms reach full precision), then integrate the
    polynomial exactly.
    """
    if not (-1.0 < delta.real <= 0.0):
        raise DomainError("interval integrator expects -1 < Re delta <= 0")
    q = _poly_shift_coeffs(r)
    if subtract:
        q = [q[0] - subtract] + q[1:]
    total = 0j
    k_top = math.floor(x)
    top0 = min(x, 1.0)
    # [0, top0]: sum_i q_i x^{delta+i+1}/(delta+i+1)
    for i, qi in enumerate(q):
        total += qi * cpow(top0, delta + i + 1) / (delta + i + 1)
    if x <= 1.0:
        return total
    for k in range(1, k_top + 1):
        b = min(x, float(k + 1))
        if b <= k:
            break
        total += _interval_integral(delta, q, float(k), b)
    return total


def _interval_integral(delta: complex, qcoeffs, a: float, b: float) -> complex:
    """int_a^b t^delta q(t - floor(t)) dt on a within-interval span
    [a, b] c [k, k+1], via the midpoint binomial expansion of t^delta."""
    k = math.floor(a)
    c0 = 0.5 * (a + b)
    half = 0.5 * (b - a)
    if half == 0:
        return 0j
    # t^delta = c0^delta sum_m C(delta, m) (v/c0)^m, v = t - c0, |v/c0| < 1/2k
    base = cpow(c0, delta)
    # q(t-k) as a polynomial in v: shift by (c0 - k)
    s = c0 - k
    deg = len(qcoeffs) - 1
    qv = [0.0] * (deg + 1)
    for i, qi in enumerate(qcoeffs):
        for m in range(i + 1):
            qv[m] += qi * math.comb(i, m) * s ** (i - m)
    total = 0j
    cm = 1.0 + 0j
    for m in range(0, 48):
        # int_{-h}^{h} v^{m+i} dv
        inner = 0j
        for i, qi in enumerate(qv):
            p = m + i
            if p % 2 == 0:
                inner += qi * 2.0 * half ** (p + 1) / (p + 1)
        contrib = cm * inner / c0 ** m
        total += contrib
        if m > 4 and abs(contrib) < 1e-17 * max(1.0, abs(total)):
            break
        cm *= (delta - m) / (m + 1)
    return base * total


def _integral_qres(r: int, x: float) -> complex:
    """int_0^x (qcheck_{r+1}(t) - qcheck_{r+1}(0)) / ((r+1) t) dt."""
    q = _poly_shift_coeffs(r + 1)
    c0 = q[0]
    total = 0j
    top0 = min(x, 1.0)
    for i, qi in enumerate(q):
        if i == 0:
            continue
        total += qi * top0 ** i / i
    if x > 1.0:
        k_top = math.floor(x)
        for k in range(1, k_top + 1):
            b = min(x, float(k + 1))
            if b <= k:
                break
            total += _interval_integral(-1.0 + 0j, [q[0] - c0] + q[1:], float(k), b)
    return total / (r + 1)


def apply_P_symbolic(ts: TermSum) -> TermSum:
    """Exact image of a TermSum under one application of P (z0 = 0).

    Constants are fixed points; X^delta is an eigenfunction with eigenvalue
    1/(delta+1); X^delta qcheck_r reduces by the integration-by-parts
    recursion until the deferred application acts at Re(x_power) <= 0,
    where it is emitted as an explicit residual term with a closed-form
    evaluator.  Residual terms accept one more P (-> "pqres"); beyond that
    depth the symbolic algebra does not close and the numeric realisation
    takes over.
    """
    out = []
    for t in ts:
        if t.kind == "pow":
            d = t.x_power
            if d.real <= -1.0:
                raise DomainError("P of X^delta needs Re(delta) > -1")
            out.append(Term("pow", t.coeff / (d + 1), d))
        elif t.kind == "powq":
            d = t.x_power
            r = t.scale_index
            if d == 0:
                out.append(Term("qres", t.coeff, 0j, r))
                continue
            if d.real <= -1.0:
                raise DomainError("P of X^delta qcheck needs Re(delta) > -1")
            if d.real <= 0.0:
                out.append(Term("pint", t.coeff, d, r))
                continue
            c = t.coeff
            m = 0
            while d.real > 0.0:
                # P[X^d q_r] = X^{d-1} q_{r+1}/(r+1) - d/(r+1) P[X^{d-1} q_{r+1}]
                out.append(Term("powq", c / (r + 1), d - 1, r + 1))
                c = -c * d / (r + 1)
                d = d - 1
                r += 1
                m += 1
                if m > 64:
                    raise DomainError("recursion depth exceeded")
                if d == 0:
                    out.append(Term("qres", c, 0j, r))
                    c = 0
                    break
            if c != 0:
                out.append(Term("pint", c, d, r))
        elif t.kind == "qres":
            out.append(Term("pqres", t.coeff, 0j, t.scale_index))
        else:
            raise DomainError(
                f"P of a {t.kind!r} residual does not close symbolically; "
                "use the numeric realisation")
    return TermSum(tuple(out))


# ---------------------------------------------------------------------------
# numeric realisation
# ---------------------------------------------------------------------------

def _grid(x_max: float, step: float) -> np.ndarray:
    n = int(round(x_max / step))
    return np.arange(n + 1) * step


def _check_step(step: float):
    m = math.log2(1.0 / step)
    if abs(m - round(m)) > 1e-9:
        raise DomainError("grid step must be 1/2**m so unit breakpoints are "
                          "grid (and Simpson-pair) nodes")


@dataclass
class GridFunction:
    """Samples of f on {0, step, 2*step, ..., x_max}.

    ``exact_cumint`` optionally carries int_0^{X_i} f exactly (mandatory
    accuracy device for step functions, where any quadrature rule sees the
    jump); ``z0`` shifts the averaging denominator to z = z0 + X for the
    remainder setting.
    """
    x_max: float
    step: float
    samples: np.ndarray
    exact_cumint: np.ndarray | None = None
    z0: complex = 0j

    def __post_init__(self):
        _check_step(self.step)
        self.samples = np.asarray(self.samples, dtype=complex)
        if len(self.samples) != int(round(self.x_max / self.step)) + 1:
            raise DomainError("sample count does not match x_max/step")
        if not np.all(np.isfinite(self.samples)):
            raise DomainError("non-finite samples")

    @property
    def X(self) -> np.ndarray:
        return _grid(self.x_max, self.step)

    def value_at(self, x: float) -> complex:
        i = int(round(x / self.step))
        return complex(self.samples[i])


def _cumulative_simpson(X: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Cumulative integral; Simpson over even-index pairs, cubic-consistent
    half-rule for odd nodes."""
    h = X[1] - X[0]
    F = np.zeros(len(f), dtype=complex)
    inc = h / 3 * (f[:-2:2] + 4 * f[1:-1:2] + f[2::2])
    F[2::2] = np.cumsum(inc)
    F[1::2] = F[:-1:2] + h * (5 * f[:-1:2] + 8 * f[1::2] - f[2::2]) / 12
    return F


def apply_P_numeric(f: GridFunction, repetitions: int = 1) -> GridFunction:
    """P^repetitions on grid samples.

    The first pass consumes ``exact_cumint`` when present (exact for step
    functions); later passes use cumulative Simpson, which is exact for
    cubics and never straddles a unit breakpoint because step = 1/2**m.
    The X = 0 sample holds the limiting value P[f](0+) = f(0).
    """
    if repetitions < 1:
        raise DomainError("repetitions must be >= 1")
    X = f.X
    cur = f.samples
    cumint = f.exact_cumint
    for i in range(repetitions):
        F = cumint if (i == 0 and cumint is not None) \
            else _cumulative_simpson(X, cur)
        nxt = np.empty(len(cur), dtype=complex)
        den = f.z0 + X
        if f.z0 == 0:
            nxt[1:] = F[1:] / X[1:]
            nxt[0] = cur[0]
        else:
            nxt = F / den
        if not np.all(np.isfinite(nxt)):
            raise DomainError("non-finite samples produced by P")
        cur = nxt
    return GridFunction(x_max=f.x_max, step=f.step, samples=cur, z0=f.z0)


# ---------------------------------------------------------------------------
# operator polynomials
# ---------------------------------------------------------------------------

class OperatorPolynomial:
    """scalar * prod (P - c_i) * P^power, with exact expansion on demand."""

    def __init__(self, factors=(), power: int = 0, scalar=1.0):
        self.factors = tuple(complex(c) if not isinstance(c, Fraction) else c
                             for c in factors)
        self.power = int(power)
        self.scalar = scalar if isinstance(scalar, Fraction) else complex(scalar)
        if self.power < 0:
            raise DomainError("negative P powers do not exist")

    # -- algebra -------------------------------------------------------------
    @classmethod
    def identity(cls):
        return cls()

    @classmethod
    def pure_power(cls, m: int):
        return cls(power=m)

    def __mul__(self, other):
        if isinstance(other, OperatorPolynomial):
            return OperatorPolynomial(self.factors + other.factors,
                                      self.power + other.power,
                                      _mul_scalar(self.scalar, other.scalar))
        return OperatorPolynomial(self.factors, self.power,
                                  _mul_scalar(self.scalar, other))

    @property
    def degree(self) -> int:
        return len(self.factors) + self.power

    def coefficients(self):
        """Expanded coefficients c_m of P^m, index ascending from P^power."""
        coeffs = [1.0 + 0j]
        for c in self.factors:
            c = complex(c)
            nxt = [0j] * (len(coeffs) + 1)
            for i, v in enumerate(coeffs):
                nxt[i] += -c * v
                nxt[i + 1] += v
            coeffs = nxt
        s = complex(self.scalar)
        return [s * v for v in coeffs]

    def evaluate_at(self, p) -> complex:
        total = complex(self.scalar) * complex(p) ** self.power
        for c in self.factors:
            total *= (complex(p) - complex(c))
        return total

    @property
    def is_regular(self) -> bool:
        return abs(self.evaluate_at(1.0) - 1.0) < 1e-12

    def __repr__(self):
        fs = " ".join(f"(P - {c})" for c in self.factors)
        return f"OperatorPolynomial({self.scalar} * {fs} * P^{self.power})"

    # -- application ----------------------------------------------------------
    def apply_to_grid(self, f: GridFunction) -> GridFunction:
        coeffs = self.coefficients()
        images = [f]
        for _ in range(self.degree):
            images.append(apply_P_numeric(images[-1], 1))
        out = np.zeros(len(f.samples), dtype=complex)
        for m, c in enumerate(coeffs):
            if c != 0:
                out += c * images[self.power + m].samples
        return GridFunction(x_max=f.x_max, step=f.step, samples=out, z0=f.z0)

    def apply_symbolic(self, ts: TermSum) -> TermSum:
        coeffs = self.coefficients()
        images = [ts]
        for _ in range(self.degree):
            images.append(apply_P_symbolic(images[-1]))
        total = TermSum()
        for m, c in enumerate(coeffs):
            if c != 0:
                total = total + images[self.power + m].scale(c)
        return total


def _mul_scalar(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return complex(a) * complex(b)


def regular_poly(delta_or_s, mode: str) -> OperatorPolynomial:
    """The closed-form regular polynomials attached to the two theorems.

    mode "theorem1" (parameter delta != 0): the eigen-annihilator of X^delta,
        ((delta+1)/delta) (P - 1/(delta+1)).
    mode "theorem2" (parameter s, s != 1): the p-sum summation polynomial
        ((2-s)/(1-s)) (P - 1/(2-s)) P^(floor(Re(-s)) + 1).

    Both evaluate to 1 at P = 1 (regular), so they preserve every classical
    limit while annihilating the divergent scaffolding.
    """
    v = complex(delta_or_s)
    if mode == "theorem1":
        if v == 0:
            raise DomainError("theorem1 polynomial degenerates at delta = 0 "
                              "(nothing to annihilate)")
        return OperatorPolynomial(factors=(1.0 / (v + 1),),
                                  scalar=(v + 1) / v)
    if mode == "theorem2":
        if v == 1:
            raise PoleError("s = 1 is the zeta pole; log-divergent p-sum",
                            location=1)
        if v == 2:
            raise DomainError("s = 2 degenerates the (P - 1/(2-s)) factor")
        power = max(0, math.floor(-v.real) + 1)
        return OperatorPolynomial(factors=(1.0 / (2 - v),),
                                  scalar=(2 - v) / (1 - v),
                                  power=power)
    raise DomainError(f"unknown mode {mode!r}")


def discrete_power_operator(n: int) -> OperatorPolynomial:
    """Annihilator product for the discrete k^n case: factors
    (m/(m-1))(P - 1/m) for m = 2..n+1, times the smoothing power P^{n+1}.

    The per-term construction follows the stand-alone powers X^n..X^1 that
    the expansion of k^n produces; the X^0 term carries the limit and gets
    no factor.
    """
    op = OperatorPolynomial.pure_power(n + 1)
    for m in range(2, n + 2):
        op = op * OperatorPolynomial(factors=(Fraction(1, m),),
                                     scalar=Fraction(m, m - 1))
    return op


# ---------------------------------------------------------------------------
# limit extraction
# ---------------------------------------------------------------------------

DEFAULT_STEP = 1.0 / 128
DEFAULT_XMAX = 2000.0


def _fit_basis_columns(xs: np.ndarray, z0: complex, spec):
    cols = [np.ones(len(xs), dtype=complex)]
    zs = z0 + xs
    for e in spec:
        if e == "log0":
            cols.append(1.0 / zs)
        elif isinstance(e, str) and e.startswith("log"):
            a = int(e[3:])
            cols.append(np.log(zs) ** a / zs)
        else:
            cols.append(zs ** complex(e))
    return cols


def _integer_sample_indices(gf: GridFunction, pts) -> list[int]:
    """Snap sample abscissae to integers: the transformed residuals carry a
    period-1 oscillatory factor, and only same-phase samples let the fit
    fold it into a constant basis coefficient."""
    out = []
    for p in pts:
        x = max(1.0, round(p))
        out.append(min(int(round(x / gf.step)), len(gf.samples) - 1))
    return out


def fit_limit(gf: GridFunction, basis) -> tuple[complex, float]:
    """Solve a + sum c_i b_i(X) through samples at integer points near
    x_max/2^i; returns (a, error estimate = sum |c_i b_i(x_max)|)."""
    n_par = len(basis) + 1
    idx = _integer_sample_indices(
        gf, [gf.x_max / 2 ** i for i in range(n_par - 1, -1, -1)])
    xs = gf.X[idx]
    ys = gf.samples[idx]
    cols = _fit_basis_columns(xs, gf.z0, basis)
    A = np.vstack(cols).T
    sol = np.linalg.solve(A, ys)
    tail_cols = _fit_basis_columns(np.array([gf.x_max]), gf.z0, basis)
    est = float(sum(abs(sol[1 + i]) * abs(tail_cols[1 + i][0])
                    for i in range(len(basis))))
    return complex(sol[0]), est


def cesaro_limit(f, op: OperatorPolynomial, x_max: float = DEFAULT_XMAX,
                 step: float = DEFAULT_STEP, fit_basis=None,
                 stability_tol: float = 0.05, z0=0j):
    """Generalised limit of f under the regular polynomial ``op``.

    ``f`` is a TermSum (realised on the grid; stand-alone X^delta powers the
    operator cannot annihilate raise NoLimitError) or a GridFunction.  The
    transformed samples are fit against {1} + ``fit_basis``; the default
    basis is the ln^a(z)/z family with a up to the operator degree - 1,
    which is the exact residual structure repeated averaging produces from
    the boundary constants of the periodic antiderivatives.

    ``z0`` puts a TermSum into the remainder setting (averaging divides by
    z = z0 + X); a GridFunction carries its own z0.

    Returns (limit, error_estimate).  A refit at shifted sample points must
    agree to ``stability_tol`` or NoLimitError is raised.
    """
    if not op.is_regular:
        raise DomainError("operator polynomial is not regular (q(1) != 1)")
    if isinstance(f, TermSum):
        pure, _osc = f.split_standalone()
        for t in pure:
            d = t.x_power
            if d != 0 and abs(op.evaluate_at(1.0 / (d + 1))) > 1e-10:
                raise NoLimitError(
                    f"operator does not annihilate the stand-alone X^{d} term")
        gf = f.realize(x_max, step)
        gf.z0 = complex(z0)
    elif isinstance(f, GridFunction):
        gf = f
    else:
        raise DomainError("f must be a TermSum or GridFunction")
    g = op.apply_to_grid(gf)
    if fit_basis is None:
        n_log = min(max(op.degree - 1, 0), 4)
        fit_basis = [f"log{a}" for a in range(n_log + 1)]
    a, est = fit_limit(g, fit_basis)
    # stability probe: same basis, integer samples at 3/4 the spacing
    n_par = len(fit_basis) + 1
    idx = _integer_sample_indices(
        g, [g.x_max * 0.75 / 2 ** i for i in range(n_par - 1, -1, -1)])
    xs = g.X[idx]
    ys = g.samples[idx]
    cols = _fit_basis_columns(xs, g.z0, fit_basis)
    a2 = complex(np.linalg.solve(np.vstack(cols).T, ys)[0])
    drift = abs(a - a2)
    if drift > stability_tol * max(1.0, abs(a)):
        raise NoLimitError(f"limit fit unstable: {a} vs {a2}")
    return a, max(est, drift)


# ---------------------------------------------------------------------------
# the exact operator identities
# ---------------------------------------------------------------------------

def _poly_mul_frac(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def operator_identity_check(n: int):
    """sum_{j=0}^n (P-1)(P-1/2)...(P-1/(n-j)) P^j
       = (n+1)(P-1/2)(P-1/3)...(P-1/(n+1)),  exactly in Q[P].

    Returns (equal, lhs_coeffs, rhs_coeffs, witness); witness names the
    first differing power on failure, else None.
    """
    if not 0 <= n <= 64:
        raise DomainError("n out of range")
    lhs = [Fraction(0)] * (n + 1)
    for j in range(n + 1):
        poly = [Fraction(1)]
        for i in range(1, n - j + 1):
            poly = _poly_mul_frac(poly, [Fraction(-1, i), Fraction(1)])
        poly = [Fraction(0)] * j + poly  # times P^j
        for m, c in enumerate(poly):
            lhs[m] += c
    rhs = [Fraction(n + 1)]
    for i in range(2, n + 2):
        rhs = _poly_mul_frac(rhs, [Fraction(-1, i), Fraction(1)])
    rhs += [Fraction(0)] * (len(lhs) - len(rhs))
    witness = None
    for m, (a, b) in enumerate(zip(lhs, rhs)):
        if a != b:
            witness = (m, a, b)
            break
    return witness is None, lhs, rhs, witness


def pn_identity_numeric(n: int, r: int, x_points=(10.25, 25.5, 50.75),
                        step: float = 1.0 / 256, tol: float = 1e-5) -> float:
    """max |LHS - RHS| of  P^n[X^n qcheck_r] =
    ((-1)^n / C(r+n, n)) (P-1)(P-1/2)...(P-1/n) [qcheck_{r+n}].

    Both sides run through the numeric realisation on a shared grid; a
    deviation above ``tol`` that halves with the step is a resolution
    problem and raises GridResolutionError with a suggested step.
    """
    if n < 0 or r < 0:
        raise DomainError("n, r must be >= 0")
    x_max = max(x_points) + 2.0

    def deviation(h: float) -> float:
        lhs_ts = TermSum.x_power_qcheck(complex(n), r)
        lhs_g = lhs_ts.realize(x_max, h)
        if n > 0:
            lhs_g = apply_P_numeric(lhs_g, n)
        rhs_ts = TermSum.x_power_qcheck(0j, r + n)
        rhs_g = rhs_ts.realize(x_max, h)
        op = OperatorPolynomial(factors=tuple(1.0 / i for i in range(1, n + 1)),
                                scalar=(-1.0) ** (n % 2) / binom(r + n, n).real)
        rhs_g = op.apply_to_grid(rhs_g)
        return max(abs(lhs_g.value_at(x) - rhs_g.value_at(x)) for x in x_points)

    dev = deviation(step)
    if dev > tol:
        dev_half = deviation(step / 2)
        if dev_half < 0.5 * dev:
            raise GridResolutionError(
                f"deviation {dev:.2e} is resolution-limited",
                suggested_step=step / 4)
        return dev
    return dev


def xq_identity_numeric(n: int, x_points=(10.25, 25.5, 50.75),
                        step: float = 1.0 / 256) -> float:
    """max |LHS - RHS| of  P^n[(X - qcheck)^n] =
    (-1)^n (n+1)(P-1/2)...(P-1/(n+1)) [qcheck_n]."""
    if n < 0:
        raise DomainError("n must be >= 0")
    x_max = max(x_points) + 2.0
    lhs_g = TermSum.x_minus_qcheck_power(n).realize(x_max, step)
    if n > 0:
        lhs_g = apply_P_numeric(lhs_g, n)
    rhs_g = TermSum.x_power_qcheck(0j, n).realize(x_max, step)
    op = OperatorPolynomial(factors=tuple(1.0 / i for i in range(2, n + 2)),
                            scalar=(-1.0) ** (n % 2) * (n + 1))
    rhs_g = op.apply_to_grid(rhs_g)
    return max(abs(lhs_g.value_at(x) - rhs_g.value_at(x)) for x in x_points)
