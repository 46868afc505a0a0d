"""Exact rational construction of the Cesaro-adapted scales.

Three normalisations of the periodised Bernoulli polynomials are built by
iterated antidifferentiation with zero-mean integration constants:

* ``q_n``      (n >= 1): q_1 = a - 1/2, each next an antiderivative with
  integral 0 over [0, 1]; derivative chain q_{n+1}' = q_n.
* ``qtilde_n`` (n >= 1): (n-1)! q_n; chain qtilde_{n+1}' = n qtilde_n.
* ``qcheck_n`` (n >= 0): qtilde_{n+1}; chain qcheck_{n+1}' = (n+1) qcheck_n.

Everything here is exact over Fractions; floats only appear when a
polynomial is evaluated at a float/complex point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError

Rational = Fraction


class RationalPolynomial:
    """Polynomial over Q, coefficients ascending in the variable.

    Canonical form: no trailing zero coefficient (the zero polynomial keeps
    a single 0 entry).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [Fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        self.coeffs = tuple(cs)

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return RationalPolynomial(
            [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
             for i in range(n)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "RationalPolynomial":
        c = Fraction(c)
        return RationalPolynomial([ci * c for ci in self.coeffs])

    def __mul__(self, other):
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return RationalPolynomial(out)

    def __eq__(self, other):
        return isinstance(other, RationalPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RationalPolynomial({list(self.coeffs)})"

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    # -- calculus ----------------------------------------------------------
    def derivative(self) -> "RationalPolynomial":
        if len(self.coeffs) == 1:
            return RationalPolynomial([0])
        return RationalPolynomial(
            [i * c for i, c in enumerate(self.coeffs)][1:])

    def antiderivative(self, constant=0) -> "RationalPolynomial":
        return RationalPolynomial(
            [Fraction(constant)] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def integral_01(self) -> Fraction:
        return sum((c / (i + 1) for i, c in enumerate(self.coeffs)), Fraction(0))

    # -- evaluation --------------------------------------------------------
    def eval_exact(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __call__(self, x):
        """Horner evaluation; exact for Fraction input, float/complex else."""
        if isinstance(x, Fraction) or isinstance(x, int):
            return self.eval_exact(x)
        acc = 0.0 if not isinstance(x, complex) else 0j
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def eval_periodised(self, x: float):
        """Evaluate the period-1 extension at real x: reduce to a = x - floor(x).

        At exact integers this gives the a = 0 (right-limit) value, which is
        the convention the tau-series produces.
        """
        a = x - math.floor(x)
        return self(a)

    def to_json(self):
        """Degree-ascending array of "num/den" strings."""
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @classmethod
    def from_json(cls, data):
        return cls([Fraction(s) for s in data])


@lru_cache(maxsize=None)
def _bernoulli_upto(n_max: int):
    # B_0 = 1 and sum_{j<n} C(n, j) B_j = 0 for n >= 2, i.e. the binomial
    # recursion (1+B)^n = B^n read with B^j := B_j.
    B = [Fraction(1)]
    for n in range(1, n_max + 1):
        s = Fraction(0)
        for j in range(n):
            s += math.comb(n + 1, j) * B[j]
        B.append(-s / (n + 1))
    return tuple(B)


def bernoulli_numbers(n_max: int):
    """B_0..B_{n_max} as exact Fractions (B_1 = -1/2 convention)."""
    if n_max < 0:
        raise DomainError("bernoulli_numbers: n_max must be >= 0")
    return list(_bernoulli_upto(n_max))


def bernoulli_poly(n: int) -> RationalPolynomial:
    """B_n(x) = sum_j C(n, j) B_j x^{n-j}, monic, B_n(0) = B_n = B_n(1)."""
    if n < 0:
        raise DomainError("bernoulli_poly: n must be >= 0")
    B = _bernoulli_upto(n)
    coeffs = [Fraction(0)] * (n + 1)
    for j in range(n + 1):
        coeffs[n - j] += math.comb(n, j) * B[j]
    return RationalPolynomial(coeffs)


class ScaleFamily:
    """A Cesaro-adapted family: members plus the derivative-chain constants.

    ``kind`` is one of "q", "q-tilde", "q-check", "bernoulli-periodised";
    ``start`` the natural first index (q, q-tilde: 1; q-check, B: 0);
    ``members[i]`` is the polynomial of index start + i.
    """

    def __init__(self, kind: str, start: int, members):
        self.kind = kind
        self.start = start
        self.members = list(members)

    def member(self, n: int) -> RationalPolynomial:
        i = n - self.start
        if i < 0 or i >= len(self.members):
            raise DomainError(f"{self.kind} family has no member {n}")
        return self.members[i]

    def chain_constant(self, n: int) -> Fraction:
        """c_n in d/da member_{n+1} = c_n member_n."""
        if self.kind == "q":
            return Fraction(1)
        if self.kind == "q-tilde":
            return Fraction(n)
        return Fraction(n + 1)  # q-check and bernoulli-periodised

    def __len__(self):
        return len(self.members)


@lru_cache(maxsize=None)
def _q_members(n_max: int):
    qs = [RationalPolynomial([Fraction(-1, 2), Fraction(1)])]  # q_1 = a - 1/2
    for _ in range(1, n_max):
        anti = qs[-1].antiderivative()
        qs.append(anti + RationalPolynomial([-anti.integral_01()]))
    return tuple(qs)


def build_scale(kind: str, n_max: int) -> ScaleFamily:
    """Construct members of the requested normalisation up to index n_max."""
    if kind == "q":
        if n_max < 1:
            raise DomainError("q family starts at 1")
        return ScaleFamily("q", 1, _q_members(n_max))
    if kind == "q-tilde":
        if n_max < 1:
            raise DomainError("q-tilde family starts at 1")
        qs = _q_members(n_max)
        return ScaleFamily(
            "q-tilde", 1,
            [q.scale(math.factorial(n - 1)) for n, q in enumerate(qs, start=1)])
    if kind == "q-check":
        if n_max < 0:
            raise DomainError("q-check family starts at 0")
        qs = _q_members(n_max + 1)
        return ScaleFamily(
            "q-check", 0,
            [qs[n].scale(math.factorial(n)) for n in range(1, n_max + 2)])
    if kind == "bernoulli-periodised":
        if n_max < 0:
            raise DomainError("bernoulli family starts at 0")
        return ScaleFamily("bernoulli-periodised", 0,
                           [bernoulli_poly(n) for n in range(n_max + 1)])
    raise DomainError(f"unknown scale kind: {kind}")


@lru_cache(maxsize=None)
def qcheck_poly(n: int) -> RationalPolynomial:
    """qcheck_n = (the n-th member of the q-check scale), degree n + 1."""
    if n < 0:
        raise DomainError("qcheck_poly: n must be >= 0 (negative index is "
                          "distributional, not polynomial)")
    return _q_members(n + 1)[n].scale(math.factorial(n))


def qcheck_at_half(n: int) -> Fraction:
    """Exact qcheck_n(1/2); up to sign these are the theta(T) coefficients."""
    return qcheck_poly(n).eval_exact(Fraction(1, 2))


def qcheck_value_at_zero(n: int) -> Fraction:
    return qcheck_poly(n).eval_exact(0)


def sum_powers_poly(n: int) -> RationalPolynomial:
    """b_n(k) = sum_{j=1}^{k} j^{n-1} as an exact polynomial in k.

    Built from the Faulhaber form (B_n(k+1) - B_n(0))/n with x -> k.
    """
    if n < 1:
        raise DomainError("sum_powers_poly: n must be >= 1")
    bp = bernoulli_poly(n)
    # substitute x = k + 1
    shifted = [Fraction(0)] * (bp.degree + 1)
    for i, c in enumerate(bp.coeffs):
        for j in range(i + 1):
            shifted[j] += c * math.comb(i, j)
    shifted[0] -= bp.coeffs[0]
    return RationalPolynomial(shifted).scale(Fraction(1, n))


def alpha_power_in_qcheck_basis(r: int):
    """Write a^r = c_0 + sum_m c_m qcheck_m exactly.

    Returns (constant, {m: coefficient}).  Used to split any polynomial in
    the fractional part into its mean plus zero-mean oscillation.
    """
    rem = [Fraction(0)] * (r + 1)
    rem[r] = Fraction(1)
    out = {}
    for m in range(r - 1, -1, -1):
        lead = rem[m + 1] * (m + 1)
        if lead != 0:
            out[m] = lead
            qc = qcheck_poly(m)
            for i, ci in enumerate(qc.coeffs):
                if i <= r:
                    rem[i] -= lead * ci
        rem = rem[: r + 1]
    return rem[0], out
