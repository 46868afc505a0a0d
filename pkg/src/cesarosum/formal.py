"""Formal tau-symbol series with deferred, limit-based evaluation.

The symbol tau carries the rule ``tau**w -> zeta(-w)`` (and
``tau**w * ln(tau) -> -zeta'(-w)``), but no evaluation happens until a whole
expression has been combined algebraically.  Series terms live inside a
continuous "coefficient fabric": term j of an expansion is embedded at index
j + eps, every ingredient is expanded as a Laurent series in eps (orders
-2..+2), and final evaluation takes the eps^0 coefficient after verifying
that all pole orders cancel.

Three behaviours from this calculus drive the design:

* two-sided expansions: indices j < 0 are materialised even when their
  stand-alone value is zero, because a later product can revive them
  against a pole;
* a singular coefficient (binomial zero against a zeta pole) resolves to a
  finite limit through the fabric;
* products combine exponent shifts, so the subject variable picks up
  ``alpha**(p + sigma*eps)`` factors whose expansion contributes
  ``ln(alpha)`` terms against surviving poles.

The eps-resolution here is analytic (Stieltjes constants, digamma /
trigamma expansions); the numeric eps -> 0 limit exists only as a test
oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import (
    DomainError,
    LaurentOrderError,
    PoleError,
    RangeTruncationError,
    UncancelledSingularityError,
)
from . import special
from .special import EULER_GAMMA, STIELTJES, cpow, digamma, gamma, trigamma, zeta_jet
from .scale import qcheck_poly

_MAX_ORDER = 2
_MIN_ORDER = -2


class EpsLaurent:
    """Laurent polynomial in eps with integer orders -2..+2.

    Orders below -2 raise: a double pole meeting another pole never occurs
    in any computation in scope, so reaching one is a bug, not a feature.
    Orders above +2 produced by multiplication are dropped; they cannot
    reach eps^0 again because of the -2 cap.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        c = {}
        for k, v in (coeffs or {}).items():
            if k < _MIN_ORDER or k > _MAX_ORDER:
                raise LaurentOrderError(f"eps order {k} outside [-2, 2]")
            if v != 0:
                c[k] = complex(v)
        self.c = c

    @classmethod
    def const(cls, v):
        return cls({0: v})

    def __add__(self, other):
        c = dict(self.c)
        for k, v in other.c.items():
            c[k] = c.get(k, 0j) + v
        return EpsLaurent(c)

    def __mul__(self, other):
        c = {}
        for k1, v1 in self.c.items():
            for k2, v2 in other.c.items():
                k = k1 + k2
                if k > _MAX_ORDER:
                    continue
                if k < _MIN_ORDER:
                    raise LaurentOrderError(
                        f"eps product underflows order {k}; no computation in "
                        "scope needs more than a double pole")
                c[k] = c.get(k, 0j) + v1 * v2
        return EpsLaurent(c)

    def order0(self) -> complex:
        return self.c.get(0, 0j)

    def pole_part(self):
        return {k: v for k, v in self.c.items() if k < 0}

    def scale_hint(self) -> float:
        return max([abs(v) for v in self.c.values()], default=0.0)

    def orders_json(self):
        return {str(k): [v.real, v.imag] for k, v in sorted(self.c.items())}

    def __repr__(self):
        return "EpsLaurent(%s)" % {k: self.c[k] for k in sorted(self.c)}


# ---------------------------------------------------------------------------
# fabric atoms
# ---------------------------------------------------------------------------

def _is_int(z: complex, tol: float = 1e-12) -> bool:
    return abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


def _is_nonpos_int(a) -> bool:
    a = complex(a)
    return _is_int(a) and round(a.real) <= 0


def recip_gamma_eps(a, c: float) -> EpsLaurent:
    """1/Gamma(a + c*eps) expanded to eps^2 (entire, so never a pole).

    At a non-positive integer -m the reciprocal has a first-order zero:
    1/Gamma(-m + d) = d (d-1)...(d-m) / Gamma(1+d) with d = c*eps, expanded
    exactly; elsewhere the digamma/trigamma Taylor expansion applies.
    """
    a = complex(a)
    if _is_nonpos_int(a):
        m = int(-round(a.real))
        poly = [0j, complex(c), 0j]  # d
        for k in range(1, m + 1):
            nxt = [0j, 0j, 0j]
            for i, v in enumerate(poly):
                nxt[i] += v * (-k)
                if i + 1 <= 2:
                    nxt[i + 1] += v * c
            poly = nxt
        g = EULER_GAMMA
        inv = (1.0 + 0j, g * c, (g * g / 2 - math.pi ** 2 / 12) * c * c)
        out = [0j, 0j, 0j]
        for i in range(3):
            for j in range(3):
                if i + j <= 2:
                    out[i + j] += poly[i] * inv[j]
        return EpsLaurent({i: out[i] for i in range(3)})
    p0 = digamma(a)
    p1 = trigamma(a)
    ig = 1.0 / gamma(a)
    return EpsLaurent({0: ig, 1: -ig * p0 * c, 2: ig * (p0 * p0 - p1) / 2 * c * c})


def binom_eps(rho, j: int) -> EpsLaurent:
    """C(rho, j + eps) to eps^2.  rho must not be a negative integer
    (that puts a bare pole in the numerator with nothing to vary)."""
    rho = complex(rho)
    if _is_nonpos_int(rho + 1):
        raise DomainError("binom_eps: rho in Z_{<0} leaves Gamma(rho+1) "
                          "singular with no fabric to resolve it")
    return (recip_gamma_eps(j + 1, 1.0)
            * recip_gamma_eps(rho - j + 1, -1.0)
            * EpsLaurent.const(gamma(rho + 1)))


def phase_eps(base_exponent, shift: float) -> EpsLaurent:
    """exp(i pi (base_exponent + shift*eps)) to eps^2."""
    x = 1j * math.pi * shift
    ph = cmath.exp(1j * math.pi * complex(base_exponent))
    return EpsLaurent({0: ph, 1: ph * x, 2: ph * x * x / 2})


def tau_atom(w, shift: float, log_exponent: int) -> EpsLaurent:
    """tau^(w + shift*eps) (ln tau)^L as an eps-Laurent series.

    Evaluation rules: tau^v = zeta(-v) and tau^v ln(tau) = -zeta'(-v).
    At the zeta pole (argument 1) the Stieltjes expansion supplies orders
    -1 (L = 0) or -2 (L = 1); regular points Taylor-expand through the
    Euler-Maclaurin jets.
    """
    a = -complex(w)
    c = -float(shift)  # zeta argument is -(w + shift*eps) = a + c*eps
    near_pole = abs(a - 1.0) < 1e-12
    if log_exponent == 0:
        if near_pole:
            if c == 0:
                raise PoleError("bare tau^{-1} with no fabric shift", location=1)
            g0, g1, g2, _ = STIELTJES
            return EpsLaurent({-1: 1.0 / c, 0: g0, 1: -g1 * c, 2: g2 * c * c / 2})
        if c == 0:
            return EpsLaurent.const(zeta_jet(a, 0)[0])
        z = zeta_jet(a, 2)
        return EpsLaurent({0: z[0], 1: z[1] * c, 2: z[2] * c * c / 2})
    if log_exponent != 1:
        raise DomainError("log_tau_exponent above 1 is out of scope")
    if near_pole:
        if c == 0:
            raise PoleError("bare tau^{-1} ln tau with no fabric shift", location=1)
        _, g1, g2, g3 = STIELTJES
        return EpsLaurent({-2: 1.0 / (c * c), 0: g1, 1: -g2 * c, 2: g3 * c * c / 2})
    z = zeta_jet(a, 3)
    if c == 0:
        return EpsLaurent.const(-z[1])
    return EpsLaurent({0: -z[1], 1: -z[2] * c, 2: -z[3] * c * c / 2})


def subject_shift_atom(at_value, shift: float) -> EpsLaurent:
    """value^(shift*eps) = exp(shift*eps*ln value) to eps^2."""
    if shift == 0 or at_value == 0:
        return EpsLaurent.const(1.0)
    x = shift * cmath.log(complex(at_value))
    return EpsLaurent({0: 1.0, 1: x, 2: x * x / 2})


# ---------------------------------------------------------------------------
# series types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TauMonomial:
    """scalar * tau^(tau_power + tau_shift*eps) * (ln tau)^L
            * subject^(subject_power + subject_shift*eps)"""
    scalar: EpsLaurent
    tau_power: complex
    tau_shift: float
    log_tau_exponent: int
    subject_power: complex
    subject_shift: float

    def stand_alone_zero(self) -> bool:
        return self.scalar.order0() == 0 and not self.scalar.pole_part()


class TauSeries:
    """Two-sided formal series over explicit integer indices.

    ``terms`` maps the series index to a list of monomials (a pristine
    expansion has one monomial per index; products keep every (ja, jb)
    split separate so that stand-alone zeros stay visible).  ``subject``
    names the variable carrying the expansion (alpha, z or k).
    """

    def __init__(self, subject: str, terms=None, kind: str = "generic",
                 rho: complex = 0j):
        self.subject = subject
        self.terms: dict = {}
        for j, monos in (terms or {}).items():
            self.terms[j] = list(monos) if isinstance(monos, (list, tuple)) else [monos]
        self.kind = kind
        self.rho = complex(rho)

    def monomials(self):
        for monos in self.terms.values():
            yield from monos

    @property
    def j_min(self) -> int:
        return min(self.terms) if self.terms else 0

    @property
    def j_max(self) -> int:
        return max(self.terms) if self.terms else 0

    def dump_json(self):
        out = []
        for j in sorted(self.terms):
            for t in self.terms[j]:
                out.append({
                    "j": j,
                    "scalar_eps_orders": t.scalar.orders_json(),
                    "tau_power": [t.tau_power.real, t.tau_power.imag],
                    "tau_shift": t.tau_shift,
                    "log_exponent": t.log_tau_exponent,
                    "alpha_power": [complex(t.subject_power).real,
                                    complex(t.subject_power).imag],
                    "alpha_shift": t.subject_shift,
                })
        return {"subject": self.subject, "kind": self.kind,
                "rho": [self.rho.real, self.rho.imag], "terms": out}


_BINOMIAL_KINDS = ("alpha_minus_tau", "tau_minus_alpha", "z_plus_tau", "k_plus_tau")


def expand_binomial(kind: str, rho, j_min: int, j_max: int) -> TauSeries:
    """Materialise a two-sided binomial expansion, stand-alone zeros and all.

    ``kind`` selects the expansion (j is always the series index):

    * ``alpha_minus_tau``: (a - tau)^rho = sum_j e^{i pi (rho-j-eps)}
      C(rho, j+eps) tau^(rho-j-eps) a^(j+eps)            [subject: alpha]
    * ``tau_minus_alpha``: (tau - a)^rho = sum_j (-1)^j
      C(rho, j+eps) tau^(rho-j-eps) a^(j+eps)            [subject: alpha]
    * ``z_plus_tau``: (z + tau)^rho, Taylor in z: sum_j
      C(rho, j+eps) tau^(rho-j-eps) z^(j+eps)            [subject: z]
    * ``k_plus_tau``: (k + tau)^rho with the subject changed to k: sum_j
      C(rho, j+eps) tau^(j+eps) k^(rho-j-eps)            [subject: k]

    The sign factor of ``tau_minus_alpha`` stays unshifted, matching the
    limit interpretations the derivative computations rely on; the phase of
    ``alpha_minus_tau`` is attached to the tau power and shifts with it.
    """
    if kind not in _BINOMIAL_KINDS:
        raise DomainError(f"unknown binomial kind {kind!r}")
    if j_min > 0 or j_max < 0:
        raise DomainError("expand_binomial requires j_min <= 0 <= j_max")
    rho = complex(rho)
    terms = {}
    subject = "alpha"
    for j in range(j_min, j_max + 1):
        be = binom_eps(rho, j)
        if kind == "alpha_minus_tau":
            mono = TauMonomial(be * phase_eps(rho - j, -1.0),
                               rho - j, -1.0, 0, complex(j), +1.0)
        elif kind == "tau_minus_alpha":
            mono = TauMonomial(be * EpsLaurent.const((-1.0) ** (j % 2)),
                               rho - j, -1.0, 0, complex(j), +1.0)
        elif kind == "z_plus_tau":
            mono = TauMonomial(be, rho - j, -1.0, 0, complex(j), +1.0)
            subject = "z"
        else:  # k_plus_tau
            mono = TauMonomial(be, complex(j), +1.0, 0, rho - j, -1.0)
            subject = "k"
        terms[j] = mono
    return TauSeries(subject=subject, terms=terms, kind=kind, rho=rho)


def identity_series(subject: str = "alpha") -> TauSeries:
    """The multiplicative identity: a single tau^0 subject^0 term."""
    return TauSeries(subject=subject,
                     terms={0: TauMonomial(EpsLaurent.const(1.0), 0j, 0.0, 0,
                                           0j, 0.0)},
                     kind="identity")


def ln_tau_minus_alpha_series(l_max: int) -> TauSeries:
    """ln(tau - a) = ln(tau) - sum_{l>=1} tau^(-l) a^l / l.

    One-sided on purpose: extending this Taylor range to the left produces
    unresolvable singularities (the would-be l = 0 companion has no
    countervailing zero), so only the binomial factor gets a two-sided
    range.
    """
    terms = {0: TauMonomial(EpsLaurent.const(1.0), 0j, 0.0, 1, 0j, 0.0)}
    for l in range(1, l_max + 1):
        terms[l] = TauMonomial(EpsLaurent.const(-1.0 / l), complex(-l), 0.0, 0,
                               complex(l), 0.0)
    return TauSeries(subject="alpha", terms=terms, kind="ln_tau_minus_alpha")


def multiply(series_a: TauSeries, series_b: TauSeries) -> TauSeries:
    """Cauchy product over the explicit index ranges; no evaluation happens.

    Stand-alone zeros propagate: every (ja, jb) pairing is kept as its own
    monomial so a zero scalar keeps its eps structure for the final limit.
    """
    if series_a.subject != series_b.subject:
        raise DomainError("multiply: subject variables differ "
                          f"({series_a.subject} vs {series_b.subject})")
    out: dict = {}
    for ja, monos_a in series_a.terms.items():
        for jb, monos_b in series_b.terms.items():
            for ta in monos_a:
                for tb in monos_b:
                    log_e = ta.log_tau_exponent + tb.log_tau_exponent
                    if log_e > 1:
                        raise DomainError(
                            "product would need (ln tau)^2; out of scope")
                    mono = TauMonomial(
                        ta.scalar * tb.scalar,
                        ta.tau_power + tb.tau_power,
                        ta.tau_shift + tb.tau_shift,
                        log_e,
                        ta.subject_power + tb.subject_power,
                        ta.subject_shift + tb.subject_shift,
                    )
                    out.setdefault(ja + jb, []).append(mono)
    return TauSeries(subject=series_a.subject, terms=out, kind="product")


def _group_key(p) -> tuple:
    p = complex(p)
    return (round(p.real, 9), round(p.imag, 9))


def _resolved_groups(series: TauSeries, at_value, pole_tol: float) -> dict:
    """Sum the eps-Laurent contribution of every monomial per subject power
    and verify that pole orders cancel within each group."""
    groups: dict = {}
    for mono in series.monomials():
        e = (mono.scalar
             * tau_atom(mono.tau_power, mono.tau_shift, mono.log_tau_exponent)
             * subject_shift_atom(at_value, mono.subject_shift))
        key = _group_key(mono.subject_power)
        groups[key] = groups[key] + e if key in groups else e
    for key, e in groups.items():
        scale = max(1.0, e.scale_hint())
        for k, v in e.pole_part().items():
            if abs(v) > pole_tol * scale:
                raise UncancelledSingularityError(
                    f"residual eps^{k} coefficient {v:.3e} at subject power "
                    f"{key[0]}{key[1]:+}i", index=key)
    return groups


def evaluate_with_limits(series: TauSeries, at, pole_tol: float = 1e-7) -> complex:
    """Resolve every coefficient through the eps fabric and sum at a point.

    Terms are grouped by the base subject power; within each group the
    eps-Laurent contributions are summed and any negative order must cancel
    to ``pole_tol`` relative, otherwise the offending subject power is
    named in the error.  Evaluation at subject value 1 of a pristine
    non-integer-exponent binomial routes through the regularised split
    (:func:`evaluate_binomial_at_one`), because the raw partial sums only
    Cesaro-converge there.
    """
    at_c = complex(at)
    if (series.kind in ("alpha_minus_tau", "tau_minus_alpha", "z_plus_tau")
            and abs(at_c - 1.0) < 1e-14 and not _is_int(series.rho)):
        return evaluate_binomial_at_one(series)
    groups = _resolved_groups(series, at_c, pole_tol)
    total = 0j
    for key in sorted(groups):
        v0 = groups[key].order0()
        p = complex(*key)
        if at_c == 0:
            if abs(p) < 1e-12:
                total += v0
            elif p.real > 0 or abs(v0) < 1e-10 * max(1.0, groups[key].scale_hint()):
                continue
            else:
                raise DomainError("evaluation at 0 hit a negative subject "
                                  "power with non-zero coefficient")
        else:
            if v0 == 0:
                continue
            total += v0 * cpow(at_c, p)
    return total


def evaluated_coefficients(series: TauSeries, pole_tol: float = 1e-7) -> dict:
    """eps-resolved coefficient of each subject power.

    Keys are (Re p, Im p) pairs; used for coefficient-level comparison of
    the evaluated expansions against the exact scale polynomials.
    """
    groups = _resolved_groups(series, 1.0, pole_tol)
    # subject_shift_atom(1.0, s) is identity (ln 1 = 0), so the resolved
    # coefficients carry no evaluation-point dependence here.
    return {key: e.order0() for key, e in groups.items()}


def evaluate_binomial_at_one(series: TauSeries) -> complex:
    """Evaluate a pristine binomial expansion at subject value 1.

    Splitting zeta = 1 + (zeta - 1) leaves an absolutely convergent series
    plus the pure binomial sum sum_j sign_j C(rho, j), whose value is taken
    as its Cesaro-regularised limit: partial sums of sum (-1)^j C(rho, j)
    equal (-1)^J C(rho-1, J) ~ J^{-rho}, which Cesaro-converges to 0 for
    every rho not in Z_{<=0}; for the (1 + 1)^rho orientation the plain
    binomial value 2^rho applies.
    """
    rho = series.rho
    if series.kind not in ("alpha_minus_tau", "tau_minus_alpha", "z_plus_tau"):
        raise DomainError("at-1 regularisation needs an alpha/z binomial")
    if _is_int(rho):
        raise DomainError("integer exponents evaluate through the exact "
                          "polynomial route instead")

    def sign(j: int) -> complex:
        if series.kind == "alpha_minus_tau":
            return cmath.exp(1j * math.pi * (rho - j))
        if series.kind == "tau_minus_alpha":
            return (-1.0) ** (j % 2)
        return 1.0 + 0j

    total = 0j
    cj = 1.0 + 0j
    for j in range(0, 2000):
        zm1 = special.zeta(complex(j) - rho) - 1.0
        term = sign(j) * cj * zm1
        total += term
        if j > 8 and abs(term) < 1e-17 * max(1.0, abs(total)):
            break
        cj *= (rho - j) / (j + 1)
    if series.kind == "z_plus_tau":
        total += cpow(2.0, rho)
    # the (1-1)^rho orientation regularises to 0 for non-integer rho
    return total


def tau_shift_identity_residual(s) -> complex:
    """(tau - 1)^{-s} - tau^{-s}; should vanish for s outside Z_{>0}.

    The left side is the two-sided expansion of (tau - alpha)^{-s} at
    alpha = 1 evaluated through the regularised split; the right side is
    zeta(s) directly, so agreement is a genuine identity check on the
    formal calculus.
    """
    s = complex(s)
    rho = -s
    if _is_int(rho) and round(rho.real) <= 0 and abs(rho) > 1e-14:
        raise DomainError("s in Z_{>0} excluded (zeta pole / no identity)")
    if _is_int(rho):
        # non-negative integer rho: finite expansion, direct evaluation
        n = int(round(rho.real))
        lhs = sum((-1.0) ** (j % 2) * special.binom(rho, j).real
                  * special.zeta(float(j - n)) for j in range(n + 1) if j - n != 1)
        # the singular index j = n+1 resolves to +1/(n+1) through the fabric
        lhs += _singular_binomial_coefficient(rho, n + 1)
        return lhs - special.zeta(s)
    ser = expand_binomial("tau_minus_alpha", rho, 0, 0)
    lhs = evaluate_binomial_at_one(ser)
    return lhs - special.zeta(s)


def _singular_binomial_coefficient(rho: complex, j: int) -> complex:
    """Fabric limit of (-1)^j C(rho, j+eps) zeta(j-rho-eps...) at the
    zero-against-pole index of an integer-exponent expansion."""
    e = (binom_eps(rho, j) * EpsLaurent.const((-1.0) ** (j % 2))
         * tau_atom(rho - j, -1.0, 0))
    for k, v in e.pole_part().items():
        if abs(v) > 1e-9 * max(1.0, e.scale_hint()):
            raise UncancelledSingularityError("singular index did not resolve",
                                              index=j)
    return e.order0()


# ---------------------------------------------------------------------------
# the generalised scale members q-check_rho and their rho-derivatives
# ---------------------------------------------------------------------------

@dataclass
class EvaluatedFunction:
    """Callable wrapper for q-check_rho carrying truncation metadata."""
    rho: complex
    truncation_index: int = 0
    tail_bound: float = 0.0

    def __call__(self, alpha: float) -> complex:
        value, j_used, tail = _qcheck_series(self.rho, alpha)
        self.truncation_index = j_used
        self.tail_bound = tail
        return value


def _qcheck_series(rho: complex, alpha: float, rel_tol: float = 1e-13):
    """sum_j e^{i pi (rho-j)} C(rho, j) zeta(j-rho) alpha^j with adaptive J.

    Returns (value, truncation index, tail bound).  zeta(j - rho) -> 1
    geometrically, so beyond moderate j each term costs one multiply.
    """
    phase = cmath.exp(1j * math.pi * rho)
    cj = 1.0 + 0j
    aj = 1.0 + 0j
    total = 0j
    j = 0
    while True:
        a = complex(j) - rho
        if abs(a - 1.0) < 1e-12:
            raise PoleError("integer rho must use the exact polynomial",
                            location=j)
        zj = special.zeta(a) if a.real < 60 else 1.0 + cpow(2.0, -a)
        term = phase * cmath.exp(-1j * math.pi * j) * cj * zj * aj
        total += term
        if j > 6 and abs(term) < rel_tol * max(abs(total), 1e-30):
            tail = abs(term) * abs(alpha) / max(1e-30, 1.0 - abs(alpha))
            return total, j, tail
        cj *= (rho - j) / (j + 1)
        aj *= alpha
        j += 1
        if j > 300000:
            raise DomainError("q-check series did not converge")


def qcheck_rho(rho, alpha: float) -> complex:
    """The generalised scale member q-check_rho(alpha) on [0, 1).

    Integer rho >= 0 delegates to the exact polynomial; negative integers
    are distributional (only the diagnostics in :mod:`cesarosum.fourier`
    apply); anything else sums the defining series.
    """
    rho = complex(rho)
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise DomainError("alpha must lie in [0, 1)")
    if _is_int(rho, 1e-14):
        n = int(round(rho.real))
        if n < 0:
            raise DomainError("rho in Z_{<0} is distributional; see the "
                              "singular-limit diagnostics")
        return complex(qcheck_poly(n)(alpha))
    return _qcheck_series(rho, alpha)[0]


def qcheck_function(rho) -> EvaluatedFunction:
    return EvaluatedFunction(rho=complex(rho))


# -- d/drho q-check_rho at rho = 0, 1 ---------------------------------------

def _zeta_at_pos_int(j: int) -> float:
    ze = special.zeta_exact_at_int(j)
    return ze if ze is not None else special.zeta(float(j)).real


def drho_qcheck_closed(at_rho: int, alpha: float) -> complex:
    """Direct summation of the closed forms:

    rho = 0:  i pi qc_0(a) - zeta'(0) - gamma a - sum_{j>=2} zeta(j) a^j / j
    rho = 1:  i pi qc_1(a) + zeta'(-1) - (1/2 + zeta'(0)) a
              + (1/2 - gamma/2) a^2 - sum_{j>=2} zeta(j) a^{j+1} / (j (j+1))
    """
    if at_rho not in (0, 1):
        raise DomainError("closed forms cover rho in {0, 1}")
    a = float(alpha)
    if not 0.0 <= a < 1.0:
        raise DomainError("alpha must lie in [0, 1)")
    J = 60 if a == 0 else max(60, int(math.log(1e-17) / math.log(max(a, 1e-9))) + 2)
    qv = complex(qcheck_poly(at_rho)(a))
    zp0 = special.zeta_deriv(0.0)
    if at_rho == 0:
        s = -zp0 - EULER_GAMMA * a
        for j in range(2, J):
            s -= _zeta_at_pos_int(j) * a ** j / j
        return 1j * math.pi * qv + s
    zpm1 = special.zeta_deriv(-1.0)
    s = zpm1 - (0.5 + zp0) * a + (0.5 - EULER_GAMMA / 2) * a * a
    for j in range(2, J):
        s -= _zeta_at_pos_int(j) * a ** (j + 1) / (j * (j + 1))
    return 1j * math.pi * qv + s


def drho_qcheck_engine(at_rho: int, alpha: float, j_min: int = -40,
                       two_sided: bool = True) -> complex:
    """d/drho q-check_rho via the full formal pipeline.

    Expands (tau - a)^rho two-sided, multiplies by the ln(tau - a) series,
    resolves every singular coefficient through the eps fabric, and adds
    the analytic closed form of the left tail beyond ``j_min`` (those
    pairings telescope, so the closed form removes all truncation error).
    With ``two_sided=False`` the stand-alone zeros at j < 0 are dropped and
    the result reproduces the documented anomaly (+a at rho = 0, -a^2/4 at
    rho = 1) -- kept callable precisely because that regression is what
    motivates retaining them.
    """
    if at_rho not in (0, 1):
        raise DomainError("engine derivative implemented at rho in {0, 1}")
    a = float(alpha)
    if not 0.0 <= a < 1.0:
        raise DomainError("alpha must lie in [0, 1)")
    if two_sided and j_min > -1:
        raise RangeTruncationError(
            "two-sided derivative needs j_min <= -1: the j = -1 stand-alone "
            "zero has a singular partner in the ln series")
    l_max = 70 if a == 0 else max(70, int(math.log(1e-16) / math.log(max(a, 1e-9))) + 4)
    binomial = expand_binomial("tau_minus_alpha", at_rho,
                               j_min if two_sided else 0, at_rho + 3)
    lnser = ln_tau_minus_alpha_series(l_max)
    product = multiply(binomial, lnser)
    v = evaluate_with_limits(product, a)
    if two_sided:
        m_cut = -j_min
        if at_rho == 0:
            # pairs (j = -m, l = m+1) contribute +a/(m(m+1)); the tail
            # telescopes to 1/(M+1)
            v += a / (m_cut + 1)
        else:
            # pairs contribute +a^2/(m(m+1)(m+2)); tail = 1/(2(M+1)(M+2))
            v += a * a * 0.5 / ((m_cut + 1) * (m_cut + 2))
    phase = cmath.exp(1j * math.pi * at_rho)
    qv = complex(qcheck_poly(at_rho)(a))
    return 1j * math.pi * qv + phase * v


def drho_qcheck(at_rho: int, alpha: float, check_tol: float = 1e-8) -> complex:
    """d/drho q-check_rho at rho in {0, 1}.

    Computed both by the formal pipeline and by the closed form; the two
    must agree (that agreement is the point of the computation), after
    which the closed-form value is returned.
    """
    closed = drho_qcheck_closed(at_rho, alpha)
    engine = drho_qcheck_engine(at_rho, alpha)
    if abs(closed - engine) > check_tol * max(1.0, abs(closed)):
        raise UncancelledSingularityError(
            f"formal-engine derivative drifted from the closed form by "
            f"{abs(closed - engine):.2e}", index=at_rho)
    return closed
