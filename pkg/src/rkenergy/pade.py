"""Closed forms for diagonal Padé energy coefficients and exact identity checks.

For the (s, s) Padé approximant the shifted decomposition needs no repair:
the symmetric coefficient matrix factors as -U^T diag(d_hat) U with U and
d_hat given by closed forms.  The proof of that fact extends the integer s
to a rational parameter x with 2x not an integer, so every quantity below
comes in an extended version that takes such an x.

All arithmetic is exact.  The square-root factors sqrt(2i - 1) that appear
in the natural normalization of the extended U are never formed: :func:`nu`
returns the rational cofactor and products of two entries from the same row
multiply by (2i - 1) instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .continuum import d_hat, mu_hat
from .exactnum import (
    RationalLike,
    RationalMatrix,
    binomial,
    factorial,
    falling_factorial,
    rising_factorial,
    to_rational,
    utdu_product,
)

SAMPLE_POINTS: tuple[Fraction, ...] = tuple(
    Fraction(v) for v in ("1/3", "7/5", "-5/3", "22/7", "101/6"))


class DomainError(ValueError):
    """Extended parameter x with 2x an integer."""


@dataclass(frozen=True)
class CheckResult:
    """Outcome of an exact identity sweep; truthy when every case holds."""

    check: str
    parameters: dict[str, Any]
    passed: bool
    cases: int = 0
    counterexample: dict[str, Any] | None = None

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict[str, Any]:
        out = {"check": self.check,
               "parameters": {k: _jsonable(v) for k, v in self.parameters.items()},
               "status": "pass" if self.passed else "fail",
               "cases": self.cases}
        if self.counterexample is not None:
            out["counterexample"] = {k: _jsonable(v) for k, v in self.counterexample.items()}
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(e) for e in v]
    return v


class _Sweep:
    def __init__(self, check: str, **parameters: Any) -> None:
        self.check = check
        self.parameters = parameters
        self.cases = 0
        self.failure: dict[str, Any] | None = None

    def expect(self, lhs, rhs, **where) -> bool:
        self.cases += 1
        if lhs != rhs and self.failure is None:
            self.failure = {**where, "lhs": lhs, "rhs": rhs}
        return lhs == rhs

    def result(self) -> CheckResult:
        return CheckResult(self.check, self.parameters, self.failure is None,
                           self.cases, self.failure)


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


# ---------------------------------------------------------------- integer s

def pade_theta(s: int, i: int) -> Fraction:
    if not 0 <= i <= s:
        raise ValueError(f"need 0 <= i <= s, got i={i}, s={s}")
    f = factorial
    return f(s) / f(2 * s) * f(2 * s - i) / (f(i) * f(s - i))


def pade_vartheta(s: int, i: int) -> Fraction:
    return _sign(i) * pade_theta(s, i)


def pade_mu(s: int, i: int, j: int) -> Fraction:
    if i > j or (j - i) % 2:
        return Fraction(0)
    f = factorial
    a, m = (i + j) // 2, (j - i) // 2
    return (f(s) / f(2 * s) * f(2 * i + 1) / (f(i) * f(i + j + 1))
            * f(2 * s + i - j) / f(s - 1 - j)
            * f(s - 1 - a) * f(a) / (f(s - m) * f(m)))


def pade_gamma_direct(s: int, i: int, j: int) -> Fraction:
    """Symmetric energy coefficient of the (s, s) Padé step, by direct summation."""
    lead = _sign(i) + _sign(j)
    if lead == 0:
        return Fraction(0)
    f = factorial
    total = Fraction(0)
    for l in range(max(0, i + j + 1 - s), min(i, j) + 1):
        r = i + j + 1 - l
        total += (_sign(l + 1) * f(2 * s - l) / (f(l) * f(s - l))
                  * f(2 * s - r) / (f(r) * f(s - r)))
    return lead * (f(s) / f(2 * s)) ** 2 * total


@dataclass(frozen=True)
class PadeClosedForms:
    s: int
    theta: tuple[Fraction, ...] = field(init=False)
    mu: RationalMatrix = field(init=False)
    d_hat: tuple[Fraction, ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.s < 1:
            raise ValueError(f"s must be positive, got {self.s}")
        s = self.s
        object.__setattr__(self, "theta", tuple(pade_theta(s, i) for i in range(s + 1)))
        object.__setattr__(self, "mu", RationalMatrix.from_function(
            s, s, lambda i, j: pade_mu(s, i, j)))
        object.__setattr__(self, "d_hat", tuple(d_hat(k) for k in range(s)))

    def gamma(self) -> RationalMatrix:
        return RationalMatrix.from_function(
            self.s, self.s, lambda i, j: pade_gamma_direct(self.s, i, j))


def verify_pade_cholesky(s: int) -> RationalMatrix:
    """gamma + U^T diag(d_hat) U from closed forms only; zero when the factorization holds."""
    c = PadeClosedForms(s)
    return c.gamma() + utdu_product(c.mu, c.d_hat)


def _binomial_sum_closed(s: int, i: int, j: int) -> Fraction:
    if (j - i) % 2:
        return Fraction(0)
    f = factorial
    a, m = (i + j) // 2, (j - i) // 2
    return f(s - 1 - a) * f(a) / (f(s - m) * f(m)) * (s - j)


def _binomial_sum_brute(s: int, i: int, j: int) -> Fraction:
    return sum((_sign(l) * binomial(2 * s - l, j - i - l) * binomial(i + j + 1, l)
                / binomial(s - l, j - l) for l in range(j - i + 1)), Fraction(0))


def verify_binomial_sum_identity(s: int) -> CheckResult:
    """Alternating binomial sum against its factorial closed form, 0 <= i <= j < s."""
    sw = _Sweep("binomial-sum", s=s)
    for j in range(s):
        for i in range(j + 1):
            sw.expect(_binomial_sum_brute(s, i, j), _binomial_sum_closed(s, i, j), i=i, j=j)
    return sw.result()


def verify_shifted_mu_coefficients(s: int) -> CheckResult:
    """sum_l mu_hat(k, l) vartheta_{j-l} reproduces pade_mu, and so do the polynomial forms."""
    sw = _Sweep("shifted-mu", s=s)
    vt = [pade_vartheta(s, i) for i in range(s + 1)]
    for k in range(s):
        for j in range(k, s):
            bar = sum((mu_hat(k, l) * vt[j - l] for l in range(k, j + 1)), Fraction(0))
            sw.expect(bar, pade_mu(s, k, j), k=k, j=j)
        # sum_j mu_{k,j} z^{j-k}  versus  sum_j mu_hat_{k,j} z^{j-k} Q_j(z),
        # Q_j being Q truncated to degree s-1-j
        lhs = [pade_mu(s, k, j) for j in range(k, s)]
        rhs = [Fraction(0)] * (s - k)
        for j in range(k, s):
            for e in range(s - j):
                rhs[j - k + e] += mu_hat(k, j) * vt[e]
        sw.expect(tuple(lhs), tuple(rhs), k=k, form="polynomial")
    return sw.result()


# ------------------------------------------------------------- rational x

def _extended(x: RationalLike) -> Fraction:
    x = to_rational(x)
    if (2 * x).denominator == 1:
        raise DomainError(f"extended parameter needs 2x not an integer, got x = {x}")
    return x


def theta_extended(x: RationalLike, i: int) -> Fraction:
    """x(x-1)...(x-i+1) / (i! 2x(2x-1)...(2x-i+1)), with theta_0 = 1."""
    return _theta_extended(to_rational(x), i)


@lru_cache(maxsize=None)
def _theta_extended(x: Fraction, i: int) -> Fraction:
    if i == 0:
        return Fraction(1)
    den = falling_factorial(2 * x, i)
    if den == 0:
        raise DomainError(f"theta_extended({x}, {i}) has a vanishing denominator")
    return falling_factorial(x, i) / (factorial(i) * den)


def gamma_extended(x: RationalLike, p: int, q: int) -> Fraction:
    lead = _sign(p) + _sign(q)
    if lead == 0:
        return Fraction(0)
    return lead * sum((_sign(i + 1) * theta_extended(x, i) * theta_extended(x, p + q + 1 - i)
                       for i in range(min(p, q) + 1)), Fraction(0))


@lru_cache(maxsize=None)
def _nu_cofactor(x: Fraction, i: int, j: int) -> Fraction:
    if i > j or (j - i) % 2:
        return Fraction(0)
    a, m = (i + j) // 2, (j - i) // 2
    # factorial ratios rewritten as shifted products:
    #   x!/(x-j)! = (x-j+1)_j,  (2x-2m)!/(2x)! = 1/(2x-2m+1)_{2m},
    #   (x-a)!/(x-m)! = 1/(x-a+1)_i
    num = 2 * factorial(a) * rising_factorial(x - j + 1, j)
    den = (factorial(i + j) * factorial(m) * rising_factorial(2 * x - 2 * m + 1, 2 * m)
           * rising_factorial(x - a + 1, i))
    return num / den


def nu(x: RationalLike, i: int, j: int) -> Fraction:
    """Rational cofactor of the extended U entry: the entry divided by sqrt(2i - 1)."""
    if i < 1 or j < 1:
        raise ValueError(f"nu is indexed from 1, got ({i}, {j})")
    return _nu_cofactor(_extended(x), i, j)


def nu_product(x: RationalLike, i: int, p: int, q: int) -> Fraction:
    """Product of two entries in row i; the shared radical squares to 2i - 1."""
    x = _extended(x)
    return (2 * i - 1) * _nu_cofactor(x, i, p) * _nu_cofactor(x, i, q)


def nu_factorial_form(s: int, i: int, j: int) -> Fraction:
    """Integer-s cofactor straight from factorials, for cross-checking :func:`nu`."""
    if i > j or (j - i) % 2:
        return Fraction(0)
    f = factorial
    a, m = (i + j) // 2, (j - i) // 2
    return (f(s) / f(2 * s) * 2 / f(i + j)
            * f(2 * s + i - j) * f(s - a) * f(a) / (f(s - j) * f(s - m) * f(m)))


def extended_residual(x: RationalLike, p: int, q: int) -> Fraction:
    """gamma_{p-1,q-1}(x) + sum_{i <= min(p,q)} nu_{i,p} nu_{i,q}; identically zero."""
    x = _extended(x)
    return gamma_extended(x, p - 1, q - 1) + sum(
        (nu_product(x, i, p, q) for i in range(1, min(p, q) + 1)), Fraction(0))


def _denominator(x: Fraction, p: int, q: int) -> Fraction:
    return (x - p) * (1 + 2 * p) * (x - q) * (1 + 2 * q)


def varphi_n(x: RationalLike, n: int, p: int, q: int) -> Fraction:
    x = _extended(x)
    r = rising_factorial
    num = r(x + Fraction(3, 2) - p, n) * r(1 - p, n) * r(x + Fraction(1, 2) - q, n) * r(-q, n)
    den = (r(p - x + 1, n) * r(p + Fraction(3, 2), n)
           * r(q - x + 1, n) * r(q + Fraction(3, 2), n))
    return num / den


def phi_n(x: RationalLike, n: int, p: int, q: int) -> Fraction:
    return _phi_n(_extended(x), n, p, q)


@lru_cache(maxsize=None)
def _phi_n(x: Fraction, n: int, p: int, q: int) -> Fraction:
    c1 = (4 * n + 3) * (1 + x - 2 * p) * (q - n) * (1 + 2 * x + 2 * n - 2 * q)
    c2 = (4 * n + 1) * (x - 2 * q) * (1 + 2 * p + 2 * n) * (x - p - n)
    return varphi_n(x, n, p, q) * (c1 + c2) / _denominator(x, p, q)


def Phi_n(x: RationalLike, n: int, p: int, q: int) -> Fraction:
    x = _extended(x)
    c3 = (n + p - x) * (1 + 2 * p + 2 * n) * (n + q - x) * (1 + 2 * q + 2 * n)
    return varphi_n(x, n, p, q) * c3 / _denominator(x, p, q)


def verify_extended_cholesky(x: RationalLike, p_max: int) -> CheckResult:
    """The extended residual vanishes for all 1 <= p, q <= p_max."""
    x = _extended(x)
    sw = _Sweep("extended-cholesky", x=x, p_max=p_max)
    for p in range(1, p_max + 1):
        for q in range(1, p_max + 1):
            sw.expect(extended_residual(x, p, q), Fraction(0), p=p, q=q)
    return sw.result()


def _even_relation(x: Fraction, i: int, j: int) -> Fraction:
    r = rising_factorial
    half = Fraction(1, 2)
    return (2 * r(x + half - j, i) * r(-j, i) / (r(j - x, i) * r(half + j, i))
            * theta_extended(x, 2 * j))


def _odd_relation(x: Fraction, i: int, j: int) -> Fraction:
    r = rising_factorial
    half = Fraction(1, 2)
    return (2 * r(x + 3 * half - j, i - 1) * r(1 - j, i - 1)
            / (r(j - x, i - 1) * r(half + j, i - 1)) * theta_extended(x, 2 * j - 1))


def verify_nu_theta_relations(x: RationalLike, i_max: int, j_max: int) -> CheckResult:
    """Even- and odd-index nu cofactors against their theta-based Pochhammer forms."""
    x = _extended(x)
    sw = _Sweep("nu-theta-relations", x=x, i_max=i_max, j_max=j_max)
    for i in range(1, i_max + 1):
        for j in range(1, j_max + 1):
            sw.expect(nu(x, 2 * i, 2 * j), _even_relation(x, i, j), i=i, j=j, parity="even")
            sw.expect(nu(x, 2 * i - 1, 2 * j - 1), _odd_relation(x, i, j),
                      i=i, j=j, parity="odd")
    return sw.result()


def verify_phi_recurrences(x: RationalLike, p_max: int, q_max: int,
                           n_max: int) -> CheckResult:
    """Phi_0 = 1, Phi_n = 0 for n >= p, and Phi_{n+1} - Phi_n = -phi_n."""
    x = _extended(x)
    sw = _Sweep("phi-recurrences", x=x, p_max=p_max, q_max=q_max, n_max=n_max)
    for p in range(1, p_max + 1):
        for q in range(1, q_max + 1):
            sw.expect(Phi_n(x, 0, p, q), Fraction(1), p=p, q=q, n=0)
            for n in range(n_max + 1):
                if n >= p:
                    sw.expect(Phi_n(x, n, p, q), Fraction(0), p=p, q=q, n=n)
                    sw.expect(phi_n(x, n, p, q), Fraction(0), p=p, q=q, n=n)
                sw.expect(Phi_n(x, n + 1, p, q) - Phi_n(x, n, p, q), -phi_n(x, n, p, q),
                          p=p, q=q, n=n)
    return sw.result()


def verify_nu_phi_pairing(x: RationalLike, i_max: int, p_max: int, q_max: int) -> CheckResult:
    """Odd-row plus even-row products equal 2 theta_{2p-1} theta_{2q} phi_{i-1}."""
    x = _extended(x)
    sw = _Sweep("nu-phi-pairing", x=x, i_max=i_max, p_max=p_max, q_max=q_max)
    for i in range(1, i_max + 1):
        for p in range(1, p_max + 1):
            for q in range(1, q_max + 1):
                lhs = (nu_product(x, 2 * i - 1, 2 * p - 1, 2 * q + 1)
                       + nu_product(x, 2 * i, 2 * p, 2 * q))
                rhs = (2 * theta_extended(x, 2 * p - 1) * theta_extended(x, 2 * q)
                       * phi_n(x, i - 1, p, q))
                sw.expect(lhs, rhs, i=i, p=p, q=q)
    return sw.result()


def verify_phi_sum_and_nu_pairing(x: RationalLike, p_max: int, q_max: int) -> CheckResult:
    """sum_{n<p} phi_n = 1, telescoping via Phi, and the two-row nu sum equals 2 theta_p theta_q."""
    x = _extended(x)
    sw = _Sweep("phi-sum-and-nu-sum", x=x, p_max=p_max, q_max=q_max)
    for p in range(1, p_max + 1):
        for q in range(1, q_max + 1):
            total = sum((phi_n(x, n, p, q) for n in range(p)), Fraction(0))
            sw.expect(total, Fraction(1), p=p, q=q, identity="phi-sum")
            sw.expect(Phi_n(x, 0, p, q) - Phi_n(x, p, p, q), total,
                      p=p, q=q, identity="telescoping")
            if (p - q - 1) % 2 == 0:
                lhs = sum((nu_product(x, i, p, q + 1) for i in range(1, min(p, q + 1) + 1)),
                          Fraction(0))
                lhs += sum((nu_product(x, i, p + 1, q) for i in range(1, min(p + 1, q) + 1)),
                           Fraction(0))
                sw.expect(lhs, 2 * theta_extended(x, p) * theta_extended(x, q),
                          p=p, q=q, identity="nu-sum")
    return sw.result()


def verify_integer_consistency(s_max: int) -> CheckResult:
    """Extended quantities at integer s agree with the integer closed forms.

    theta_extended matches pade_theta for i <= s and vanishes for s < i < 2s;
    gamma_extended matches pade_gamma_direct; the Pochhammer cofactor of nu
    matches its factorial form; and (2i - 1) nu_{i,j}^2 = d_hat(i-1) mu_{i-1,j-1}^2.
    """
    sw = _Sweep("integer-consistency", s_max=s_max)
    for s in range(1, s_max + 1):
        x = Fraction(s)
        for i in range(2 * s):
            want = pade_theta(s, i) if i <= s else Fraction(0)
            sw.expect(theta_extended(x, i), want, s=s, i=i)
        for p in range(s):
            for q in range(s):
                sw.expect(gamma_extended(x, p, q), pade_gamma_direct(s, p, q), s=s, p=p, q=q)
        for i in range(1, s + 1):
            for j in range(1, s + 1):
                r = _nu_cofactor(x, i, j)
                sw.expect(r, nu_factorial_form(s, i, j), s=s, i=i, j=j, form="factorial")
                sw.expect((2 * i - 1) * r * r, d_hat(i - 1) * pade_mu(s, i - 1, j - 1) ** 2,
                          s=s, i=i, j=j, form="mu")
    return sw.result()


def verify_pochhammer_identities(x_samples: Iterable[RationalLike], n_max: int) -> CheckResult:
    """Three shifted-factorial identities.

    The halving identity (x)_n = 2^n (x/2)_{ceil(n/2)} ((x+1)/2)_{floor(n/2)}
    is checked at every sample.  The two identities that involve factorials
    are checked at integers n_max + 2 .. n_max + 6 so that every factorial
    has a nonnegative argument; at rational samples the factorial ratio is
    replaced by the product (x - j + 1)_{i + j}.
    """
    samples = [to_rational(v) for v in x_samples]
    sw = _Sweep("pochhammer", x_samples=samples, n_max=n_max)
    r = rising_factorial
    for x in samples:
        for n in range(n_max + 1):
            rhs = 2 ** n * r(x / 2, (n + 1) // 2) * r((x + 1) / 2, n // 2)
            sw.expect(r(x, n), rhs, x=x, n=n, identity="halving")
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                sw.expect(r(x - j + 1, i + j), _sign(j) * r(-x, j) * r(x + 1, i),
                          x=x, i=i, j=j, identity="ratio-rational")
    for xi in range(n_max + 2, n_max + 7):
        f = factorial
        for n in range(n_max + 1):
            sw.expect(f(xi + n), f(xi) * r(xi + 1, n), x=xi, n=n, identity="shift")
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                sw.expect(f(xi + i) / f(xi - j), _sign(j) * r(-xi, j) * r(xi + 1, i),
                          x=xi, i=i, j=j, identity="ratio")
    return sw.result()


def verify_extended_all(x_samples: Sequence[RationalLike] = SAMPLE_POINTS,
                        p_max: int = 10, n_max: int = 12) -> list[CheckResult]:
    out = []
    for x in x_samples:
        out.append(verify_extended_cholesky(x, p_max))
        out.append(verify_nu_theta_relations(x, p_max, p_max))
        out.append(verify_phi_recurrences(x, p_max, p_max, n_max))
        out.append(verify_phi_sum_and_nu_pairing(x, p_max, p_max))
        out.append(verify_nu_phi_pairing(x, p_max // 2, p_max, p_max))
    return out
