"""Discrete energy law of a stability function.

For u^{n+1} = R(tau L) u^n with w = Q(tau L)^{-1} u^n the energy change is

    ||u^{n+1}||^2 - ||u^n||^2
        = sum_k beta_k tau^{2k} ||L^k w||^2
        + sum_{i,j} gamma_{ij} tau^{i+j+1} [L^i w, L^j w]

where [., .] is the semi-inner product induced by L.  :func:`decompose`
rewrites the double sum as a signed sum of squared semi-norms by factoring
gamma - diag(delta) = -U^T diag(d) U, and :func:`classify` reads off the
stability class from beta and gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .exactnum import (
    RationalMatrix,
    format_rational,
    is_negative_semidefinite,
    utdu_factorize,
)
from .methods import StabilityFunction

UNCONDITIONALLY_STRONG = "UnconditionallyStrong"
CONDITIONALLY_STRONG = "ConditionallyStrong"
WEAK_ONLY = "WeakOnly"
NOT_STRONGLY_STABLE = "NotStronglyStable"


@dataclass(frozen=True)
class EnergyCoefficients:
    alpha: RationalMatrix
    beta: tuple[Fraction, ...]
    gamma: RationalMatrix

    @property
    def s(self) -> int:
        return len(self.beta) - 1


@dataclass(frozen=True)
class EnergyDecomposition:
    delta: tuple[Fraction, ...]
    d_tilde: tuple[Fraction, ...]
    U_tilde: RationalMatrix
    beta: tuple[Fraction, ...]


@dataclass(frozen=True)
class StabilityReport:
    zeta: float | int
    beta_zeta_sign: int
    rho: int
    kappa: int
    kind: str

    @property
    def classification(self) -> str:
        if self.kind in (WEAK_ONLY, NOT_STRONGLY_STABLE):
            return f"{self.kind}({self.kappa})"
        return self.kind


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def alpha_matrix(sf: StabilityFunction) -> RationalMatrix:
    th, vt = sf.theta, sf.vartheta
    n = sf.s + 1
    return RationalMatrix.from_function(n, n, lambda i, j: th[i] * th[j] - vt[i] * vt[j])


def beta_gamma(sf: StabilityFunction) -> EnergyCoefficients:
    s = sf.s
    a = alpha_matrix(sf)
    beta = []
    for k in range(s + 1):
        beta.append(sum((a[l, 2 * k - l] * _sign(k - l)
                         for l in range(max(0, 2 * k - s), min(2 * k, s) + 1)), Fraction(0)))

    def gamma(i, j):
        m = min(i, j)
        return sum((a[l, i + j + 1 - l] * _sign(m + 1 - l)
                    for l in range(max(0, i + j + 1 - s), m + 1)), Fraction(0))

    return EnergyCoefficients(a, tuple(beta), RationalMatrix.from_function(s, s, gamma))


def decompose(ec: EnergyCoefficients) -> EnergyDecomposition:
    fac = utdu_factorize(ec.gamma, repair=True)
    assert fac.success and fac.U is not None and fac.d is not None
    return EnergyDecomposition(fac.delta, fac.d, fac.U, ec.beta)


def nsd_prefix_length(gamma: RationalMatrix) -> int:
    """Largest rho such that the leading rho-by-rho block of gamma is NSD."""
    rho = 0
    for k in range(1, gamma.rows + 1):
        if not is_negative_semidefinite(gamma.leading(k)):
            break
        rho = k
    return rho


def classify(ec: EnergyCoefficients, dec: EnergyDecomposition | None = None) -> StabilityReport:
    beta = ec.beta
    zeta = next((k for k, b in enumerate(beta) if b != 0), math.inf)
    sign = 0 if zeta == math.inf else (1 if beta[zeta] > 0 else -1)
    rho = nsd_prefix_length(ec.gamma)
    kappa = 2 * rho + 1 if zeta == math.inf else min(2 * zeta, 2 * rho + 1)
    gamma_nsd = rho == ec.gamma.rows
    if dec is not None:
        # a zero shift is exactly the NSD case; the two routes must agree
        assert gamma_nsd == all(d == 0 for d in dec.delta)

    if all(b <= 0 for b in beta) and gamma_nsd:
        kind = UNCONDITIONALLY_STRONG
    elif sign < 0 and zeta <= rho:
        kind = CONDITIONALLY_STRONG
    elif sign > 0:
        kind = NOT_STRONGLY_STABLE
    else:
        kind = WEAK_ONLY
    return StabilityReport(zeta, sign, rho, kappa, kind)


@dataclass(frozen=True)
class EnergyTerm:
    """One term  sign * coefficient * tau^p * |L^k (sum_j poly_j (tau L)^j) w|^2.

    ``kind`` is ``"norm"`` for ||.||^2 and ``"seminorm"`` for the L-induced
    semi-norm.
    """

    kind: str
    sign: int
    coefficient: Fraction
    tau_power: int
    operator_power: int
    polynomial: tuple[Fraction, ...]

    def as_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "sign": self.sign,
            "coefficient": format_rational(self.coefficient),
            "tau_power": self.tau_power,
            "operator_power": self.operator_power,
            "polynomial": [format_rational(c) for c in self.polynomial],
        }


def energy_law_terms(sf: StabilityFunction, ec: EnergyCoefficients,
                     dec: EnergyDecomposition) -> list[EnergyTerm]:
    terms = []
    one = (Fraction(1),)
    for k, b in enumerate(ec.beta):
        if b != 0:
            terms.append(EnergyTerm("norm", 1 if b > 0 else -1, abs(b), 2 * k, k, one))
    s = sf.s
    for k, d in enumerate(dec.d_tilde):
        if d != 0:
            poly = tuple(dec.U_tilde[k, j] for j in range(k, s))
            while len(poly) > 1 and poly[-1] == 0:
                poly = poly[:-1]
            terms.append(EnergyTerm("seminorm", -1, d, 2 * k + 1, k, poly))
    for k, dl in enumerate(dec.delta):
        if dl != 0:
            terms.append(EnergyTerm("seminorm", 1, dl, 2 * k + 1, k, one))
    return terms


_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _power(symbol: str, p: int) -> str:
    if p == 0:
        return ""
    return symbol if p == 1 else symbol + str(p).translate(_SUP)


def _coef(c: Fraction) -> str:
    if c == 1:
        return ""
    if c.denominator == 1:
        return str(c.numerator)
    return f"({format_rational(c)})"


def _operand(term: EnergyTerm, var: str) -> str:
    inner = var
    if len(term.polynomial) > 1:
        parts = []
        for j, c in enumerate(term.polynomial):
            if c == 0:
                continue
            mono = "I" if j == 0 else _power("τ", j) + _power("L", j)
            piece = mono if abs(c) == 1 else _coef(abs(c)) + mono
            parts.append((c < 0, piece))
        text = ("−" if parts[0][0] else "") + parts[0][1]
        for neg, piece in parts[1:]:
            text += (" − " if neg else " + ") + piece
        inner = f"({text}){var}"
    return _power("L", term.operator_power) + inner


def render_energy_law(terms: list[EnergyTerm], var: str = "w") -> str:
    """Pretty-print the right-hand side, e.g. ``−τ|w|²* − (1/16)τ³|Lw|²*``."""
    if not terms:
        return "0"
    out = ""
    for n, t in enumerate(terms):
        if t.kind == "norm":
            body = f"‖{_operand(t, var)}‖²"
        else:
            body = f"|{_operand(t, var)}|²*"
        piece = _coef(t.coefficient) + _power("τ", t.tau_power) + body
        if n == 0:
            out = ("−" if t.sign < 0 else "") + piece
        else:
            out += (" − " if t.sign < 0 else " + ") + piece
    return out


@dataclass(frozen=True)
class EnergyAnalysis:
    sf: StabilityFunction
    coefficients: EnergyCoefficients
    decomposition: EnergyDecomposition
    report: StabilityReport
    terms: list[EnergyTerm]

    def to_json(self) -> dict[str, Any]:
        r = self.report
        return {
            "method": self.sf.name,
            "s": self.sf.s,
            "theta": [format_rational(v) for v in self.sf.theta],
            "vartheta": [format_rational(v) for v in self.sf.vartheta],
            "alpha": self.coefficients.alpha.to_strings(),
            "beta": [format_rational(v) for v in self.coefficients.beta],
            "gamma": self.coefficients.gamma.to_strings(),
            "delta": [format_rational(v) for v in self.decomposition.delta],
            "d_tilde": [format_rational(v) for v in self.decomposition.d_tilde],
            "u_tilde": self.decomposition.U_tilde.to_strings(),
            "zeta": "inf" if r.zeta == math.inf else r.zeta,
            "rho": r.rho,
            "kappa": r.kappa,
            "classification": r.classification,
            "energy_law": render_energy_law(self.terms),
            "terms": [t.as_dict() for t in self.terms],
        }


def analyze(sf: StabilityFunction) -> EnergyAnalysis:
    ec = beta_gamma(sf)
    dec = decompose(ec)
    return EnergyAnalysis(sf, ec, dec, classify(ec, dec), energy_law_terms(sf, ec, dec))
