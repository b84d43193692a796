"""Stability functions R(z) = Q(z)^{-1} P(z) with exact rational coefficients.

A :class:`StabilityFunction` carries the numerator coefficients ``theta``
and denominator coefficients ``vartheta``, both padded with zeros to a common
length ``s + 1``.  They can be built from Padé or Taylor formulas, from a
Butcher tableau, or looked up by name::

    >>> builtin("crank-nicolson").theta
    (Fraction(1, 1), Fraction(1, 2))
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .exactnum import (
    ContractViolation,
    RationalLike,
    RationalMatrix,
    bareiss_determinant,
    format_rational,
    lagrange_coefficients,
    parse_rational,
    to_rational,
)


def _trim(coeffs: Sequence[Fraction]) -> list[Fraction]:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


@dataclass(frozen=True)
class StabilityFunction:
    theta: tuple[Fraction, ...]
    vartheta: tuple[Fraction, ...]
    name: str = ""
    s_p: int = field(init=False)
    s_q: int = field(init=False)

    def __post_init__(self) -> None:
        p = _trim([to_rational(v) for v in self.theta])
        q = _trim([to_rational(v) for v in self.vartheta])
        if p[0] != 1 or q[0] != 1:
            raise ContractViolation(
                f"stability function must be normalized with theta_0 = vartheta_0 = 1, "
                f"got {p[0]} and {q[0]}")
        s = max(len(p), len(q)) - 1
        object.__setattr__(self, "s_p", len(p) - 1)
        object.__setattr__(self, "s_q", len(q) - 1)
        object.__setattr__(self, "theta", tuple(p + [Fraction(0)] * (s + 1 - len(p))))
        object.__setattr__(self, "vartheta", tuple(q + [Fraction(0)] * (s + 1 - len(q))))

    @property
    def s(self) -> int:
        return len(self.theta) - 1

    @property
    def is_explicit(self) -> bool:
        return self.s_q == 0

    def __call__(self, z: complex) -> complex:
        num = sum(c * z ** i for i, c in enumerate(map(float, self.theta)))
        den = sum(c * z ** i for i, c in enumerate(map(float, self.vartheta)))
        return num / den

    def describe(self) -> str:
        def poly(cs):
            terms = []
            for i, c in enumerate(cs):
                if c == 0:
                    continue
                mono = "" if i == 0 else ("Z" if i == 1 else f"Z^{i}")
                coef = format_rational(c)
                if mono and c == 1:
                    coef = ""
                elif mono and c == -1:
                    coef = "-"
                terms.append(f"{coef}{mono}" if mono else coef)
            return " + ".join(terms).replace("+ -", "- ")
        return f"R(Z) = ({poly(self.vartheta)})^-1 ({poly(self.theta)})"


@dataclass(frozen=True)
class ButcherTableau:
    A: RationalMatrix
    b: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.A.rows != self.A.cols or self.A.rows != len(self.b):
            raise ContractViolation(
                f"inconsistent tableau: A is {self.A.shape}, b has {len(self.b)} entries")
        object.__setattr__(self, "b", tuple(to_rational(v) for v in self.b))

    @property
    def stages(self) -> int:
        return len(self.b)

    @classmethod
    def from_lists(cls, A: Sequence[Sequence[RationalLike]],
                   b: Sequence[RationalLike]) -> "ButcherTableau":
        return cls(RationalMatrix.from_rows(A), tuple(to_rational(v) for v in b))


def make_pade(m: int, n: int) -> StabilityFunction:
    """(m, n) Padé approximant of exp: numerator degree m, denominator degree n."""
    if m < 0 or n < 0 or m + n < 1:
        raise ContractViolation(f"invalid Padé degrees ({m}, {n})")
    f = math.factorial
    theta = [Fraction(f(m + n - i) * f(m), f(m + n) * f(i) * f(m - i)) for i in range(m + 1)]
    vartheta = [Fraction((-1) ** i * f(m + n - i) * f(n), f(m + n) * f(i) * f(n - i))
                for i in range(n + 1)]
    return StabilityFunction(tuple(theta), tuple(vartheta), name=f"pade:{m},{n}")


def make_taylor(p: int) -> StabilityFunction:
    if p < 1:
        raise ContractViolation(f"Taylor order must be positive, got {p}")
    return StabilityFunction(tuple(Fraction(1, math.factorial(i)) for i in range(p + 1)),
                             (Fraction(1),), name=f"taylor:{p}")


def _det_polynomial(matrix_at, stages: int) -> list[Fraction]:
    nodes = [0]
    for k in range(1, stages + 1):
        nodes += [k, -k]
    values = [bareiss_determinant(matrix_at(Fraction(z))) for z in nodes]
    return _trim(lagrange_coefficients(nodes, values))


def from_butcher(t: ButcherTableau, name: str = "") -> StabilityFunction:
    """Exact stability function of an RK tableau.

    P(z) = det(I - zA + z 1 b^T) and Q(z) = det(I - zA), each recovered by
    exact interpolation through 2*stages + 1 integer nodes.
    """
    s = t.stages
    A = t.A.to_rows()

    def q_at(z):
        return [[int(i == j) - z * A[i][j] for j in range(s)] for i in range(s)]

    def p_at(z):
        return [[int(i == j) - z * A[i][j] + z * t.b[j] for j in range(s)] for i in range(s)]

    P = _det_polynomial(p_at, s)
    Q = _det_polynomial(q_at, s)
    # both determinants equal 1 at z = 0; divide anyway in case of a caller-built oddity
    return StabilityFunction(tuple(c / P[0] for c in P), tuple(c / Q[0] for c in Q),
                             name=name or f"butcher:{s}-stage")


QIN_ZHANG = ButcherTableau.from_lists(
    [["1/4", 0], ["1/2", "1/4"]], ["1/2", "1/2"])
KRAAIJEVANGER_SPIJKER = ButcherTableau.from_lists(
    [["1/2", 0], ["-1/2", 2]], ["-1/2", "3/2"])

_FIXED = {
    "euler-backward": lambda: StabilityFunction((Fraction(1),), (Fraction(1), Fraction(-1)),
                                                name="euler-backward"),
    "crank-nicolson": lambda: StabilityFunction((Fraction(1), Fraction(1, 2)),
                                                (Fraction(1), Fraction(-1, 2)),
                                                name="crank-nicolson"),
    "qin-zhang": lambda: from_butcher(QIN_ZHANG, name="qin-zhang"),
    "kraaijevanger-spijker": lambda: from_butcher(KRAAIJEVANGER_SPIJKER,
                                                  name="kraaijevanger-spijker"),
}

_PADE_RE = re.compile(r"pade:(\d+),(\d+)")
_TAYLOR_RE = re.compile(r"taylor:(\d+)")

VALID_NAMES = tuple(_FIXED) + ("pade:M,N", "taylor:P")


def builtin(name: str) -> StabilityFunction:
    """Look up a method by name: the four fixed schemes, ``pade:M,N`` or ``taylor:P``."""
    key = name.strip().lower()
    if key in _FIXED:
        return _FIXED[key]()
    if m := _PADE_RE.fullmatch(key):
        return make_pade(int(m.group(1)), int(m.group(2)))
    if m := _TAYLOR_RE.fullmatch(key):
        return make_taylor(int(m.group(1)))
    raise LookupError(f"unknown method {name!r}; valid names: {', '.join(VALID_NAMES)}")


def approximation_order(sf: StabilityFunction) -> int:
    """Largest p with Q(z) e^z - P(z) = O(z^{p+1}), searched up to 2s + 2."""
    theta, vartheta = sf.theta, sf.vartheta

    def coef(seq, i):
        return seq[i] if i < len(seq) else Fraction(0)

    order = 0
    for k in range(1, 2 * sf.s + 3):
        lhs = sum(coef(vartheta, l) / math.factorial(k - l) for l in range(k + 1))
        if lhs != coef(theta, k):
            break
        order = k
    return order


def read_butcher_file(path: str | Path) -> ButcherTableau:
    """Parse a plain-text tableau.

    Line 1 is the stage count, followed by the rows of A and then b, all as
    whitespace-separated rationals.  ``#`` starts a comment.
    """
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError(f"{path}: empty tableau file")
    try:
        stages = int(lines[0])
    except ValueError as exc:
        raise ValueError(f"{path}: first line must be the stage count") from exc
    if stages < 1 or len(lines) != stages + 2:
        raise ValueError(f"{path}: expected {stages + 2} non-comment lines, got {len(lines)}")
    rows = [[parse_rational(tok) for tok in line.split()] for line in lines[1:stages + 1]]
    b = [parse_rational(tok) for tok in lines[-1].split()]
    if any(len(r) != stages for r in rows) or len(b) != stages:
        raise ValueError(f"{path}: every row of A and b needs {stages} entries")
    return ButcherTableau(RationalMatrix.from_rows(rows), tuple(b))


def resolve(text: str) -> StabilityFunction:
    """Method name as accepted by the CLI: a builtin name or ``butcher:PATH``."""
    if text.startswith("butcher:"):
        path = text[len("butcher:"):]
        return from_butcher(read_butcher_file(path), name=f"butcher:{Path(path).name}")
    return builtin(text)
