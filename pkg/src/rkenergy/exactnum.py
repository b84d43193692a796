"""Exact rational scalars, combinatorics and dense rational linear algebra.

Scalars are :class:`fractions.Fraction`, which is always stored in lowest
terms with a positive denominator.  :class:`RationalMatrix` is a small
immutable row-major container on top of it; it is not meant to compete with
a CAS, only to hold the handful of s-by-s matrices this package works with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction, str]


class ContractViolation(ValueError):
    """Raised when an input breaks an operation's precondition."""


def to_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction.  Floats are rejected on purpose."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError(f"refusing to convert float {value!r} to an exact rational")
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    return Fraction(text)


def factorial(n: int) -> Fraction:
    if n < 0:
        raise ContractViolation(f"factorial of negative integer {n}")
    return Fraction(math.factorial(n))


def binomial(n: int, k: int) -> Fraction:
    """C(n, k), with the convention C(n, k) = 0 outside 0 <= k <= n."""
    if n < 0:
        raise ContractViolation(f"binomial with negative n={n}")
    if k < 0 or k > n:
        return Fraction(0)
    return Fraction(math.comb(n, k))


def rising_factorial(x: RationalLike, n: int) -> Fraction:
    """Pochhammer symbol (x)_n = x (x+1) ... (x+n-1), with (x)_0 = 1."""
    if n < 0:
        raise ContractViolation(f"rising factorial with negative length {n}")
    x = to_rational(x)
    out = Fraction(1)
    for k in range(n):
        out *= x + k
        if out == 0:
            break
    return out


def falling_factorial(x: RationalLike, n: int) -> Fraction:
    """x (x-1) ... (x-n+1)."""
    if n < 0:
        raise ContractViolation(f"falling factorial with negative length {n}")
    x = to_rational(x)
    out = Fraction(1)
    for k in range(n):
        out *= x - k
    return out


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ContractViolation("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ContractViolation(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix")
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "RationalMatrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if n else 0
        if any(len(r) != m for r in rows):
            raise ContractViolation("ragged rows")
        return cls(n, m, tuple(to_rational(v) for r in rows for v in r))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Iterable[RationalLike]) -> "RationalMatrix":
        values = [to_rational(v) for v in values]
        n = len(values)
        return cls(n, n, tuple(values[i] if i == j else Fraction(0)
                               for i in range(n) for j in range(n)))

    @classmethod
    def from_function(cls, rows: int, cols: int, fn) -> "RationalMatrix":
        return cls(rows, cols, tuple(Fraction(fn(i, j))
                                     for i in range(rows) for j in range(cols)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(index)
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols])
                for i in range(self.rows)]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def diagonal(self) -> tuple[Fraction, ...]:
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))

    def leading(self, k: int) -> "RationalMatrix":
        """Leading principal k-by-k submatrix."""
        return RationalMatrix.from_function(k, k, lambda i, j: self[i, j])

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix.from_function(self.cols, self.rows, lambda i, j: self[j, i])

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        return RationalMatrix(self.rows, self.cols,
                              tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        return RationalMatrix(self.rows, self.cols,
                              tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c: RationalLike) -> "RationalMatrix":
        c = to_rational(c)
        return RationalMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ContractViolation(f"cannot multiply {self.shape} by {other.shape}")
        a = self.to_rows()
        bt = other.T.to_rows()
        return RationalMatrix(self.rows, other.cols, tuple(
            sum((x * y for x, y in zip(ra, cb)), Fraction(0)) for ra in a for cb in bt))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i))

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def is_unit_upper_triangular(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == (1 if i == j else 0)
            for i in range(self.rows) for j in range(self.cols) if j <= i)

    def to_float(self):
        import numpy as np
        return np.array([[float(v) for v in r] for r in self.to_rows()], dtype=float)

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(v) for v in r] for r in self.to_rows()]

    def _same_shape(self, other: "RationalMatrix") -> None:
        if self.shape != other.shape:
            raise ContractViolation(f"shape mismatch {self.shape} vs {other.shape}")

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(format_rational(v) for v in r)
                               for r in self.to_rows()) + "]"


def as_matrix(S: RationalMatrix | Sequence[Sequence[RationalLike]]) -> RationalMatrix:
    return S if isinstance(S, RationalMatrix) else RationalMatrix.from_rows(S)


@dataclass(frozen=True)
class UtduFactorization:
    """Result of :func:`utdu_factorize`.

    On success ``S - diag(delta) == -U.T @ diag(d) @ U``.  ``U`` and ``d`` are
    ``None`` when ``success`` is false.
    """

    U: RationalMatrix | None
    d: tuple[Fraction, ...] | None
    delta: tuple[Fraction, ...]
    success: bool


def utdu_factorize(S: RationalMatrix | Sequence[Sequence[RationalLike]],
                   repair: bool = False) -> UtduFactorization:
    """Factor a symmetric S as ``S - diag(delta) = -U^T D U``.

    Plain symmetric elimination of ``M = -S`` with no pivoting.  With
    ``repair=False`` the factorization fails (``success=False``) as soon as a
    pivot is negative, or zero with a nonzero remaining row.  With
    ``repair=True`` each offending pivot is lifted greedily by a diagonal shift:
    to exactly 0 when the rest of its row is zero, and to 1 otherwise.
    """
    S = as_matrix(S)
    if not S.is_symmetric():
        raise ContractViolation("utdu_factorize needs a square symmetric matrix")
    n = S.rows
    # Schur complement of -S, updated in place (upper triangle only is read)
    M = [[-v for v in r] for r in S.to_rows()]
    U = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    d = [Fraction(0)] * n
    delta = [Fraction(0)] * n

    for k in range(n):
        p = M[k][k]
        row_is_zero = all(M[k][j] == 0 for j in range(k + 1, n))
        if p > 0:
            pass
        elif row_is_zero:
            if p < 0:
                if not repair:
                    return UtduFactorization(None, None, tuple(delta), False)
                delta[k] = -p
            d[k] = Fraction(0)
            continue
        else:
            if not repair:
                return UtduFactorization(None, None, tuple(delta), False)
            delta[k] = 1 - p
            p = Fraction(1)
        d[k] = p
        for j in range(k + 1, n):
            U[k][j] = M[k][j] / p
        for i in range(k + 1, n):
            if M[k][i] == 0:
                continue
            for j in range(i, n):
                M[i][j] -= M[k][i] * U[k][j]
                M[j][i] = M[i][j]

    return UtduFactorization(RationalMatrix.from_rows(U), tuple(d), tuple(delta), True)


def is_negative_semidefinite(S: RationalMatrix | Sequence[Sequence[RationalLike]]) -> bool:
    """Exact test that -S is positive semidefinite."""
    return utdu_factorize(S, repair=False).success


def utdu_product(U: RationalMatrix, d: Sequence[RationalLike]) -> RationalMatrix:
    """``U^T diag(d) U``."""
    return U.T @ RationalMatrix.diag(d) @ U


def bareiss_determinant(rows: Sequence[Sequence[RationalLike]]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination with row swaps.

    Works on rational input by clearing denominators first, so all
    intermediate quantities are integers.
    """
    A = [[to_rational(v) for v in r] for r in rows]
    n = len(A)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in A):
        raise ContractViolation("determinant of a non-square matrix")
    scale = Fraction(1)
    M: list[list[int]] = []
    for r in A:
        den = math.lcm(*(v.denominator for v in r))
        scale /= den
        M.append([int(v * den) for v in r])

    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * Fraction(M[n - 1][n - 1]) * scale


def lagrange_coefficients(nodes: Sequence[RationalLike],
                          values: Sequence[RationalLike]) -> list[Fraction]:
    """Monomial coefficients (low to high) of the interpolating polynomial."""
    xs = [to_rational(x) for x in nodes]
    ys = [to_rational(y) for y in values]
    if len(set(xs)) != len(xs):
        raise ContractViolation("interpolation nodes must be distinct")
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        # basis numerator prod_{m != i} (z - x_m), built up in monomial form
        basis = [Fraction(1)]
        denom = Fraction(1)
        for m, xm in enumerate(xs):
            if m == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xm * basis[t + 1]
            denom *= xi - xm
        w = yi / denom
        for t, b in enumerate(basis):
            coeffs[t] += w * b
    return coeffs
