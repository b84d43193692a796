"""Series expansion of the exact energy change of du/dt = Lu.

Over one interval of length tau,

    ||e^{tau L} u||^2 - ||u||^2 = -sum_k d_hat(k) tau^{2k+1} |L^k u^(k)|_*^2,
    u^(k) = sum_{j >= k} mu_hat(k, j) (tau L)^{j-k} u,

and the coefficient matrices satisfy -U^T diag(d_hat) U = H with H the
Hilbert-type matrix of :func:`hilbert_upsilon`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactnum import RationalMatrix, factorial, utdu_product
from .simulator import SeminegativityError, as_system, semi_norm_sq


def mu_hat(k: int, j: int) -> Fraction:
    if j < k:
        return Fraction(0)
    f = factorial
    return f(2 * k + 1) * f(j) / (f(k) * f(j - k) * f(k + j + 1))


def d_hat(k: int) -> Fraction:
    if k < 0:
        raise ValueError(f"d_hat needs k >= 0, got {k}")
    f = factorial
    return f(k) ** 2 / (f(2 * k) * f(2 * k + 1))


def hilbert_upsilon(N: int) -> RationalMatrix:
    f = factorial
    return RationalMatrix.from_function(
        N + 1, N + 1, lambda i, j: -1 / (f(i) * f(j) * (i + j + 1)))


@dataclass(frozen=True)
class ContinuumCoefficients:
    N: int
    d_hat: tuple[Fraction, ...]
    mu_hat: RationalMatrix

    @classmethod
    def build(cls, N: int) -> "ContinuumCoefficients":
        return cls(N, tuple(d_hat(k) for k in range(N + 1)),
                   RationalMatrix.from_function(N + 1, N + 1, mu_hat))


def verify_hilbert_cholesky(N: int) -> RationalMatrix:
    """H + U^T diag(d_hat) U; zero when the factorization is exact."""
    c = ContinuumCoefficients.build(N)
    return hilbert_upsilon(N) + utdu_product(c.mu_hat, c.d_hat)


def truncated_energy_series(L, u, tau: float, N: int, inner_order: int | None = None) -> float:
    """-sum_{k<=N} d_hat(k) tau^{2k+1} |L^k u_N^(k)|_*^2 in double precision.

    The inner sums defining u_N^(k) run up to ``inner_order`` (default N).
    Cutting them at N leaves a defect of order tau^{N+2}; a converged inner
    sum is needed to see the full tau^{2N+3} behaviour of the outer sum.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    M = N if inner_order is None else inner_order
    if M < N:
        raise ValueError(f"inner_order {M} must be at least N = {N}")
    sys = as_system(L)
    L = sys.L
    u = np.asarray(u, dtype=float)
    # scaled[m] = (tau L)^m u
    scaled = [u]
    for _ in range(M):
        scaled.append(tau * (L @ scaled[-1]))
    total = 0.0
    for k in range(N + 1):
        uk = sum(float(mu_hat(k, j)) * scaled[j - k] for j in range(k, M + 1))
        for _ in range(k):
            uk = L @ uk
        total -= float(d_hat(k)) * tau ** (2 * k + 1) * semi_norm_sq(L, uk)
    return total


__all__ = [
    "ContinuumCoefficients", "SeminegativityError", "d_hat", "hilbert_upsilon",
    "mu_hat", "truncated_energy_series", "verify_hilbert_cholesky",
]
