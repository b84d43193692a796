"""Double-precision time stepping and energy bookkeeping on concrete systems.

Everything here is floating point.  The exact coefficients from
:mod:`rkenergy.methods` and :mod:`rkenergy.energy` are converted to doubles
once per method; the energy identity being checked is algebraic, so
agreement to roundoff is what the traces measure.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg

from .energy import EnergyDecomposition, beta_gamma, decompose
from .methods import StabilityFunction, make_pade


class SeminegativityError(ValueError):
    """L fails <Lv, v> <= 0 beyond the roundoff allowance."""


class StepFailure(RuntimeError):
    """Q(tau L) is singular or numerically singular."""


def operator_norm(L: np.ndarray, iterations: int = 100) -> float:
    """Spectral norm estimate from power iteration on L^T L."""
    L = np.asarray(L, dtype=float)
    if not L.size or not np.any(L):
        return 0.0
    v = np.ones(L.shape[1]) / math.sqrt(L.shape[1])
    # a fixed start vector could be orthogonal to the top singular vector
    v = v + 1e-3 * np.cos(np.arange(L.shape[1]))
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iterations):
        x = L.T @ (L @ v)
        nx = np.linalg.norm(x)
        if nx == 0.0:
            break
        v = x / nx
        est = math.sqrt(nx)
    return est


def seminegativity_margin(L: np.ndarray) -> float:
    """Largest eigenvalue of L + L^T."""
    L = np.asarray(L, dtype=float)
    return float(np.linalg.eigvalsh(L + L.T)[-1])


@dataclass(frozen=True)
class SeminegativeSystem:
    L: np.ndarray
    name: str = "custom"
    params: dict = field(default_factory=dict)
    margin: float = field(init=False)
    norm: float = field(init=False)

    def __post_init__(self) -> None:
        L = np.array(self.L, dtype=float)
        if L.ndim != 2 or L.shape[0] != L.shape[1]:
            raise ValueError(f"L must be square, got shape {L.shape}")
        if not np.all(np.isfinite(L)):
            raise ValueError("L has non-finite entries")
        L.setflags(write=False)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "norm", operator_norm(L))
        object.__setattr__(self, "margin", seminegativity_margin(L))
        tol = 1e-12 * self.norm
        if self.margin > tol:
            raise SeminegativityError(
                f"{self.name}: largest eigenvalue of L + L^T is {self.margin:.3e} > {tol:.3e}")

    @property
    def dim(self) -> int:
        return self.L.shape[0]


def as_system(L) -> SeminegativeSystem:
    return L if isinstance(L, SeminegativeSystem) else SeminegativeSystem(np.asarray(L, float))


def _seminorm_raw(L: np.ndarray, v: np.ndarray) -> float:
    return float(-2.0 * (v @ (L @ v)))


def semi_norm_sq(L, v) -> float:
    """|v|_*^2 = -2 <Lv, v>, with tiny negative roundoff clamped to zero."""
    L = L.L if isinstance(L, SeminegativeSystem) else np.asarray(L, dtype=float)
    v = np.asarray(v, dtype=float)
    val = _seminorm_raw(L, v)
    if val >= 0.0:
        return val
    norm = operator_norm(L)
    if val >= -1e-12 * norm * float(v @ v):
        return 0.0
    raise SeminegativityError(f"<Lv, v> = {-val / 2:.3e} > 0: L is not seminegative")


def _poly_in_matrix(coeffs: Sequence[float], Z: np.ndarray) -> np.ndarray:
    """Horner evaluation of sum_i c_i Z^i."""
    n = Z.shape[0]
    out = np.zeros_like(Z)
    for c in reversed(coeffs):
        out = out @ Z
        out[np.diag_indices(n)] += c
    return out


@dataclass
class Stepper:
    """Cached P(tau L) and LU factors of Q(tau L) for one (method, system, tau)."""

    sf: StabilityFunction
    system: SeminegativeSystem
    tau: float

    def __post_init__(self) -> None:
        Z = self.tau * self.system.L
        self.P = _poly_in_matrix([float(c) for c in self.sf.theta], Z)
        Q = _poly_in_matrix([float(c) for c in self.sf.vartheta], Z)
        self.Q = Q
        lam = self.tau * self.system.norm
        with warnings.catch_warnings():
            # singularity is reported below as a StepFailure
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(Q, check_finite=True)
        # compare each pivot against the scale of the matching row of Q
        scale = np.max(np.abs(Q), axis=1)[piv] if Q.size else np.ones(0)
        rows = np.abs(np.diag(lu))
        if np.any(rows < 1e-14 * np.maximum(scale, np.finfo(float).tiny)):
            raise StepFailure(f"Q(tau L) is numerically singular at tau*||L|| = {lam:.6g}")
        self._lu = (lu, piv)

    def solve_q(self, v: np.ndarray) -> np.ndarray:
        return scipy.linalg.lu_solve(self._lu, v)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        return self.solve_q(self.P @ u)


def step(sf: StabilityFunction, sys, tau: float, u) -> np.ndarray:
    """One step u' = Q(tau L)^{-1} P(tau L) u."""
    return Stepper(sf, as_system(sys), float(tau))(np.asarray(u, dtype=float))


@dataclass(frozen=True)
class _FloatLaw:
    beta: np.ndarray
    d: np.ndarray
    delta: np.ndarray
    U: np.ndarray

    @classmethod
    def from_decomposition(cls, dec: EnergyDecomposition) -> "_FloatLaw":
        return cls(np.array([float(b) for b in dec.beta]),
                   np.array([float(v) for v in dec.d_tilde]),
                   np.array([float(v) for v in dec.delta]),
                   dec.U_tilde.to_float())


def _drop_from_w(law: _FloatLaw, L: np.ndarray, tau: float, w: np.ndarray) -> float:
    s = len(law.beta) - 1
    powers = [w]
    for _ in range(s):
        powers.append(L @ powers[-1])
    # scaled[j] = (tau L)^j w
    scaled = [tau ** j * p for j, p in enumerate(powers)]
    change = sum(law.beta[k] * float(scaled[k] @ scaled[k]) for k in range(s + 1))
    for k in range(s):
        uk = sum(law.U[k, j] * scaled[j - k] for j in range(k, s))
        Lk_uk = uk
        for _ in range(k):
            Lk_uk = L @ Lk_uk
        change -= law.d[k] * tau ** (2 * k + 1) * _seminorm_raw(L, Lk_uk)
        change += law.delta[k] * tau ** (2 * k + 1) * _seminorm_raw(L, powers[k])
    return -change


def theoretical_drop(sf: StabilityFunction, dec: EnergyDecomposition | None, sys,
                     tau: float, u) -> float:
    """E_n - E_{n+1} predicted by the shifted-decomposition energy law."""
    sys = as_system(sys)
    dec = decompose(beta_gamma(sf)) if dec is None else dec
    w = Stepper(sf, sys, float(tau)).solve_q(np.asarray(u, dtype=float))
    return _drop_from_w(_FloatLaw.from_decomposition(dec), sys.L, float(tau), w)


@dataclass(frozen=True)
class TraceRecord:
    n: int
    t: float
    energy: float
    measured_drop: float
    theoretical_drop: float

    @property
    def rel_gap(self) -> float:
        scale = max(self.energy, self.energy - self.measured_drop)
        if scale == 0.0:
            return 0.0 if self.measured_drop == self.theoretical_drop else math.inf
        return abs(self.measured_drop - self.theoretical_drop) / scale


@dataclass(frozen=True)
class EnergyTrace:
    method: str
    system: str
    tau: float
    records: tuple[TraceRecord, ...]
    final_state: np.ndarray

    @property
    def max_rel_gap(self) -> float:
        return max((r.rel_gap for r in self.records), default=0.0)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            write_trace_csv(self, fh)


def _sci(x: float) -> str:
    return f"{x:.16e}"


def write_trace_csv(trace: EnergyTrace, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "t", "energy", "measured_drop", "theoretical_drop", "rel_gap"])
    for r in trace.records:
        w.writerow([r.n, _sci(r.t), _sci(r.energy), _sci(r.measured_drop),
                    _sci(r.theoretical_drop), _sci(r.rel_gap)])


def energy_trace(sf: StabilityFunction, sys, tau: float, n_steps: int, u0,
                 dec: EnergyDecomposition | None = None) -> EnergyTrace:
    sys = as_system(sys)
    tau = float(tau)
    stepper = Stepper(sf, sys, tau)
    law = _FloatLaw.from_decomposition(decompose(beta_gamma(sf)) if dec is None else dec)
    u = np.array(u0, dtype=float)
    records = []
    for n in range(n_steps):
        w = stepper.solve_q(u)
        u_next = stepper.solve_q(stepper.P @ u)
        e_now = float(u @ u)
        measured = float((u - u_next) @ (u + u_next))
        records.append(TraceRecord(n, n * tau, e_now, measured,
                                   _drop_from_w(law, sys.L, tau, w)))
        u = u_next
    return EnergyTrace(sf.name, sys.name, tau, tuple(records), u)


def matrix_exponential(L, t: float = 1.0) -> np.ndarray:
    """exp(t L) by scaling and squaring with the (13, 13) Padé approximant."""
    A = float(t) * np.asarray(L, dtype=float)
    n = A.shape[0]
    norm1 = np.max(np.sum(np.abs(A), axis=0)) if n else 0.0
    squarings = 0
    if norm1 > 0.5:
        squarings = max(0, math.ceil(math.log2(norm1 / 0.5)))
    A = A / 2.0 ** squarings
    sf = _PADE13
    P = _poly_in_matrix(sf[0], A)
    Q = _poly_in_matrix(sf[1], A)
    E = np.linalg.solve(Q, P)
    for _ in range(squarings):
        E = E @ E
    return E


_pade13 = make_pade(13, 13)
_PADE13 = ([float(c) for c in _pade13.theta], [float(c) for c in _pade13.vartheta])


def _periodic_bidiagonal(n: int, diag: float) -> np.ndarray:
    M = diag * np.eye(n)
    M[np.arange(1, n), np.arange(n - 1)] = 1.0
    M[0, n - 1] = 1.0
    return M


def dg_advection_matrix(n_cells: int) -> np.ndarray:
    dx = 1.0 / n_cells
    L1 = _periodic_bidiagonal(n_cells, -1.0)
    L2 = _periodic_bidiagonal(n_cells, 1.0)
    r3 = math.sqrt(3.0)
    top = np.hstack([L1, r3 * L1])
    bottom = np.hstack([r3 * (2.0 * np.eye(n_cells) - L2), -3.0 * L2])
    return np.vstack([top, bottom]) / dx


def ldg_dispersion_matrix(n_cells: int) -> np.ndarray:
    dx = 1.0 / n_cells
    L1 = _periodic_bidiagonal(n_cells, -1.0)
    return L1 @ L1.T @ L1.T / dx ** 3


EXAMPLE1 = -np.array([[1.0, 2.0, 2.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]])
EXAMPLE1_U0 = np.array([0.9134, 0.2785, 0.5469])
SKEW2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

SYSTEM_NAMES = ("example1", "dg-advection", "ldg-dispersion", "skew2")


def example_system(name: str, n_cells: int = 20) -> SeminegativeSystem:
    if name == "example1":
        return SeminegativeSystem(EXAMPLE1, name)
    if name == "skew2":
        return SeminegativeSystem(SKEW2, name)
    if name == "dg-advection":
        return SeminegativeSystem(dg_advection_matrix(n_cells), name, {"n_cells": n_cells})
    if name == "ldg-dispersion":
        return SeminegativeSystem(ldg_dispersion_matrix(n_cells), name, {"n_cells": n_cells})
    raise LookupError(f"unknown system {name!r}; valid names: {', '.join(SYSTEM_NAMES)}")


def example_initial_state(system: SeminegativeSystem) -> np.ndarray:
    """Initial vectors used for the built-in systems.

    dg-advection: exact cell averages of sin(2 pi x) in the first block, zero
    slopes.  ldg-dispersion: exact cell averages of cos(2 pi x).
    """
    if system.name == "example1":
        return EXAMPLE1_U0.copy()
    if system.name == "skew2":
        return np.array([1.0, 0.0])
    n = system.params.get("n_cells", 20)
    edges = np.linspace(0.0, 1.0, n + 1)
    dx = 1.0 / n
    two_pi = 2.0 * math.pi
    if system.name == "dg-advection":
        avg = (np.cos(two_pi * edges[:-1]) - np.cos(two_pi * edges[1:])) / (two_pi * dx)
        return np.concatenate([avg, np.zeros(n)])
    if system.name == "ldg-dispersion":
        return (np.sin(two_pi * edges[1:]) - np.sin(two_pi * edges[:-1])) / (two_pi * dx)
    raise LookupError(f"no default initial state for system {system.name!r}")


def random_seminegative(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random L = K - B^T B with K skew-symmetric; not normal in general."""
    A = rng.standard_normal((dim, dim))
    B = rng.standard_normal((dim, dim)) * rng.uniform(0.0, 1.0)
    return (A - A.T) / 2.0 - B.T @ B / dim


@dataclass(frozen=True)
class ConvergenceRow:
    tau: float
    l2_error: float
    order: float
    delta_E: float
    de_order: float


def convergence_study(sf: StabilityFunction, sys, u0, T: float,
                      taus: Sequence[float]) -> list[ConvergenceRow]:
    """Errors at time T against exp(T L) u0, with orders from successive log2 ratios.

    Orders are computed as log(e_prev / e) / log(tau_prev / tau) so that
    non-halving tau sequences are still handled.
    """
    sys = as_system(sys)
    u0 = np.asarray(u0, dtype=float)
    exact = matrix_exponential(sys.L, T) @ u0
    rows = []
    prev = None
    for tau in taus:
        n = round(T / tau)
        if n < 1 or abs(n * tau - T) > 1e-9 * max(1.0, abs(T)):
            raise ValueError(f"T = {T} is not a multiple of tau = {tau}")
        stepper = Stepper(sf, sys, float(tau))
        u = u0.copy()
        for _ in range(n):
            u = stepper(u)
        err = float(np.linalg.norm(u - exact))
        # ||exact||^2 - ||u||^2 written as a product to avoid cancellation
        de = abs(float((exact - u) @ (exact + u)))
        if prev is None:
            order = de_order = math.nan
        else:
            r = math.log(prev[0] / tau)
            order = math.log(prev[1] / err) / r if err > 0 and prev[1] > 0 else math.nan
            de_order = math.log(prev[2] / de) / r if de > 0 and prev[2] > 0 else math.nan
        rows.append(ConvergenceRow(float(tau), err, order, de, de_order))
        prev = (tau, err, de)
    return rows


def write_convergence_csv(rows: Sequence[ConvergenceRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["tau", "l2_error", "order", "delta_E", "de_order"])
    for r in rows:
        w.writerow([_sci(r.tau), _sci(r.l2_error), _sci(r.order), _sci(r.delta_E),
                    _sci(r.de_order)])
