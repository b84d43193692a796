"""Exact energy laws for Runge-Kutta stability functions on linear seminegative systems."""

from .energy import analyze, beta_gamma, classify, decompose
from .methods import StabilityFunction, builtin, from_butcher, make_pade, make_taylor

__all__ = [
    "StabilityFunction", "analyze", "beta_gamma", "builtin", "classify", "decompose",
    "from_butcher", "make_pade", "make_taylor",
]
