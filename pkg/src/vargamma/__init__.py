"""Variance-Gamma model toolkit.

Laplace and VG distributions, parameter estimation and likelihood-ratio
testing on log returns, Gamma-subordinated Brownian motion simulation, and
Esscher-transform risk-neutral European call pricing with Black-Scholes as
the nested nu -> 0 case.
"""
from . import distributions, estimators, io, numerics, processes, risk_neutral
from .errors import VargammaError

__all__ = [
    "distributions",
    "estimators",
    "io",
    "numerics",
    "processes",
    "risk_neutral",
    "VargammaError",
]

__version__ = "0.1.0"
