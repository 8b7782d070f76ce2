import json

from . import _core
from ._core import (
    NumericalError,
    ValidationError,
    __version__,
    balanced_exponent,
    critical_exponent,
    default_epsilon,
    exact_roots,
)


def classify(p, m=1.0, s=0.0, theta=0.5, regime="cri", eps1=1e-3):
    """Existence case, loss of decay g and admissibility checks for an exponent triple."""
    return json.loads(_core._classify_json(list(p), m, s, theta, regime, eps1))


def simulate(p, theta=0.5, N=16, L=16 * 3.141592653589793, dt=0.05, T=2.0, delta=1e-3, t_ref=1.0, regime="cri"):
    """Run the periodic-box solver and return the verdict record."""
    return json.loads(_core._simulate_json(list(p), theta, N, L, dt, T, delta, t_ref, regime))


__all__ = [
    "NumericalError",
    "ValidationError",
    "__version__",
    "balanced_exponent",
    "classify",
    "critical_exponent",
    "default_epsilon",
    "exact_roots",
    "simulate",
]
