"""Fractional growth models: exponential, logistic, and logistic with periodic harvesting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .caputo import check_alpha
from .specialfn import mittag_leffler
from .training import ProblemSpec

__all__ = [
    "GrowthParams",
    "MODEL_NAMES",
    "exponential_model",
    "logistic_model",
    "harvested_logistic_model",
    "make_model",
]

MODEL_NAMES = ("exp", "logistic", "harvest")


@dataclass(frozen=True)
class GrowthParams:
    """Growth rate ``a``, carrying capacity ``N``, harvesting amplitude ``b`` and ``u0``."""

    a: float = 1.0
    N: float = 1.0
    b: float = 0.0
    u0: float = 1.0

    def __post_init__(self) -> None:
        for name in ("a", "N", "b", "u0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.N <= 0:
            raise ValueError(f"carrying capacity N must be positive, got {self.N!r}")
        if self.b < 0:
            raise ValueError(f"harvesting amplitude b must be nonnegative, got {self.b!r}")


def exponential_model(a: float, u0: float, alpha: float) -> ProblemSpec:
    """``D^alpha u = a u`` with exact solution ``u0 E_alpha(a t^alpha)``."""
    alpha = check_alpha(alpha)
    a, u0 = float(a), float(u0)

    def rhs(u, t):
        return a * u

    def drhs_du(u, t):
        return np.full_like(np.asarray(u, dtype=float), a)

    def exact(t):
        t = np.asarray(t, dtype=float)
        return u0 * mittag_leffler(alpha, a * t**alpha)

    return ProblemSpec(
        rhs=rhs,
        drhs_du=drhs_du,
        u0=u0,
        alpha=alpha,
        label="exp",
        exact=exact,
        params=GrowthParams(a=a, u0=u0),
    )


def _logistic_terms(a: float, N: float):
    def growth(u):
        return a * u * (1.0 - u / N)

    def dgrowth(u):
        return a * (1.0 - 2.0 * np.asarray(u, dtype=float) / N)

    return growth, dgrowth


def logistic_model(a: float, N: float, u0: float, alpha: float) -> ProblemSpec:
    """``D^alpha u = a u (1 - u/N)``; a closed-form solution is attached only for ``alpha = 1``."""
    alpha = check_alpha(alpha)
    params = GrowthParams(a=float(a), N=float(N), u0=float(u0))
    a, N, u0 = params.a, params.N, params.u0
    growth, dgrowth = _logistic_terms(a, N)

    exact = None
    if alpha == 1.0:

        def exact(t):
            e = np.exp(a * np.asarray(t, dtype=float))
            return N * u0 * e / (N + u0 * (e - 1.0))

    return ProblemSpec(
        rhs=lambda u, t: growth(u),
        drhs_du=lambda u, t: dgrowth(u),
        u0=u0,
        alpha=alpha,
        label="logistic",
        exact=exact,
        params=params,
    )


def harvested_logistic_model(a: float, N: float, b: float, u0: float, alpha: float) -> ProblemSpec:
    """``D^alpha u = a u (1 - u/N) - b (1 + sin(2 pi t))``. No exact solution."""
    alpha = check_alpha(alpha)
    params = GrowthParams(a=float(a), N=float(N), b=float(b), u0=float(u0))
    a, N, b, u0 = params.a, params.N, params.b, params.u0
    growth, dgrowth = _logistic_terms(a, N)

    def rhs(u, t):
        return growth(u) - b * (1.0 + np.sin(2.0 * np.pi * np.asarray(t, dtype=float)))

    return ProblemSpec(
        rhs=rhs,
        drhs_du=lambda u, t: dgrowth(u),
        u0=u0,
        alpha=alpha,
        label="harvest",
        exact=None,
        params=params,
    )


def make_model(name: str, params: GrowthParams, alpha: float) -> ProblemSpec:
    """Build a model by its CLI name (``exp``, ``logistic`` or ``harvest``)."""
    if name == "exp":
        return exponential_model(params.a, params.u0, alpha)
    if name == "logistic":
        return logistic_model(params.a, params.N, params.u0, alpha)
    if name == "harvest":
        return harvested_logistic_model(params.a, params.N, params.b, params.u0, alpha)
    raise ValueError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
