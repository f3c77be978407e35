"""L1 discretisation of the Caputo derivative on a uniform grid.

For ``0 < alpha <= 1`` and nodes ``t_k = k h`` the operator at node ``n >= 1`` is

    D^alpha x(t_n) ~= scale * sum_{k=0}^{n-1} (x[k+1] - x[k]) * delta[n, k]

with ``delta[n, k] = (n-k)^(1-alpha) - (n-k-1)^(1-alpha)`` and
``scale = 1 / (h^alpha Gamma(2 - alpha))``. The local truncation error is
``O(h^(2-alpha))`` for smooth ``x``. At ``alpha = 1`` we take ``0^0 = 0`` so the
scheme is exactly the backward difference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .specialfn import gamma

__all__ = ["Grid", "CaputoWeights", "build_weights", "apply", "apply_transpose", "check_alpha"]


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    return alpha


@dataclass(frozen=True)
class Grid:
    """Uniform partition of ``[0, t_end]`` with ``n_points`` nodes (both ends included)."""

    t_end: float
    n_points: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError(f"t_end must be a positive finite number, got {self.t_end!r}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        object.__setattr__(self, "t_end", float(self.t_end))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def h(self) -> float:
        return self.t_end / (self.n_points - 1)

    @property
    def nodes(self) -> np.ndarray:
        # k*h rather than linspace so that nodes[k] is exactly k*h
        t = np.arange(self.n_points, dtype=float) * self.h
        t[-1] = self.t_end
        return t

    def refined(self, factor: int = 2) -> "Grid":
        """Same interval with the step divided by ``factor``."""
        return Grid(self.t_end, (self.n_points - 1) * factor + 1)


def _power_table(n_points: int, alpha: float) -> np.ndarray:
    """``m^(1-alpha)`` for ``m = 0..n_points-1`` with the convention ``0^0 = 0``."""
    m = np.arange(n_points, dtype=float)
    p = m ** (1.0 - alpha)
    p[0] = 0.0
    return p


@dataclass(frozen=True)
class CaputoWeights:
    """Precomputed L1 weights for one ``(alpha, grid)`` pair.

    ``delta[n, k]`` is stored as a dense lower-triangular array (zero for
    ``k >= n``). ``matrix`` is the equivalent operator acting directly on the
    samples, already multiplied by ``scale``; row 0 is zero.
    """

    alpha: float
    grid: Grid
    delta: np.ndarray = field(repr=False)
    scale: float
    matrix: np.ndarray = field(repr=False)

    def delta_row(self, n: int) -> np.ndarray:
        """``delta[n, 0..n-1]``."""
        return self.delta[n, :n]


def build_weights(alpha: float, grid: Grid) -> CaputoWeights:
    alpha = check_alpha(alpha)
    n = grid.n_points
    p = _power_table(n, alpha)
    rows = np.arange(n)[:, None]
    cols = np.arange(n)[None, :]
    lag = rows - cols  # n - k
    mask = lag >= 1
    delta = np.zeros((n, n))
    delta[mask] = p[lag[mask]] - p[lag[mask] - 1]
    scale = 1.0 / (grid.h**alpha * gamma(2.0 - alpha))

    # x[j] enters with coefficient delta[n, j-1] - delta[n, j].
    coeff = np.zeros((n, n))
    coeff[:, 1:] += delta[:, :-1]
    coeff -= delta
    coeff[0, :] = 0.0
    matrix = scale * coeff

    delta.setflags(write=False)
    matrix.setflags(write=False)
    return CaputoWeights(alpha=alpha, grid=grid, delta=delta, scale=scale, matrix=matrix)


def _check_length(weights: CaputoWeights, samples: np.ndarray) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    if x.shape != (weights.grid.n_points,):
        raise ValueError(
            f"expected {weights.grid.n_points} samples, got array of shape {x.shape}"
        )
    return x


def apply(weights: CaputoWeights, samples) -> np.ndarray:
    """Discrete Caputo derivative at every node.

    Entry 0 is an empty sum and is returned as 0; callers must not use it.
    """
    x = _check_length(weights, samples)
    diffs = np.diff(x)
    return weights.scale * (weights.delta[:, :-1] @ diffs)


def apply_transpose(weights: CaputoWeights, cotangent) -> np.ndarray:
    """Adjoint of :func:`apply`: returns ``A^T c`` for the operator matrix ``A``."""
    c = _check_length(weights, cotangent)
    return weights.matrix.T @ c
