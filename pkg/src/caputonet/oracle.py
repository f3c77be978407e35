"""Time-marching reference solver built on the same L1 weights as the training loss.

At step ``n`` the L1 equation

    scale * sum_{k=0}^{n-1} (u[k+1] - u[k]) delta[n, k] = f(u*, t_n)

is solved for ``u[n]``. Since ``delta[n, n-1] = 1`` this is

    u[n] = u[n-1] + f(u*, t_n) / scale - sum_{k=0}^{n-2} (u[k+1] - u[k]) delta[n, k]

with ``u* = u[n-1]`` (explicit) or ``u* = u[n]`` by fixed-point iteration (implicit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .caputo import Grid, build_weights
from .training import ProblemSpec

__all__ = [
    "SCHEMES",
    "OracleConfig",
    "OracleConvergenceError",
    "ConvergenceReport",
    "solve",
    "self_convergence",
]

SCHEMES = ("l1_explicit", "l1_implicit")


class OracleConvergenceError(ArithmeticError):
    def __init__(self, step: int, iterations: int, change: float):
        super().__init__(
            f"fixed-point iteration did not converge at step {step} "
            f"after {iterations} iterations (last change {change:.3e})"
        )
        self.step = step


@dataclass(frozen=True)
class OracleConfig:
    grid: Grid
    scheme: str = "l1_implicit"
    fixed_point_tol: float = 1e-12
    fixed_point_max_iter: int = 100

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if not self.fixed_point_tol > 0:
            raise ValueError("fixed_point_tol must be positive")
        if int(self.fixed_point_max_iter) != self.fixed_point_max_iter or self.fixed_point_max_iter < 1:
            raise ValueError("fixed_point_max_iter must be a positive integer")


def solve(problem: ProblemSpec, config: OracleConfig) -> np.ndarray:
    """March the L1 scheme across ``config.grid``; returns ``u`` at every node."""
    grid = config.grid
    weights = build_weights(problem.alpha, grid)
    delta, scale = weights.delta, weights.scale
    t = grid.nodes
    u = np.empty(grid.n_points)
    u[0] = problem.u0
    du = np.zeros(grid.n_points - 1)  # du[k] = u[k+1] - u[k]
    rhs = problem.rhs
    implicit = config.scheme == "l1_implicit"
    for n in range(1, grid.n_points):
        history = float(delta[n, : n - 1] @ du[: n - 1]) if n > 1 else 0.0
        base = u[n - 1] - history
        un = base + float(rhs(u[n - 1], t[n])) / scale
        if implicit:
            change = math.inf
            for _ in range(config.fixed_point_max_iter):
                nxt = base + float(rhs(un, t[n])) / scale
                change = abs(nxt - un)
                un = nxt
                if change <= config.fixed_point_tol * max(1.0, abs(un)):
                    break
            else:
                raise OracleConvergenceError(n, config.fixed_point_max_iter, change)
        u[n] = un
        du[n - 1] = un - u[n - 1]
    return u


@dataclass(frozen=True)
class ConvergenceReport:
    coarse_nodes: int
    fine_nodes: int
    max_discrepancy: float
    coarse: np.ndarray
    fine: np.ndarray


def self_convergence(problem: ProblemSpec, base_grid: Grid, scheme: str = "l1_implicit") -> ConvergenceReport:
    """Max discrepancy between the solutions on ``base_grid`` and its halving, at shared nodes."""
    coarse = solve(problem, OracleConfig(base_grid, scheme))
    fine_grid = base_grid.refined(2)
    fine = solve(problem, OracleConfig(fine_grid, scheme))
    gap = float(np.max(np.abs(coarse - fine[::2])))
    return ConvergenceReport(base_grid.n_points, fine_grid.n_points, gap, coarse, fine)
