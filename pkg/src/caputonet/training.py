"""Trial function, residual loss through the discrete Caputo operator, and Adam training."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .caputo import CaputoWeights, Grid, apply, apply_transpose, build_weights, check_alpha
from .network import LayerSpec, NetworkParams, forward_and_vjp, forward_batch, init_params

__all__ = [
    "ProblemSpec",
    "TrainConfig",
    "AdamState",
    "SolutionTrace",
    "TrainingDivergedError",
    "trial_values",
    "residual",
    "loss",
    "sample_loss",
    "loss_gradient",
    "loss_and_gradient",
    "adam_step",
    "train",
]

logger = logging.getLogger(__name__)

# Below this the loss is treated as exactly zero and its gradient as zero.
LOSS_FLOOR = 1e-14


@dataclass(frozen=True)
class ProblemSpec:
    """Initial value problem ``D^alpha u = rhs(u, t)``, ``u(0) = u0``.

    ``drhs_du`` is the partial derivative of ``rhs`` in ``u``. ``exact``, when
    given, maps an array of times to the exact solution.
    """

    rhs: Callable[[Any, Any], Any]
    drhs_du: Callable[[Any, Any], Any]
    u0: float
    alpha: float
    label: str = "problem"
    exact: Optional[Callable[[Any], Any]] = None
    params: Any = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "u0", float(self.u0))


@dataclass(frozen=True)
class TrainConfig:
    spec: LayerSpec
    grid: Grid
    epochs: int = 20_000
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    normalize_input: bool = True

    def __post_init__(self) -> None:
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be a positive integer, got {self.epochs!r}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate!r}")
        for name in ("adam_beta1", "adam_beta2"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if not self.adam_eps > 0:
            raise ValueError("adam_eps must be positive")

    @property
    def input_scale(self) -> float:
        return 1.0 / self.grid.t_end if self.normalize_input else 1.0


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n), 0)


@dataclass
class SolutionTrace:
    nodes: np.ndarray
    u_hat: np.ndarray
    loss_history: np.ndarray
    final_loss: float
    extras: dict = field(default_factory=dict)


class TrainingDivergedError(FloatingPointError):
    def __init__(self, epoch: int, value: float):
        super().__init__(f"non-finite training loss ({value!r}) at epoch {epoch}")
        self.epoch = epoch
        self.value = value


def trial_values(params: NetworkParams, problem: ProblemSpec, grid: Grid) -> np.ndarray:
    """``g(t_n) = u0 + t_n * FANN(t_n)``; ``g[0] == u0`` exactly since ``t_0 = 0``."""
    t = grid.nodes
    g = problem.u0 + t * forward_batch(params, grid)
    g[0] = problem.u0
    return g


def _check_compatible(problem: ProblemSpec, weights: CaputoWeights) -> None:
    if weights.alpha != problem.alpha:
        raise ValueError(
            f"weights built for alpha={weights.alpha!r} but problem has alpha={problem.alpha!r}"
        )


def residual(params: NetworkParams, problem: ProblemSpec, weights: CaputoWeights) -> np.ndarray:
    """Residual ``D^alpha g - rhs(g, t)`` at nodes ``1..n-1`` (node 0 has no Caputo sum)."""
    _check_compatible(problem, weights)
    g = trial_values(params, problem, weights.grid)
    t = weights.grid.nodes
    return (apply(weights, g) - problem.rhs(g, t))[1:]


def loss(params: NetworkParams, problem: ProblemSpec, weights: CaputoWeights) -> float:
    """Root of the summed squared residual."""
    r = residual(params, problem, weights)
    return math.sqrt(float(r @ r))


def sample_loss(values, problem: ProblemSpec, weights: CaputoWeights) -> float:
    """The same loss evaluated on arbitrary samples instead of the trial function."""
    _check_compatible(problem, weights)
    t = weights.grid.nodes
    r = (apply(weights, values) - problem.rhs(np.asarray(values, dtype=float), t))[1:]
    return math.sqrt(float(r @ r))


def loss_and_gradient(
    params: NetworkParams, problem: ProblemSpec, weights: CaputoWeights
) -> tuple[float, np.ndarray]:
    _check_compatible(problem, weights)
    grid = weights.grid
    t = grid.nodes
    out, vjp = forward_and_vjp(params, grid)
    g = problem.u0 + t * out
    g[0] = problem.u0
    r = apply(weights, g) - problem.rhs(g, t)
    r[0] = 0.0
    value = math.sqrt(float(r @ r))
    if value < LOSS_FLOOR:
        return value, np.zeros_like(params.theta)
    c = r / value
    # dL/dg = (A^T - diag(f_u)) r / L, then dg/dFANN = t.
    dg = apply_transpose(weights, c) - problem.drhs_du(g, t) * c
    dg[0] = 0.0
    return value, vjp(t * dg)


def loss_gradient(params: NetworkParams, problem: ProblemSpec, weights: CaputoWeights) -> np.ndarray:
    return loss_and_gradient(params, problem, weights)[1]


def adam_step(
    state: AdamState, theta: np.ndarray, grad: np.ndarray, config: TrainConfig
) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update. Returns the new parameters and state."""
    theta = np.asarray(theta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if grad.shape != theta.shape or state.m.shape != theta.shape:
        raise ValueError(
            f"shape mismatch: theta {theta.shape}, grad {grad.shape}, moments {state.m.shape}"
        )
    b1, b2 = config.adam_beta1, config.adam_beta2
    step = state.step + 1
    m = b1 * state.m + (1.0 - b1) * grad
    v = b2 * state.v + (1.0 - b2) * grad * grad
    m_hat = m / (1.0 - b1**step)
    v_hat = v / (1.0 - b2**step)
    new_theta = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return new_theta, AdamState(m, v, step)


def train(
    problem: ProblemSpec,
    config: TrainConfig,
    log_every: int = 0,
) -> tuple[NetworkParams, SolutionTrace]:
    """Full-batch Adam on the residual loss.

    ``loss_history[e]`` is the loss of the parameters *before* update ``e``;
    ``final_loss`` is the loss of the returned parameters.
    """
    weights = build_weights(problem.alpha, config.grid)
    params = init_params(config.spec, config.seed, config.input_scale)
    theta = params.theta
    state = AdamState.zeros(theta.size)
    history = np.empty(config.epochs)
    # overflow is caught by the finiteness check below
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(config.epochs):
            value, grad = loss_and_gradient(params, problem, weights)
            if not (math.isfinite(value) and np.all(np.isfinite(grad))):
                raise TrainingDivergedError(epoch, value)
            history[epoch] = value
            theta, state = adam_step(state, theta, grad, config)
            params = params.with_theta(theta)
            if log_every and (epoch % log_every == 0 or epoch == config.epochs - 1):
                logger.info("%s alpha=%g epoch %d loss %.6e", problem.label, problem.alpha, epoch, value)
        final = loss(params, problem, weights)
    if not math.isfinite(final):
        raise TrainingDivergedError(config.epochs, final)
    trace = SolutionTrace(
        nodes=config.grid.nodes,
        u_hat=trial_values(params, problem, config.grid),
        loss_history=history,
        final_loss=final,
    )
    return params, trace
