"""Scalar-in, scalar-out dense network with hand-written reverse mode."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .caputo import Grid

__all__ = [
    "ACTIVATIONS",
    "LayerSpec",
    "NetworkParams",
    "init_params",
    "forward",
    "forward_batch",
    "backward",
    "forward_and_vjp",
    "save_params",
    "load_params",
]


def _sigmoid(y):
    return 0.5 * (1.0 + np.tanh(0.5 * y))


# Each entry maps name -> (phi, dphi expressed through z = phi(y)).
ACTIVATIONS = {
    "sigmoid": (_sigmoid, lambda z: z * (1.0 - z)),
    "tanh": (np.tanh, lambda z: 1.0 - z * z),
    "identity": (lambda y: y, lambda z: np.ones_like(z)),
}


@dataclass(frozen=True)
class LayerSpec:
    """Layer widths ``[1, hidden..., 1]`` and the hidden-layer activation."""

    widths: tuple[int, ...]
    activation: str = "sigmoid"

    def __post_init__(self) -> None:
        widths = tuple(int(w) for w in self.widths)
        object.__setattr__(self, "widths", widths)
        if len(widths) < 3:
            raise ValueError("LayerSpec needs at least one hidden layer")
        if widths[0] != 1 or widths[-1] != 1:
            raise ValueError(f"input and output widths must be 1, got {list(widths)}")
        if any(w < 1 for w in widths):
            raise ValueError(f"widths must be positive, got {list(widths)}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(
                f"unknown activation {self.activation!r}; choose from {sorted(ACTIVATIONS)}"
            )

    @property
    def shapes(self) -> list[tuple[tuple[int, int], int]]:
        return [((a, b), b) for a, b in zip(self.widths[:-1], self.widths[1:])]

    @property
    def n_params(self) -> int:
        return sum(a * b + b for (a, b), _ in self.shapes)


class NetworkParams:
    """Weights and biases backed by one flat parameter vector.

    ``weights[j]`` has shape ``(fan_in, fan_out)`` so a layer computes
    ``y = x @ W + b``. The per-layer arrays are views into :attr:`theta`.
    ``input_scale`` multiplies ``t`` before it enters the first layer.
    """

    def __init__(self, spec: LayerSpec, theta, input_scale: float = 1.0):
        theta = np.array(theta, dtype=float)
        if theta.shape != (spec.n_params,):
            raise ValueError(f"theta must have shape ({spec.n_params},), got {theta.shape}")
        self.spec = spec
        self.theta = theta
        self.input_scale = float(input_scale)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        offset = 0
        for (fan_in, fan_out), nb in spec.shapes:
            self.weights.append(theta[offset : offset + fan_in * fan_out].reshape(fan_in, fan_out))
            offset += fan_in * fan_out
            self.biases.append(theta[offset : offset + nb])
            offset += nb

    @classmethod
    def from_arrays(cls, spec: LayerSpec, weights, biases, input_scale: float = 1.0):
        parts = []
        for (shape, nb), w, b in zip(spec.shapes, weights, biases):
            w = np.asarray(w, dtype=float)
            b = np.asarray(b, dtype=float)
            if w.shape != shape or b.shape != (nb,):
                raise ValueError(f"layer shape mismatch: expected {shape}/{nb}, got {w.shape}/{b.shape}")
            parts += [w.ravel(), b]
        return cls(spec, np.concatenate(parts), input_scale)

    def flatten(self) -> np.ndarray:
        return self.theta.copy()

    def with_theta(self, theta) -> "NetworkParams":
        return NetworkParams(self.spec, theta, self.input_scale)

    def __repr__(self) -> str:
        return (
            f"NetworkParams(widths={list(self.spec.widths)}, activation={self.spec.activation!r}, "
            f"n_params={self.spec.n_params}, input_scale={self.input_scale!r})"
        )


def init_params(spec: LayerSpec, seed: int, input_scale: float = 1.0) -> NetworkParams:
    """Glorot-uniform weights, zero biases, fully determined by ``seed``."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for (fan_in, fan_out), nb in spec.shapes:
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(nb))
    return NetworkParams.from_arrays(spec, weights, biases, input_scale)


def _dense(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    # einsum keeps each row's reduction order independent of the batch size,
    # so forward() and forward_batch() agree bit for bit (BLAS does not).
    return np.einsum("ni,ij->nj", z, w)


def _forward_cache(params: NetworkParams, t: np.ndarray) -> list[np.ndarray]:
    phi, _ = ACTIVATIONS[params.spec.activation]
    z = (params.input_scale * t)[:, None]
    acts = [z]
    last = len(params.weights) - 1
    for j, (w, b) in enumerate(zip(params.weights, params.biases)):
        y = _dense(z, w) + b
        z = y if j == last else phi(y)
        acts.append(z)
    return acts


def forward_batch(params: NetworkParams, grid_or_t) -> np.ndarray:
    """Network output at every grid node (or at every entry of an array of times)."""
    return _forward_cache(params, _times(grid_or_t))[-1][:, 0]


def forward(params: NetworkParams, t: float) -> float:
    return float(forward_batch(params, np.array([float(t)]))[0])


def _times(grid_or_t) -> np.ndarray:
    t = grid_or_t.nodes if isinstance(grid_or_t, Grid) else np.asarray(grid_or_t, dtype=float)
    return np.atleast_1d(t)


def _backward_from_cache(params: NetworkParams, acts: list[np.ndarray], c: np.ndarray) -> np.ndarray:
    _, dphi = ACTIVATIONS[params.spec.activation]
    n_layers = len(params.weights)
    grads: list[np.ndarray] = []
    delta = c[:, None]  # cotangent of the output layer pre-activation
    for j in range(n_layers - 1, -1, -1):
        # bias first: the flat layout is [W_0, b_0, W_1, b_1, ...] and we fill it backwards
        grads.append(delta.sum(axis=0))
        grads.append(np.einsum("ni,nj->ij", acts[j], delta).ravel())
        if j > 0:
            delta = _dense(delta, params.weights[j].T) * dphi(acts[j])
    return np.concatenate(grads[::-1])


def backward(params: NetworkParams, grid_or_t, output_cotangent) -> np.ndarray:
    """Gradient of ``sum_n c[n] * forward(params, t_n)`` with respect to ``theta``.

    Returned in the same flat layout as :attr:`NetworkParams.theta`.
    """
    t = _times(grid_or_t)
    c = np.asarray(output_cotangent, dtype=float)
    if c.shape != t.shape:
        raise ValueError(f"cotangent shape {c.shape} does not match {t.shape} nodes")
    return _backward_from_cache(params, _forward_cache(params, t), c)


def forward_and_vjp(params: NetworkParams, grid_or_t):
    """Network outputs plus a function mapping an output cotangent to the parameter gradient.

    Saves the second forward pass when the cotangent depends on the outputs.
    """
    t = _times(grid_or_t)
    acts = _forward_cache(params, t)

    def vjp(output_cotangent) -> np.ndarray:
        c = np.asarray(output_cotangent, dtype=float)
        if c.shape != t.shape:
            raise ValueError(f"cotangent shape {c.shape} does not match {t.shape} nodes")
        return _backward_from_cache(params, acts, c)

    return acts[-1][:, 0], vjp


def save_params(path, params: NetworkParams, seed: int | None, normalize_input: bool) -> None:
    """Write the parameters as JSON: ``{spec, seed, theta, normalize_input, input_scale}``.

    Floats are written with ``repr`` precision so reloading is bit-exact.
    """
    doc = {
        "spec": {"widths": list(params.spec.widths), "activation": params.spec.activation},
        "seed": seed,
        "normalize_input": bool(normalize_input),
        "input_scale": params.input_scale,
        "theta": params.theta.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_params(path) -> tuple[NetworkParams, dict]:
    doc = json.loads(Path(path).read_text())
    spec = LayerSpec(tuple(doc["spec"]["widths"]), doc["spec"]["activation"])
    params = NetworkParams(spec, doc["theta"], doc.get("input_scale", 1.0))
    return params, doc
