import numpy as np
import pytest

from caputonet.network import LayerSpec, NetworkParams, init_params


def central_fd(fun, theta, step=1e-6):
    """Central finite differences of a scalar function of a flat vector."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = step
        out[i] = (fun(theta + e) - fun(theta - e)) / (2 * step)
    return out


def max_rel_err(analytic, numeric, floor=1e-8):
    """Largest componentwise relative error over components with |analytic| > floor."""
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    mask = np.abs(analytic) > floor
    assert mask.any()
    return float(np.max(np.abs(analytic[mask] - numeric[mask]) / np.abs(analytic[mask])))


def hand_net(w1=1.0, b1=0.0, w2=1.0, b2=0.0, activation="sigmoid"):
    """Width-1 network ``w2 * phi(w1 t + b1) + b2``."""
    spec = LayerSpec((1, 1, 1), activation)
    return NetworkParams.from_arrays(spec, [[[w1]], [[w2]]], [[b1], [b2]])


@pytest.fixture
def tiny_params():
    params = init_params(LayerSpec((1, 4, 4, 1)), seed=11, input_scale=0.5)
    # spread biases away from zero so every code path is exercised
    rng = np.random.default_rng(5)
    return params.with_theta(params.theta + 0.3 * rng.standard_normal(params.theta.size))


# --- acceptance reporting -------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number, title, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
