"""Command-line driver: train one model for a sweep of orders and write CSV traces.

Example::

    caputonet --model logistic --alpha 0.7,0.8,0.9,1 --out runs/logistic

Per order it writes ``solution_alpha<a>.csv`` (t,u_nn,u_ref,abs_err),
``loss_alpha<a>.csv`` (epoch,loss) and ``weights_alpha<a>.json``, plus one
``manifest.json`` describing the whole run.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .caputo import Grid, check_alpha
from .models import MODEL_NAMES, GrowthParams, make_model
from .network import LayerSpec, save_params
from .oracle import OracleConfig, self_convergence
from .training import SolutionTrace, TrainConfig, TrainingDivergedError, train

logger = logging.getLogger("caputonet")

PAPER_ALPHAS = (1.0, 0.9, 0.8, 0.7)
# Oracle runs whose h vs h/2 gap exceeds this are flagged as untrustworthy.
ORACLE_SELF_CONVERGENCE_TOL = 1e-2

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGED = 3


@dataclass
class RunManifest:
    model: str
    a: float
    N: float = 1.0
    b: float = 0.0
    u0: float = 1.0
    alphas: tuple[float, ...] = PAPER_ALPHAS
    t_end: float = 1.0
    nodes: int = 101
    epochs: int = 20_000
    learning_rate: float = 1e-3
    widths: tuple[int, ...] = (1, 42, 42, 1)
    activation: str = "sigmoid"
    seed: int = 0
    normalize_input: bool = True
    oracle_nodes: int = 2001
    oracle_scheme: str = "l1_implicit"
    out: str = "runs"

    def __post_init__(self) -> None:
        if self.model not in MODEL_NAMES:
            raise ValueError(f"unknown model {self.model!r}; choose from {', '.join(MODEL_NAMES)}")
        self.alphas = tuple(check_alpha(a) for a in self.alphas)
        if not self.alphas:
            raise ValueError("alpha list must not be empty")
        self.widths = tuple(int(w) for w in self.widths)
        self.growth  # raises on invalid model parameters

    @property
    def growth(self) -> GrowthParams:
        return GrowthParams(a=self.a, N=self.N, b=self.b, u0=self.u0)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            spec=LayerSpec(self.widths, self.activation),
            grid=Grid(self.t_end, self.nodes),
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            seed=self.seed,
            normalize_input=self.normalize_input,
        )

    def to_json(self) -> str:
        doc = dataclasses.asdict(self)
        doc["alphas"] = list(self.alphas)
        doc["widths"] = list(self.widths)
        return json.dumps(doc, indent=2) + "\n"


SMALL_NET = (1, 42, 42, 1)
DEEP_NET = (1, 8, 42, 64, 64, 42, 8, 1)

# Seed 1 is the documented seed: for the logistic family some draws start
# the trial function below zero and training settles on the unstable
# equilibrium u = 0 instead of the growth curve.
_DEFAULTS = {
    "exp": dict(a=1.0, u0=1.0, t_end=1.0, epochs=20_000, widths=SMALL_NET, seed=1),
    "logistic": dict(a=10.0, N=1.0, u0=0.01, t_end=2.0, epochs=50_000, widths=DEEP_NET, seed=1),
    "harvest": dict(a=5.0, N=1.0, b=0.8, u0=0.4, t_end=2.0, epochs=50_000, widths=DEEP_NET, seed=1),
}


def defaults_for(name: str) -> RunManifest:
    """Manifest prefilled with the published architecture and parameters for a model."""
    if name not in _DEFAULTS:
        raise ValueError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
    return RunManifest(model=name, **_DEFAULTS[name])


def _fmt(x: float) -> str:
    return repr(float(x)) if math.isfinite(x) else ""


def write_solution_csv(path, t, u_nn, u_ref: Optional[np.ndarray]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "u_nn", "u_ref", "abs_err"])
        for k in range(len(t)):
            if u_ref is None:
                writer.writerow([_fmt(t[k]), _fmt(u_nn[k]), "", ""])
            else:
                writer.writerow(
                    [_fmt(t[k]), _fmt(u_nn[k]), _fmt(u_ref[k]), _fmt(abs(u_nn[k] - u_ref[k]))]
                )


def write_loss_csv(path, history) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "loss"])
        for epoch, value in enumerate(history):
            writer.writerow([epoch, _fmt(value)])


def read_solution_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {
        key: np.array([float(r[key]) if r[key] != "" else np.nan for r in rows])
        for key in ("t", "u_nn", "u_ref", "abs_err")
    }


def read_loss_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        return np.array([float(r["loss"]) for r in csv.DictReader(fh)])


def _alpha_tag(alpha: float) -> str:
    return f"alpha{alpha:g}"


@dataclass
class AlphaResult:
    alpha: float
    trace: SolutionTrace
    u_ref: Optional[np.ndarray]
    ref_kind: str
    rmse: float
    oracle_gap: Optional[float] = None
    files: list[Path] = field(default_factory=list)


def reference_on_grid(problem, grid: Grid, manifest: RunManifest) -> tuple[Optional[np.ndarray], str, Optional[float]]:
    """Exact solution where one exists, otherwise the oracle, sampled at ``grid`` nodes."""
    if problem.exact is not None:
        return np.asarray(problem.exact(grid.nodes), dtype=float), "exact", None
    if manifest.oracle_nodes < 2:
        return None, "none", None
    oracle_grid = Grid(grid.t_end, manifest.oracle_nodes)
    report = self_convergence(problem, oracle_grid, manifest.oracle_scheme)
    if report.max_discrepancy > ORACLE_SELF_CONVERGENCE_TOL:
        logger.warning(
            "oracle self-convergence gap %.3e exceeds %.0e; reference is unreliable",
            report.max_discrepancy,
            ORACLE_SELF_CONVERGENCE_TOL,
        )
    u = report.coarse
    if np.any(u < 0):
        logger.warning("oracle solution goes negative (min %.4g)", u.min())
    stride, rem = divmod(oracle_grid.n_points - 1, grid.n_points - 1)
    if rem == 0:
        ref = u[::stride]
    else:
        ref = np.interp(grid.nodes, oracle_grid.nodes, u)
    return ref, "oracle", report.max_discrepancy


def run_alpha(manifest: RunManifest, alpha: float, out_dir: Path) -> AlphaResult:
    problem = make_model(manifest.model, manifest.growth, alpha)
    config = manifest.train_config()
    params, trace = train(problem, config)
    u_ref, kind, gap = reference_on_grid(problem, config.grid, manifest)
    rmse = float(np.sqrt(np.mean((trace.u_hat - u_ref) ** 2))) if u_ref is not None else math.nan
    if np.any(trace.u_hat < 0):
        logger.warning("network solution goes negative (min %.4g)", trace.u_hat.min())

    tag = _alpha_tag(alpha)
    files = [
        out_dir / f"solution_{tag}.csv",
        out_dir / f"loss_{tag}.csv",
        out_dir / f"weights_{tag}.json",
    ]
    write_solution_csv(files[0], trace.nodes, trace.u_hat, u_ref)
    write_loss_csv(files[1], trace.loss_history)
    save_params(files[2], params, config.seed, config.normalize_input)
    return AlphaResult(alpha, trace, u_ref, kind, rmse, gap, files)


def run(manifest: RunManifest) -> tuple[int, list[AlphaResult]]:
    out_dir = Path(manifest.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(manifest.to_json())
    results = []
    for alpha in manifest.alphas:
        try:
            res = run_alpha(manifest, alpha, out_dir)
        except TrainingDivergedError as exc:
            print(f"error: {manifest.model} alpha={alpha:g}: {exc}", file=sys.stderr)
            return EXIT_DIVERGED, results
        results.append(res)
        print(
            f"{manifest.model} alpha={alpha:g} final_loss={res.trace.final_loss:.6e} "
            f"rmse_vs_{res.ref_kind}={res.rmse:.6e}"
        )
    return EXIT_OK, results


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="caputonet",
        description="Solve fractional growth models with a network trained through the L1 Caputo operator.",
    )
    p.add_argument("--model", required=True, choices=MODEL_NAMES)
    p.add_argument("--alpha", type=_float_list, help="comma-separated orders in (0, 1] (default 1,0.9,0.8,0.7)")
    p.add_argument("--a", type=float, help="growth rate")
    p.add_argument("--cap", type=float, help="carrying capacity N")
    p.add_argument("--b", type=float, help="harvesting amplitude")
    p.add_argument("--u0", type=float, help="initial value")
    p.add_argument("--t-end", type=float, help="time horizon T")
    p.add_argument("--nodes", type=int, help="training grid nodes, including t=0")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float, help="Adam learning rate")
    p.add_argument("--widths", type=_int_list, help="layer widths, e.g. 1,42,42,1")
    p.add_argument("--activation", choices=("sigmoid", "tanh", "identity"))
    p.add_argument("--seed", type=int)
    p.add_argument("--no-normalize", action="store_true", help="feed raw t to the network instead of t/T")
    p.add_argument("--oracle-nodes", type=int, help="oracle grid nodes (0 disables the oracle)")
    p.add_argument("--out", default="runs", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_FLAG_TO_FIELD = {
    "alpha": "alphas",
    "a": "a",
    "cap": "N",
    "b": "b",
    "u0": "u0",
    "t_end": "t_end",
    "nodes": "nodes",
    "epochs": "epochs",
    "lr": "learning_rate",
    "widths": "widths",
    "activation": "activation",
    "seed": "seed",
    "oracle_nodes": "oracle_nodes",
    "out": "out",
}


def manifest_from_args(args: argparse.Namespace) -> RunManifest:
    base = defaults_for(args.model)
    overrides = {
        fld: getattr(args, flag)
        for flag, fld in _FLAG_TO_FIELD.items()
        if getattr(args, flag) is not None
    }
    if args.no_normalize:
        overrides["normalize_input"] = False
    manifest = dataclasses.replace(base, **overrides)
    # fail on bad flags before any training starts
    manifest.train_config()
    return manifest


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        manifest = manifest_from_args(args)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    status, _ = run(manifest)
    return status


if __name__ == "__main__":
    sys.exit(main())
