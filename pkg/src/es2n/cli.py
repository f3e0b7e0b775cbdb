"""Command-line entry point for the benchmark experiments.

Each invocation runs one experiment, writes its CSV outputs plus a
meta.json sidecar into the output directory, and prints a one-line
summary. Specs merge three layers: per-experiment defaults, an optional
strict JSON config file, and command-line flags (highest precedence).
Identical specs produce byte-identical CSV bodies; wall-clock metadata
lives only in meta.json.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import mlle as compute_mlle
from .analysis import spectrum_along, spectrum_to_csv, verify_containment
from .numerics import RNG_ALGORITHM, child_seed, make_rng, uniform_matrix
from .readout import fit, generate_closed_loop
from .reservoir import ModelKind, ReservoirConfig, drive, init
from .tasks import (
    MC_DEFAULT_MU,
    MSO_NOISE_STD,
    MSO_TRAIN_LEN,
    SearchSpace,
    mc_mix_grid,
    mc_summarize,
    mc_task,
    mso8_experiment,
    mso8_signal,
    run_search_trial,
    tradeoff_cell,
    tradeoff_grid,
    write_mc_k_csv,
    write_mc_summary_csv,
    write_mso_run_csv,
    write_tradeoff_csv,
)

EXPERIMENTS = ("mc", "tradeoff", "mso8", "spectrum", "mlle", "search")

# Behavioral choices that affect numbers, echoed into every metadata file.
DECISIONS = {
    "noise_placement": "state noise is added inside the activation argument "
                       "with rho and omega scalings active",
    "mc_fit_window": "memory-capacity fits share the common window starting "
                     "at max(washout, k_max) + 1 so one factorization serves "
                     "all delays",
    "mc_ridge_mu": "memory-capacity ridge regularization defaults to 1e-8 "
                   "as a numerical stabilizer (flag-overridable)",
    "mc_sweep_sampling": "sweeps re-sample the reservoir independently per "
                         "(mix, seed) pair",
    "ortho_esn_rho": "the mc experiment runs ortho_esn at rho = 1 (raw "
                     "orthogonal reservoir); other kinds default to rho = 0.9",
    "log_nu_base": "the trade-off nonlinearity axis is the natural logarithm",
    "mso_normalization": "the eight-sine signal is centered by its mean over "
                         "the first 6283 steps and scaled by the max absolute "
                         "centered value over that window times (1 + 1e-6)",
    "closed_loop_alignment": "the readout is trained to predict the next "
                             "signal value so closed-loop feedback reproduces "
                             "the teacher-forced input sequence",
    "rng": "PCG64 generators; trial streams derive from the master seed by "
           "position",
}

_MC_DEFAULT_RHO = {kind: 0.9 for kind in ModelKind}
_MC_DEFAULT_RHO[ModelKind.ORTHO_ESN] = 1.0

_DEFAULT_MIX = {
    ModelKind.ES2N: 0.05,
    ModelKind.LEAKY_ESN: 1.0,
    ModelKind.LINEAR_ESN: 1.0,
    ModelKind.ORTHO_ESN: 1.0,
    ModelKind.LINEAR_SCR: 1.0,
}


@dataclass
class ExperimentSpec:
    """Effective, fully-merged settings for one run."""

    experiment: str
    kind: str = "es2n"
    n_r: int | None = None
    rho: float | None = None
    omega: float | None = None
    mix: float | None = None
    seed: int = 0
    trials: int | None = None
    out: str = "out"
    threads: int = 1
    mu: float | None = None
    noise_std: float | None = None
    steps: int | None = None
    train_len: int = MSO_TRAIN_LEN
    mix_grid: int = 0
    taus: list | None = None
    log_nus: list | None = None
    slack: float = 1e-10


_SPEC_FIELDS = {f.name for f in dataclasses.fields(ExperimentSpec)}


def validate(spec: ExperimentSpec) -> list[str]:
    """Pure diagnostics; empty list means the spec is runnable."""
    issues = []
    if spec.experiment not in EXPERIMENTS:
        issues.append(
            f"experiment: unknown name {spec.experiment!r}; valid names: "
            + ", ".join(EXPERIMENTS))
    try:
        ModelKind(spec.kind)
    except ValueError:
        issues.append(f"kind: unknown model {spec.kind!r}; valid kinds: "
                      + ", ".join(k.value for k in ModelKind))
    if spec.n_r is not None and spec.n_r < 1:
        issues.append(f"n_r: must be >= 1, got {spec.n_r}")
    if spec.rho is not None and spec.rho < 0:
        issues.append(f"rho: must be >= 0, got {spec.rho}")
    if spec.omega is not None and spec.omega < 0:
        issues.append(f"omega: must be >= 0, got {spec.omega}")
    if spec.mix is not None and not 0 < spec.mix <= 1:
        issues.append(f"mix: must be in (0, 1], got {spec.mix}")
    if spec.trials is not None and spec.trials < 1:
        issues.append(f"trials: must be >= 1, got {spec.trials}")
    if spec.threads < 1:
        issues.append(f"threads: must be >= 1, got {spec.threads}")
    if spec.mu is not None and spec.mu < 0:
        issues.append(f"mu: must be >= 0, got {spec.mu}")
    if spec.noise_std is not None and spec.noise_std < 0:
        issues.append(f"noise_std: must be >= 0, got {spec.noise_std}")
    if spec.steps is not None and spec.steps < 1:
        issues.append(f"steps: must be >= 1, got {spec.steps}")
    if spec.train_len < 102:
        issues.append(f"train_len: must exceed the washout, got {spec.train_len}")
    return issues


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    unknown = sorted(set(data) - _SPEC_FIELDS)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    return data


def build_spec(args: argparse.Namespace) -> ExperimentSpec:
    merged: dict = {"experiment": args.experiment}
    if args.config:
        merged.update(_load_config_file(args.config))
    for key in ("kind", "n_r", "rho", "omega", "mix", "seed", "trials", "out",
                "threads", "mu", "noise_std", "steps", "train_len", "mix_grid",
                "taus", "log_nus", "slack"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if args.experiment is not None:
        merged["experiment"] = args.experiment
    if "experiment" not in merged or merged["experiment"] is None:
        raise ValueError("an experiment name is required")
    return ExperimentSpec(**merged)


def _write_meta(spec: ExperimentSpec, out_dir: Path, summary: str,
                status: str, extra: dict | None = None,
                error: str | None = None) -> None:
    meta = {
        "version": __version__,
        "experiment": spec.experiment,
        "spec": dataclasses.asdict(spec),
        "rng_algorithm": RNG_ALGORITHM,
        "numpy_version": np.__version__,
        "decisions": DECISIONS,
        "status": status,
        "summary": summary,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if extra:
        meta.update(extra)
    if error:
        meta["error"] = error
    with open(out_dir / "meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, default=str)
        fh.write("\n")


def _base_config(spec: ExperimentSpec, default_n_r: int, default_rho: float,
                 default_omega: float, default_mix: float | None = None,
                 noise_std: float = 0.0) -> ReservoirConfig:
    kind = ModelKind(spec.kind)
    mix = spec.mix if spec.mix is not None else (
        1.0 if kind.fixed_unit_mix else (default_mix or _DEFAULT_MIX[kind]))
    return ReservoirConfig(
        kind=kind,
        n_r=spec.n_r if spec.n_r is not None else default_n_r,
        n_i=1, n_o=1,
        rho=spec.rho if spec.rho is not None else default_rho,
        omega=spec.omega if spec.omega is not None else default_omega,
        mix=mix,
        seed=spec.seed,
        noise_std=spec.noise_std if spec.noise_std is not None else noise_std,
    )


def _map_trials(fn, args_list, threads: int):
    """Run trial closures, reducing results in submission (index) order."""
    if threads <= 1 or len(args_list) <= 1:
        return [fn(*a) for a in args_list]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, *a) for a in args_list]
        return [f.result() for f in futures]


def _mc_trial(config: ReservoirConfig, seed: int, mu: float):
    return mc_task(config, seed, mu=mu)


def _run_mc(spec: ExperimentSpec, out_dir: Path) -> tuple[str, int]:
    kind = ModelKind(spec.kind)
    config = _base_config(spec, default_n_r=100,
                          default_rho=_MC_DEFAULT_RHO[kind], default_omega=0.1)
    trials = spec.trials if spec.trials is not None else 10
    mu = spec.mu if spec.mu is not None else MC_DEFAULT_MU
    if spec.mix_grid > 0 and not kind.fixed_unit_mix:
        grid = list(mc_mix_grid(child_seed(spec.seed, 10_000), spec.mix_grid)) + [1.0]
        jobs = [(dataclasses.replace(config, mix=float(mix)),
                 child_seed(spec.seed, mi, t), mu)
                for mi, mix in enumerate(grid) for t in range(trials)]
    else:
        jobs = [(config, child_seed(spec.seed, 0, t), mu) for t in range(trials)]
    results = _map_trials(_mc_trial, jobs, spec.threads)
    summaries = mc_summarize(results)
    write_mc_k_csv(out_dir / "mc_k.csv", results)
    write_mc_summary_csv(out_dir / "mc_summary.csv", summaries)
    best = max(summaries, key=lambda s: s.mc_mean)
    return (f"MC = {best.mc_mean:.2f} over {best.n_seeds} seeds "
            f"({best.kind.value}, mix={best.mix:g})"), 0


def _run_tradeoff(spec: ExperimentSpec, out_dir: Path) -> tuple[str, int]:
    kind = ModelKind(spec.kind)
    taus = spec.taus if spec.taus is not None else list(range(1, 21))
    log_nus = (spec.log_nus if spec.log_nus is not None
               else [round(-1.6 + 0.1 * i, 10) for i in range(33)])
    trials = spec.trials if spec.trials is not None else 100
    mu = spec.mu if spec.mu is not None else MC_DEFAULT_MU
    n_r = spec.n_r if spec.n_r is not None else 100
    if spec.threads > 1:
        jobs = [(kind, int(tau), float(log_nu), trials, spec.seed, ci, n_r, mu)
                for ci, (tau, log_nu) in enumerate(
                    (t, l) for t in taus for l in log_nus)]
        cells = _map_trials(tradeoff_cell, jobs, spec.threads)
    else:
        cells = tradeoff_grid(kind, taus, log_nus, trials, spec.seed,
                              n_r=n_r, mu=mu)
    write_tradeoff_csv(out_dir / "tradeoff.csv", cells)
    finite = [c.best_nrmse for c in cells if math.isfinite(c.best_nrmse)]
    failed_trials = sum(c.n_failed for c in cells)
    mean = float(np.mean(finite)) if finite else math.inf
    return (f"tradeoff: {len(cells)} cells, mean best NRMSE = {mean:.3f}, "
            f"{failed_trials} failed trials"), failed_trials


def _run_mso8(spec: ExperimentSpec, out_dir: Path) -> tuple[str, int]:
    config = _base_config(spec, default_n_r=100, default_rho=1.0,
                          default_omega=0.11, default_mix=0.03,
                          noise_std=MSO_NOISE_STD)
    steps = spec.steps if spec.steps is not None else 300
    mu = spec.mu if spec.mu is not None else 0.0
    err = mso8_experiment(config, train_len=spec.train_len,
                          eval_windows=((1, steps),), mu=mu)[0]
    # Re-run the generation to export the trace alongside the target.
    train_len = spec.train_len
    signal = mso8_signal(train_len + 1 + steps).values
    params = init(config)
    trajectory = drive(params, config, signal[:train_len][None, :],
                       rng_noise=make_rng(child_seed(config.seed, 1)))
    readout = fit(trajectory, signal[1:train_len + 1][None, :], mu, 100)
    z = generate_closed_loop(params, config, readout,
                             trajectory.states[:, -1], steps)
    # Autonomous output s estimates the signal value at time train_len+1+s.
    t_values = range(train_len + 2, train_len + 2 + steps)
    write_mso_run_csv(out_dir / "mso_run.csv", t_values,
                      signal[train_len + 1: train_len + 1 + steps], z[0])
    return f"MSO8 NRMSE over {steps} autonomous steps = {err:.4f}", 0


def _run_spectrum(spec: ExperimentSpec, out_dir: Path) -> tuple[str, int]:
    config = _base_config(spec, default_n_r=100, default_rho=0.9,
                          default_omega=0.1, default_mix=0.1)
    steps = spec.steps if spec.steps is not None else 1
    # Constant unit input, scaled by omega inside the update; driving one
    # extra step exposes the Jacobian at the state reached after `steps`.
    params = init(config)
    inputs = np.ones((1, steps + 1))
    trajectory = drive(params, config, inputs)
    report = spectrum_along(params, config, trajectory)
    verify_containment(report, slack=spec.slack)
    spectrum_to_csv(report, out_dir / "eigenspectrum.csv")
    return (f"spectrum: {sum(len(e) for e in report.eigenvalues)} eigenvalues "
            f"within [{report.bounds.inner:.4f}, {report.bounds.outer:.4f}], "
            f"sigma={report.sigma:.4f}, gamma={report.gamma:.4f}"), 0


def _run_mlle(spec: ExperimentSpec, out_dir: Path) -> tuple[str, int]:
    config = _base_config(spec, default_n_r=100, default_rho=0.9,
                          default_omega=0.1, default_mix=0.01)
    steps = spec.steps if spec.steps is not None else 1000
    params = init(config)
    u = uniform_matrix(make_rng(child_seed(spec.seed, 1)), 1, steps, -1.0, 1.0)
    trajectory = drive(params, config, u)
    report = compute_mlle(params, config, trajectory)
    with open(out_dir / "mlle.csv", "w", encoding="ascii") as fh:
        fh.write("step,log_max_sv\n")
        for t, v in enumerate(report.per_step_max_log_sv):
            fh.write(f"{t},{v:.17g}\n")
    return (f"MLLE = {report.mlle:.6f} in [{report.lower:.6f}, {report.upper:.6f}] "
            f"(mix={config.mix:g})"), 0


def _run_search(spec: ExperimentSpec, out_dir: Path) -> tuple[str, int]:
    kind = ModelKind(spec.kind)
    space = SearchSpace(
        kind=kind,
        n_r=spec.n_r if spec.n_r is not None else (600 if kind is ModelKind.LEAKY_ESN else 100),
        mix=(0.1, 1.0) if kind is ModelKind.LEAKY_ESN else (0.01, 0.1),
        noise_std=spec.noise_std if spec.noise_std is not None else MSO_NOISE_STD,
    )
    trials = spec.trials if spec.trials is not None else 10000
    jobs = [("mso8", space, spec.seed, j, spec.train_len) for j in range(trials)]

    def trial_stream():
        if spec.threads <= 1:
            for a in jobs:
                yield run_search_trial(*a)
        else:
            with ProcessPoolExecutor(max_workers=spec.threads) as pool:
                futures = [pool.submit(run_search_trial, *a) for a in jobs]
                for f in futures:
                    yield f.result()

    # Stream rows as trials finish so an interrupted sweep keeps its prefix.
    records = []
    with open(out_dir / "search.csv", "w", encoding="ascii") as fh:
        fh.write("trial,rho,omega,mix,nrmse\n")
        fh.flush()
        for rec in trial_stream():
            records.append(rec)
            fh.write(f"{rec.trial},{rec.rho:.17g},{rec.omega:.17g},"
                     f"{rec.mix:.17g},{rec.nrmse:.17g}\n")
            fh.flush()
    best = min(records, key=lambda r: (r.nrmse, r.trial))
    failed = sum(1 for r in records if r.error is not None)
    return (f"search: best NRMSE = {best.nrmse:.4f} at trial {best.trial} "
            f"(rho={best.rho:.3f}, omega={best.omega:.3f}, mix={best.mix:.3f}); "
            f"{failed} failed trials"), failed


_RUNNERS = {
    "mc": _run_mc,
    "tradeoff": _run_tradeoff,
    "mso8": _run_mso8,
    "spectrum": _run_spectrum,
    "mlle": _run_mlle,
    "search": _run_search,
}


def run(spec: ExperimentSpec) -> int:
    """Execute a validated spec; returns the process exit status."""
    issues = validate(spec)
    if issues:
        for issue in issues:
            print(f"error: {issue}", file=sys.stderr)
        return 2
    out_dir = Path(spec.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        summary, failed_trials = _RUNNERS[spec.experiment](spec, out_dir)
    except Exception as exc:
        _write_meta(spec, out_dir, summary="", status="error",
                    error=f"{type(exc).__name__}: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    status = "ok" if failed_trials == 0 else "partial"
    _write_meta(spec, out_dir, summary=summary, status=status,
                extra={"failed_trials": failed_trials})
    print(summary)
    return 0 if failed_trials == 0 else 1


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="es2n",
        description="Reservoir-computing benchmark experiments")
    p.add_argument("--experiment", choices=None, default=None,
                   help=f"one of: {', '.join(EXPERIMENTS)}")
    p.add_argument("--config", default=None, help="JSON spec file (strict keys)")
    p.add_argument("--kind", default=None,
                   help="model kind: " + ", ".join(k.value for k in ModelKind))
    p.add_argument("--n-r", dest="n_r", type=int, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--mix", type=float, default=None,
                   help="proximity (es2n) or leak rate (leaky_esn)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--mu", type=float, default=None, help="ridge regularization")
    p.add_argument("--noise-std", dest="noise_std", type=float, default=None)
    p.add_argument("--steps", type=int, default=None,
                   help="drive/generation length where applicable")
    p.add_argument("--train-len", dest="train_len", type=int, default=None)
    p.add_argument("--mix-grid", dest="mix_grid", type=int, default=None,
                   help="mc only: sweep this many sampled mix values plus 1.0")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = build_spec(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
