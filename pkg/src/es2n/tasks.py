"""Benchmark experiments: short-term memory capacity, the
memory-nonlinearity trade-off grid, and MSO8 autoregressive generation,
plus the metrics and the random hyperparameter search they share.

Every experiment is a pure function of its explicit seeds: trial seeds are
derived from the master seed by position, so sweeps are reproducible and
trivially parallelizable, and results are always reduced in trial order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .numerics import child_seed, format_float, make_rng, uniform_matrix
from .readout import DivergenceError, fit, generate_closed_loop, predict
from .reservoir import ModelKind, ReservoirConfig, Trajectory, drive, init

# Memory-capacity experiment constants.
MC_TOTAL_STEPS = 6000
MC_TRAIN_END = 5000
MC_WASHOUT = 100
MC_K_MAX = 200
MC_INPUT_LO, MC_INPUT_HI = -0.8, 0.8
MC_DEFAULT_MU = 1e-8  # stabilizer only; overridable

# Trade-off experiment constants.
TRADEOFF_TOTAL_STEPS = 6000
TRADEOFF_TRAIN_END = 5000
TRADEOFF_WASHOUT = 100

# MSO8 constants.
MSO_FREQUENCIES = (0.2, 0.311, 0.42, 0.51, 0.63, 0.74, 0.85, 0.97)
MSO_PERIOD = 6283
MSO_TRAIN_LEN = 6383  # one almost-period plus the 100-step washout
MSO_WASHOUT = 100
MSO_NOISE_STD = 1e-4


def nrmse(y: np.ndarray, z: np.ndarray) -> float:
    """Root mean squared error normalized by the target's variance.

    Accepts 1-D series or (n_o, T) matrices; averages are taken over the
    provided window only. A constant target makes the normalizer zero and
    raises ZeroDivisionError.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if y.shape != z.shape:
        raise ValueError(f"series shapes differ: {y.shape} vs {z.shape}")
    if y.shape[1] < 2:
        raise ValueError("at least two samples are required")
    num = np.mean(np.sum((y - z) ** 2, axis=0))
    centered = y - y.mean(axis=1, keepdims=True)
    den = np.mean(np.sum(centered ** 2, axis=0))
    if den == 0.0:
        raise ZeroDivisionError("target series is constant; NRMSE is undefined")
    return float(np.sqrt(num / den))


def squared_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Pearson correlation; 0.0 when either series is constant."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    am = a - a.mean()
    bm = b - b.mean()
    va = float((am * am).mean())
    vb = float((bm * bm).mean())
    if va <= 0.0 or vb <= 0.0:
        return 0.0
    cov = float((am * bm).mean())
    return cov * cov / (va * vb)


# ---------------------------------------------------------------------------
# Memory capacity


@dataclass(frozen=True)
class McResult:
    mc: float
    mc_k: np.ndarray
    k_max: int
    kind: ModelKind
    mix: float
    seed: int


def mc_task(config: ReservoirConfig, seed: int, mu: float = MC_DEFAULT_MU,
            k_max: int = MC_K_MAX) -> McResult:
    """Delay-reconstruction score for one reservoir realization.

    A single drive on a uniform signal feeds one multi-output ridge fit
    whose row k targets the k-step-delayed input. The fit window starts at
    max(washout, k_max) + 1 so every delay row sees only realized inputs
    and one Gram factorization serves all rows; scores are squared
    correlations over the held-out final 1000 steps, summed over delays.
    """
    if config.n_i != 1:
        raise ValueError("the memory-capacity task is one-dimensional")
    cfg = replace(config, seed=child_seed(seed, 0), n_o=k_max)
    params = init(cfg)
    u = uniform_matrix(make_rng(child_seed(seed, 1)), 1, MC_TOTAL_STEPS,
                       MC_INPUT_LO, MC_INPUT_HI)
    trajectory = drive(params, cfg, u)
    u0 = u[0]

    start = max(MC_WASHOUT, k_max)
    train = Trajectory(states=trajectory.states[:, :MC_TRAIN_END + 1].copy(),
                       inputs=u[:, :MC_TRAIN_END].copy())
    targets = np.zeros((k_max, MC_TRAIN_END))
    for k in range(1, k_max + 1):
        targets[k - 1, k:] = u0[:MC_TRAIN_END - k]  # column j holds u[j+1-k]
    readout = fit(train, targets, mu, washout=start)

    z = predict(readout, trajectory.states[:, MC_TRAIN_END + 1:])
    mc_k = np.empty(k_max)
    for k in range(1, k_max + 1):
        mc_k[k - 1] = squared_correlation(
            z[k - 1], u0[MC_TRAIN_END - k: MC_TOTAL_STEPS - k])
    return McResult(mc=float(mc_k.sum()), mc_k=mc_k, k_max=k_max,
                    kind=config.kind, mix=config.mix, seed=seed)


def mc_mix_grid(seed: int, count: int = 50, decades: int = 3) -> np.ndarray:
    """Grid a * 10^-s with a uniform in (0.1, 1) and s uniform over
    {0, ..., decades-1}, sorted ascending."""
    rng = make_rng(seed)
    a = rng.uniform(0.1, 1.0, count)
    s = rng.integers(0, decades, count)
    return np.sort(a * 10.0 ** (-s.astype(float)))


@dataclass(frozen=True)
class McSummary:
    kind: ModelKind
    mix: float
    n_seeds: int
    mc_mean: float
    mc_std: float


def mc_sweep(kinds, mix_grid, n_seeds: int, base: ReservoirConfig,
             master_seed: int = 0, mu: float = MC_DEFAULT_MU) -> list[McResult]:
    """Evaluate each (kind, mix) cell over n_seeds fresh reservoirs.

    Kinds with a fixed unit mix are evaluated at the single point mix = 1.
    Each (kind, mix, trial) position derives its own seed, so the reservoir
    is re-sampled independently per cell and trial.
    """
    results = []
    for ki, kind in enumerate(kinds):
        mixes = [1.0] if kind.fixed_unit_mix else list(mix_grid)
        for mi, mix in enumerate(mixes):
            cfg = replace(base, kind=kind, mix=float(mix))
            for trial in range(n_seeds):
                results.append(
                    mc_task(cfg, child_seed(master_seed, ki, mi, trial), mu=mu))
    return results


def mc_summarize(results) -> list[McSummary]:
    """Mean and standard deviation per (kind, mix) cell, in first-seen order."""
    groups: dict[tuple, list[float]] = {}
    for r in results:
        groups.setdefault((r.kind, r.mix), []).append(r.mc)
    return [
        McSummary(kind=kind, mix=mix, n_seeds=len(vals),
                  mc_mean=float(np.mean(vals)), mc_std=float(np.std(vals)))
        for (kind, mix), vals in groups.items()
    ]


# ---------------------------------------------------------------------------
# Memory-nonlinearity trade-off


@dataclass(frozen=True)
class TradeoffCell:
    tau: int
    nu: float
    best_nrmse: float
    best_config: ReservoirConfig | None
    n_failed: int = 0


def _tradeoff_input(search_seed: int) -> np.ndarray:
    return uniform_matrix(make_rng(child_seed(search_seed, 0)), 1,
                          TRADEOFF_TOTAL_STEPS, -1.0, 1.0)


def _draw_trial_config(rng, kind: ModelKind, n_r: int) -> ReservoirConfig:
    # Draw order: rho, omega, mix (mix-kinds only), then the init seed.
    rho = float(rng.uniform(0.1, 3.0))
    omega = float(rng.uniform(0.2, 6.0))
    if kind.fixed_unit_mix:
        mix = 1.0
    else:
        mix = float(rng.uniform(0.1, 1.0) * 10.0 ** (-float(rng.integers(0, 2))))
    return ReservoirConfig(kind=kind, n_r=n_r, n_i=1, n_o=1, rho=rho,
                           omega=omega, mix=mix,
                           seed=int(rng.integers(0, 2 ** 63)))


def tradeoff_trial(kind: ModelKind, tau: int, nu: float, u: np.ndarray,
                   trial_seed: int, n_r: int, mu: float) -> tuple[float, ReservoirConfig]:
    """One random configuration on the target sin(nu * u[t - tau])."""
    rng = make_rng(trial_seed)
    cfg = _draw_trial_config(rng, kind, n_r)
    params = init(cfg)
    with np.errstate(over="ignore", invalid="ignore"):
        trajectory = drive(params, cfg, u)
        if not np.isfinite(trajectory.states).all():
            raise FloatingPointError("reservoir states diverged")
        y = np.zeros(TRADEOFF_TOTAL_STEPS)
        y[tau:] = np.sin(nu * u[0, :TRADEOFF_TOTAL_STEPS - tau])
        train = Trajectory(states=trajectory.states[:, :TRADEOFF_TRAIN_END + 1].copy(),
                           inputs=u[:, :TRADEOFF_TRAIN_END].copy())
        readout = fit(train, y[None, :TRADEOFF_TRAIN_END], mu, TRADEOFF_WASHOUT)
        z = predict(readout, trajectory.states[:, TRADEOFF_TRAIN_END + 1:])
    err = nrmse(y[TRADEOFF_TRAIN_END:], z[0])
    if not math.isfinite(err):
        raise FloatingPointError("non-finite NRMSE")
    return err, cfg


def tradeoff_cell(kind: ModelKind, tau: int, log_nu: float, n_trials: int,
                  search_seed: int, cell_index: int, n_r: int = 100,
                  mu: float = MC_DEFAULT_MU,
                  u: np.ndarray | None = None) -> TradeoffCell:
    """One grid cell. Trial seeds depend only on (search_seed, cell_index,
    trial), so cells can run in any order or process and still reproduce
    the serial grid exactly."""
    if u is None:
        u = _tradeoff_input(search_seed)
    nu = math.exp(log_nu)
    best, best_cfg, failed = math.inf, None, 0
    for trial in range(n_trials):
        trial_seed = child_seed(search_seed, 1, cell_index, trial)
        try:
            err, cfg = tradeoff_trial(kind, int(tau), nu, u, trial_seed, n_r, mu)
        except Exception:
            failed += 1
            continue
        if err < best:
            best, best_cfg = err, cfg
    return TradeoffCell(tau=int(tau), nu=nu, best_nrmse=best,
                        best_config=best_cfg, n_failed=failed)


def tradeoff_grid(kind: ModelKind, taus, log_nus, n_trials: int,
                  search_seed: int, n_r: int = 100,
                  mu: float = MC_DEFAULT_MU) -> list[TradeoffCell]:
    """Best test NRMSE per (tau, log nu) cell over n_trials random configs.

    log nu is the natural logarithm of the nonlinearity strength. One
    input signal, derived from the search seed, is shared by every cell;
    configurations are drawn independently per cell and trial. Cells whose
    every trial fails carry best_nrmse = inf and best_config = None rather
    than being dropped.
    """
    u = _tradeoff_input(search_seed)
    cells = []
    for cell_index, (tau, log_nu) in enumerate(
            (t, l) for t in taus for l in log_nus):
        cells.append(tradeoff_cell(kind, int(tau), float(log_nu), n_trials,
                                   search_seed, cell_index, n_r, mu, u=u))
    return cells


# ---------------------------------------------------------------------------
# MSO8


@dataclass(frozen=True)
class MsoSignal:
    """Normalized superposition of eight incommensurate sines."""

    values: np.ndarray
    frequencies: tuple
    period: int
    offset: float
    scale: float


def mso8_signal(length: int) -> MsoSignal:
    """The eight-sine signal at integer times t = 1..length, normalized.

    The raw sum is centered by its mean over the first almost-period and
    scaled by the max absolute centered value over that window (inflated
    by 1e-6), giving zero mean over the period and values strictly inside
    (-1, 1). The window statistics are fixed, so a longer request extends
    the same signal rather than rescaling it.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    span = max(length, MSO_PERIOD)
    t = np.arange(1, span + 1, dtype=float)
    raw = np.sin(np.outer(np.array(MSO_FREQUENCIES), t)).sum(axis=0)
    window = raw[:MSO_PERIOD]
    offset = float(window.mean())
    scale = float(np.abs(window - offset).max()) * (1.0 + 1e-6)
    values = (raw - offset) / scale
    return MsoSignal(values=values[:length].copy(), frequencies=MSO_FREQUENCIES,
                     period=MSO_PERIOD, offset=offset, scale=scale)


def mso8_experiment(config: ReservoirConfig, train_len: int = MSO_TRAIN_LEN,
                    eval_windows=((1, 300),), mu: float = 0.0,
                    washout: int = MSO_WASHOUT) -> list[float]:
    """Teacher-forced training followed by closed-loop generation.

    The signal drives the reservoir as input (with state noise per
    config.noise_std); the readout is fit to predict the next signal value,
    which makes feeding the output back reproduce the teacher-forced input
    sequence exactly when the fit is exact. Generation starts from the
    final training state. Each (start, length) window, indexed from
    autonomous step 1, yields one NRMSE against the continued signal;
    windows not fully generated before a divergence come back infinite.
    """
    if config.n_i != 1 or config.n_o != 1:
        raise ValueError("the MSO8 task is one-dimensional")
    windows = [(int(s), int(n)) for s, n in eval_windows]
    if not windows or any(s < 1 or n < 2 for s, n in windows):
        raise ValueError("windows must have start >= 1 and length >= 2")
    steps = max(s + n - 1 for s, n in windows)
    y = mso8_signal(train_len + 1 + steps).values

    params = init(config)
    inputs = y[:train_len][None, :]
    noise_rng = make_rng(child_seed(config.seed, 1))
    trajectory = drive(params, config, inputs, rng_noise=noise_rng)
    # State x[t] is paired with y[t+1]: the next signal value.
    readout = fit(trajectory, y[1:train_len + 1][None, :], mu, washout)

    try:
        z = generate_closed_loop(params, config, readout,
                                 trajectory.states[:, -1], steps)
        generated = steps
    except DivergenceError as exc:
        z = exc.partial
        generated = z.shape[1]

    errors = []
    for s0, n in windows:
        if s0 + n - 1 > generated:
            errors.append(math.inf)
            continue
        target = y[train_len + s0: train_len + s0 + n]
        errors.append(nrmse(target, z[0, s0 - 1: s0 - 1 + n]))
    return errors


# ---------------------------------------------------------------------------
# Random hyperparameter search


@dataclass(frozen=True)
class SearchSpace:
    """Uniform sampling ranges for the MSO8 hyperparameter search."""

    kind: ModelKind
    n_r: int
    rho: tuple = (0.8, 1.2)
    omega: tuple = (0.0, 0.4)
    mix: tuple = (0.01, 0.1)
    noise_std: float = MSO_NOISE_STD


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    rho: float
    omega: float
    mix: float
    nrmse: float
    error: str | None = None


def search_trial_config(space: SearchSpace, master_seed: int, trial: int) -> ReservoirConfig:
    """Config for one search trial; draw order rho, omega, mix."""
    rng = make_rng(child_seed(master_seed, trial))
    rho = float(rng.uniform(*space.rho))
    omega = float(rng.uniform(*space.omega))
    mix = 1.0 if space.kind.fixed_unit_mix else float(rng.uniform(*space.mix))
    return ReservoirConfig(kind=space.kind, n_r=space.n_r, n_i=1, n_o=1,
                           rho=rho, omega=omega, mix=mix,
                           seed=child_seed(master_seed, trial, 1),
                           noise_std=space.noise_std)


def run_search_trial(task: str, space: SearchSpace, master_seed: int, trial: int,
                     train_len: int = MSO_TRAIN_LEN,
                     eval_window: tuple = (1, 300)) -> TrialRecord:
    if task != "mso8":
        raise ValueError(f"unknown search task {task!r}; known tasks: mso8")
    cfg = search_trial_config(space, master_seed, trial)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            err = mso8_experiment(cfg, train_len=train_len,
                                  eval_windows=(eval_window,))[0]
        return TrialRecord(trial=trial, rho=cfg.rho, omega=cfg.omega,
                           mix=cfg.mix, nrmse=err)
    except Exception as exc:
        return TrialRecord(trial=trial, rho=cfg.rho, omega=cfg.omega,
                           mix=cfg.mix, nrmse=math.inf,
                           error=f"{type(exc).__name__}: {exc}")


def random_search(task: str, n_trials: int, space: SearchSpace, master_seed: int,
                  train_len: int = MSO_TRAIN_LEN,
                  eval_window: tuple = (1, 300)) -> tuple[ReservoirConfig, list[TrialRecord]]:
    """Uniform random search; failed trials are recorded, never fatal.

    Returns the best trial's config (lowest NRMSE, earliest trial on ties)
    and the full result table.
    """
    if n_trials < 1:
        raise ValueError("at least one trial is required")
    records = [run_search_trial(task, space, master_seed, j, train_len, eval_window)
               for j in range(n_trials)]
    best = min(records, key=lambda r: (r.nrmse, r.trial))
    return search_trial_config(space, master_seed, best.trial), records


# ---------------------------------------------------------------------------
# CSV export (schemas consumed by the figures component)


def write_mc_k_csv(path, results) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("model,mix,seed,k,mc_k\n")
        for r in results:
            for k in range(1, r.k_max + 1):
                fh.write(f"{r.kind.value},{format_float(r.mix)},{r.seed},"
                         f"{k},{format_float(r.mc_k[k - 1])}\n")


def write_mc_summary_csv(path, summaries) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("model,mix,n_seeds,mc_mean,mc_std\n")
        for s in summaries:
            fh.write(f"{s.kind.value},{format_float(s.mix)},{s.n_seeds},"
                     f"{format_float(s.mc_mean)},{format_float(s.mc_std)}\n")


def write_tradeoff_csv(path, cells) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("tau,log_nu,best_nrmse\n")
        for c in cells:
            fh.write(f"{c.tau},{format_float(math.log(c.nu))},"
                     f"{format_float(c.best_nrmse)}\n")


def write_mso_run_csv(path, t_values, target, output) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("t,target,output\n")
        for t, y, z in zip(t_values, target, output):
            fh.write(f"{t},{format_float(y)},{format_float(z)}\n")


def write_search_csv(path, records) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("trial,rho,omega,mix,nrmse\n")
        for r in records:
            fh.write(f"{r.trial},{format_float(r.rho)},{format_float(r.omega)},"
                     f"{format_float(r.mix)},{format_float(r.nrmse)}\n")
