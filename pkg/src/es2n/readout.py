"""Linear readouts: ridge fitting with washout, prediction, and closed-loop
autoregressive generation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import ridge_solve
from .reservoir import ReservoirConfig, ReservoirParams, Trajectory, _update


class DivergenceError(RuntimeError):
    """Closed-loop generation produced a non-finite value.

    Carries the 1-based step index at which divergence was detected and
    the outputs generated before it.
    """

    def __init__(self, step: int, partial: np.ndarray):
        super().__init__(f"closed-loop generation diverged at step {step}")
        self.step = step
        self.partial = partial


@dataclass(frozen=True)
class Readout:
    """Trained output matrix with the regularization and washout used to fit it."""

    w_o: np.ndarray
    mu: float
    washout: int

    def __post_init__(self):
        if not np.isfinite(self.w_o).all():
            raise ValueError("readout weights must be finite")
        self.w_o.setflags(write=False)


def fit(trajectory: Trajectory, targets: np.ndarray, mu: float, washout: int) -> Readout:
    """Ridge-fit a readout on a driven trajectory.

    Target column t must be the desired output for state x[t+1] (the first
    state produced by the drive); the first `washout` steps of both states
    and targets are excluded from the solve.
    """
    targets = np.asarray(targets, dtype=float)
    t_len = trajectory.n_steps
    if targets.ndim != 2 or targets.shape[1] != t_len:
        raise ValueError(
            f"targets must have shape (n_o, {t_len}), got {targets.shape}"
        )
    if not 0 <= washout < t_len:
        raise ValueError(f"washout must be in [0, {t_len}), got {washout}")
    w_o = ridge_solve(trajectory.states[:, washout + 1:], targets[:, washout:], mu)
    return Readout(w_o=w_o, mu=mu, washout=washout)


def predict(readout: Readout, states: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    if states.shape[0] != readout.w_o.shape[1]:
        raise ValueError(
            f"states have {states.shape[0]} rows, readout expects {readout.w_o.shape[1]}"
        )
    return readout.w_o @ states


def generate_closed_loop(params: ReservoirParams, config: ReservoirConfig,
                         readout: Readout, x_start: np.ndarray,
                         steps: int) -> np.ndarray:
    """Run the reservoir autonomously, feeding each output back as the next input.

    Per step: the previous output (w_o applied to the current state) is fed
    as the input, the state is updated without noise, and the new output is
    read from the new state. Returns the n_o x steps output sequence.
    """
    if config.n_i != config.n_o:
        raise ValueError(
            f"feedback requires n_i == n_o, got {config.n_i} != {config.n_o}"
        )
    if readout.w_o.shape != (config.n_o, config.n_r):
        raise ValueError(
            f"readout shape {readout.w_o.shape} does not match ({config.n_o}, {config.n_r})"
        )
    if steps < 1:
        raise ValueError("at least one step is required")
    x = np.asarray(x_start, dtype=float).copy()
    if x.shape != (config.n_r,):
        raise ValueError(f"x_start must have shape ({config.n_r},), got {x.shape}")
    w_o = readout.w_o
    out = np.empty((config.n_o, steps))
    for s in range(steps):
        u = w_o @ x
        x = _update(params, config, x, u, None)
        z = w_o @ x
        if not (np.isfinite(z).all() and np.isfinite(x).all()):
            raise DivergenceError(step=s + 1, partial=out[:, :s].copy())
        out[:, s] = z
    return out
