"""Reservoir models: construction, state updates, and Jacobians.

Five model kinds share one state-update skeleton built around the
pre-activation a = rho * W_r x + omega * W_in u:

    es2n        x' = mix * tanh(a) + (1 - mix) * O x
    leaky_esn   x' = mix * tanh(a) + (1 - mix) * x
    ortho_esn   x' = tanh(a)            (W_r orthogonal, mix fixed to 1)
    linear_esn  x' = a                  (identity activation, mix fixed to 1)
    linear_scr  x' = a                  (W_r a circular shift, mix fixed to 1)

`mix` is the proximity of the es2n model and the leak rate of the leaky
model. Optional Gaussian state noise enters inside the activation
argument, with rho and omega active.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from numpy.random import Generator

from .numerics import (
    format_float,
    gaussian_matrix,
    make_rng,
    random_orthogonal,
    uniform_matrix,
)


class ModelKind(str, Enum):
    ES2N = "es2n"
    LEAKY_ESN = "leaky_esn"
    LINEAR_ESN = "linear_esn"
    ORTHO_ESN = "ortho_esn"
    LINEAR_SCR = "linear_scr"

    @property
    def uses_tanh(self) -> bool:
        return self in (ModelKind.ES2N, ModelKind.LEAKY_ESN, ModelKind.ORTHO_ESN)

    @property
    def fixed_unit_mix(self) -> bool:
        return self in (ModelKind.LINEAR_ESN, ModelKind.ORTHO_ESN, ModelKind.LINEAR_SCR)


@dataclass(frozen=True)
class ReservoirConfig:
    """Hyperparameters of one reservoir realization.

    mix plays the role of the proximity for es2n and the leak rate for
    leaky_esn; the three baselines require mix = 1. noise_std is the
    standard deviation of per-component Gaussian noise added to the
    activation argument during noisy (training) drives.
    """

    kind: ModelKind
    n_r: int
    n_i: int = 1
    n_o: int = 1
    rho: float = 0.9
    omega: float = 0.1
    mix: float = 1.0
    seed: int = 0
    noise_std: float = 0.0

    def __post_init__(self):
        if self.n_r < 1 or self.n_i < 1 or self.n_o < 1:
            raise ValueError("reservoir, input, and output sizes must be >= 1")
        if self.rho < 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if not 0.0 < self.mix <= 1.0:
            raise ValueError(f"mix must be in (0, 1], got {self.mix}")
        if self.kind.fixed_unit_mix and self.mix != 1.0:
            raise ValueError(f"{self.kind.value} requires mix = 1, got {self.mix}")
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")

    def with_seed(self, seed: int) -> "ReservoirConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class ReservoirParams:
    """Realized weight matrices; immutable once constructed."""

    w_r: np.ndarray
    w_in: np.ndarray
    ortho: np.ndarray

    def __post_init__(self):
        for a in (self.w_r, self.w_in, self.ortho):
            a.setflags(write=False)


@dataclass(frozen=True)
class Trajectory:
    """States x[0..T] (one per column) with the inputs u[1..T] that drove them."""

    states: np.ndarray
    inputs: np.ndarray

    def __post_init__(self):
        if self.states.ndim != 2 or self.inputs.ndim != 2:
            raise ValueError("states and inputs must be 2-D")
        if self.states.shape[1] != self.inputs.shape[1] + 1:
            raise ValueError(
                f"states must have one more column than inputs, got "
                f"{self.states.shape[1]} vs {self.inputs.shape[1]}"
            )
        self.states.setflags(write=False)
        self.inputs.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return self.inputs.shape[1]


def _shift_matrix(n: int) -> np.ndarray:
    # Lower subdiagonal plus the upper-right corner, all ones: a circular shift.
    w = np.eye(n, k=-1)
    w[0, n - 1] = 1.0
    return w


def init(config: ReservoirConfig) -> ReservoirParams:
    """Realize the weight matrices for a config.

    Draw order from the seed is fixed: W_in first (uniform in (-1, 1)),
    then W_r, then the orthogonal mixing matrix O (es2n only; identity
    placeholder otherwise).
    """
    rng = make_rng(config.seed)
    n_r = config.n_r
    w_in = uniform_matrix(rng, n_r, config.n_i, -1.0, 1.0)
    if config.kind is ModelKind.ORTHO_ESN:
        w_r = random_orthogonal(rng, n_r)
    elif config.kind is ModelKind.LINEAR_SCR:
        w_r = _shift_matrix(n_r)
    else:
        # Unit expected spectral radius for large n_r, so rho acts as the
        # spectral radius of the effective matrix rho * W_r.
        w_r = gaussian_matrix(rng, n_r, n_r, 0.0, 1.0 / np.sqrt(n_r))
    if config.kind is ModelKind.ES2N:
        ortho = random_orthogonal(rng, n_r)
    else:
        ortho = np.eye(n_r)
    return ReservoirParams(w_r=w_r, w_in=w_in, ortho=ortho)


def _update(params: ReservoirParams, config: ReservoirConfig, x: np.ndarray,
            u: np.ndarray, rng_noise: Generator | None) -> np.ndarray:
    a = config.rho * (params.w_r @ x) + config.omega * (params.w_in @ u)
    if rng_noise is not None and config.noise_std > 0:
        a += config.noise_std * rng_noise.standard_normal(config.n_r)
    kind = config.kind
    if kind is ModelKind.ES2N:
        return config.mix * np.tanh(a) + (1.0 - config.mix) * (params.ortho @ x)
    if kind is ModelKind.LEAKY_ESN:
        return config.mix * np.tanh(a) + (1.0 - config.mix) * x
    if kind is ModelKind.ORTHO_ESN:
        return np.tanh(a)
    return a  # linear_esn / linear_scr: identity activation at mix = 1


def _check_dims(config: ReservoirConfig, x: np.ndarray, u: np.ndarray) -> None:
    if x.shape != (config.n_r,):
        raise ValueError(f"state must have shape ({config.n_r},), got {x.shape}")
    if u.shape != (config.n_i,):
        raise ValueError(f"input must have shape ({config.n_i},), got {u.shape}")


def step(params: ReservoirParams, config: ReservoirConfig, x: np.ndarray,
         u: np.ndarray, rng_noise: Generator | None = None) -> np.ndarray:
    """One state update. Noise is drawn only when a generator is supplied
    and noise_std > 0, so noiseless replays consume no stream values."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    _check_dims(config, x, u)
    return _update(params, config, x, u, rng_noise)


def drive(params: ReservoirParams, config: ReservoirConfig, inputs: np.ndarray,
          x0: np.ndarray | None = None,
          rng_noise: Generator | None = None) -> Trajectory:
    """Iterate `step` over an input sequence (one column per step).

    x0 defaults to the origin. The returned trajectory includes x0 as its
    first state column.
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[0] != config.n_i:
        raise ValueError(f"inputs must have shape ({config.n_i}, T), got {inputs.shape}")
    t_len = inputs.shape[1]
    if t_len < 1:
        raise ValueError("at least one input step is required")
    x = np.zeros(config.n_r) if x0 is None else np.asarray(x0, dtype=float).copy()
    if x.shape != (config.n_r,):
        raise ValueError(f"x0 must have shape ({config.n_r},), got {x.shape}")
    states = np.empty((config.n_r, t_len + 1))
    states[:, 0] = x
    for t in range(t_len):
        x = _update(params, config, x, inputs[:, t], rng_noise)
        states[:, t + 1] = x
    return Trajectory(states=states, inputs=inputs.copy())


def jacobian(params: ReservoirParams, config: ReservoirConfig,
             u: np.ndarray, x: np.ndarray) -> np.ndarray:
    """State-to-state Jacobian of the update map at (u, x), noise disabled.

    For tanh kinds this is mix * D * rho * W_r plus the linear part, with
    D = diag(1 - tanh(a)^2) evaluated at the incoming step's
    pre-activation; identity-activation kinds have the constant Jacobian
    rho * W_r.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    _check_dims(config, x, u)
    scaled_w = config.rho * params.w_r
    kind = config.kind
    if not kind.uses_tanh:
        return scaled_w
    a = config.rho * (params.w_r @ x) + config.omega * (params.w_in @ u)
    d = 1.0 - np.tanh(a) ** 2  # tanh' reusing the activation value
    nonlinear = config.mix * (d[:, None] * scaled_w)
    if kind is ModelKind.ES2N:
        return nonlinear + (1.0 - config.mix) * params.ortho
    if kind is ModelKind.LEAKY_ESN:
        out = nonlinear
        out[np.diag_indices_from(out)] += 1.0 - config.mix
        return out
    return nonlinear  # ortho_esn, mix = 1


def trajectory_to_csv(trajectory: Trajectory, path) -> None:
    """Time-major export: row t holds x[t] followed by u[t] (blank u for t=0)."""
    states, inputs = trajectory.states, trajectory.inputs
    with open(path, "w", encoding="ascii") as fh:
        n_i = inputs.shape[0]
        for t in range(states.shape[1]):
            row = [format_float(v) for v in states[:, t]]
            if t == 0:
                row += [""] * n_i
            else:
                row += [format_float(v) for v in inputs[:, t - 1]]
            fh.write(",".join(row))
            fh.write("\n")
