"""Spectral and Lyapunov analysis along driven trajectories.

The central objects are the per-step Jacobians J[t] of the state map,
evaluated at (u[t+1], x[t]). For the es2n model every eigenvalue of every
J[t] lies in an annulus around the circle of radius 1 - mix, of half-width
mix * gamma * sigma, where sigma is the largest singular value of
rho * W_r and gamma bounds the activation-derivative diagonal. The leaky
model satisfies the analogous disc bound around the point 1 - mix. The
maximum local Lyapunov exponent is squeezed between log(1 - mix*(gamma*sigma+1))
and log(1 + mix*(gamma*sigma-1)); these facts are verified at runtime, not
assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import eigenvalues, format_float, singular_values, spectral_norm
from .reservoir import ModelKind, ReservoirConfig, ReservoirParams, Trajectory, jacobian

# Slack applied when checking eigenvalue moduli against the annulus/disc
# bounds; absorbs finite-precision eigensolves.
MODULUS_SLACK = 1e-10

_BOUND_SLACK = 1e-9


class DegenerateJacobianError(RuntimeError):
    """A per-step Jacobian had a zero singular value, so log r is undefined."""


class BoundViolationError(RuntimeError):
    """A runtime-verified spectral bound failed to hold."""


@dataclass(frozen=True)
class AnnulusBounds:
    """Containment region for Jacobian eigenvalue moduli.

    With leaky=False the region is the annulus [inner, outer] around the
    origin-centered circle of radius center_radius; with leaky=True it is
    the disc of radius half_width around the real point center_radius.
    Either way every eigenvalue modulus falls inside [inner, outer].
    """

    center_radius: float
    half_width: float
    inner: float
    outer: float
    leaky: bool


@dataclass(frozen=True)
class SpectrumReport:
    """Per-step Jacobian eigenvalues plus the quantities bounding them."""

    eigenvalues: list
    sigma: float
    gamma: float
    bounds: AnnulusBounds


@dataclass(frozen=True)
class LyapunovReport:
    """Maximum local Lyapunov exponent with its analytic squeeze."""

    mlle: float
    lower: float
    upper: float
    per_step_max_log_sv: np.ndarray
    gamma: float
    sigma: float


def esp_sufficient(params: ReservoirParams, config: ReservoirConfig) -> tuple[bool, float]:
    """Contraction check: sigma = ||rho W_r|| < 1 guarantees the echo state
    property for any input. A False result means "not guaranteed by this
    criterion", not that the property fails."""
    sigma = config.rho * spectral_norm(params.w_r)
    return bool(sigma < 1.0), float(sigma)


def _preactivations(params: ReservoirParams, config: ReservoirConfig,
                    trajectory: Trajectory) -> np.ndarray:
    # Column t is the pre-activation entering step t+1: the one J[t] sees.
    return (config.rho * (params.w_r @ trajectory.states[:, :-1])
            + config.omega * (params.w_in @ trajectory.inputs))


def empirical_gamma(params: ReservoirParams, config: ReservoirConfig,
                    trajectory: Trajectory) -> float:
    """Largest activation-derivative entry observed along the trajectory.

    Always in (0, 1] for tanh models; identity-activation kinds are
    rejected (their derivative is the constant 1).
    """
    if not config.kind.uses_tanh:
        raise ValueError(f"{config.kind.value} has no activation derivative to bound")
    d = 1.0 - np.tanh(_preactivations(params, config, trajectory)) ** 2
    return float(d.max())


def _gamma_for(params: ReservoirParams, config: ReservoirConfig,
               trajectory: Trajectory) -> float:
    if config.kind.uses_tanh:
        return empirical_gamma(params, config, trajectory)
    return 1.0


def annulus_bounds(config: ReservoirConfig, gamma: float, sigma: float) -> AnnulusBounds:
    if gamma < 0 or sigma < 0:
        raise ValueError("gamma and sigma must be >= 0")
    center = 1.0 - config.mix
    half = config.mix * gamma * sigma
    return AnnulusBounds(
        center_radius=center,
        half_width=half,
        inner=max(0.0, center - half),
        outer=center + half,
        leaky=config.kind is ModelKind.LEAKY_ESN,
    )


def _jacobians(params: ReservoirParams, config: ReservoirConfig,
               trajectory: Trajectory):
    for t in range(trajectory.n_steps):
        yield t, jacobian(params, config, trajectory.inputs[:, t],
                          trajectory.states[:, t])


def spectrum_along(params: ReservoirParams, config: ReservoirConfig,
                   trajectory: Trajectory) -> SpectrumReport:
    """Eigenvalues of every J[t] along the trajectory, with sigma, the
    empirical gamma, and the containment bounds they impose."""
    sigma = config.rho * spectral_norm(params.w_r)
    gamma = _gamma_for(params, config, trajectory)
    spectra = []
    for t, jac in _jacobians(params, config, trajectory):
        try:
            spectra.append(eigenvalues(jac))
        except Exception as exc:
            raise type(exc)(f"eigensolve failed at step {t}: {exc}") from exc
    return SpectrumReport(
        eigenvalues=spectra,
        sigma=float(sigma),
        gamma=float(gamma),
        bounds=annulus_bounds(config, gamma, sigma),
    )


def verify_containment(report: SpectrumReport, slack: float = MODULUS_SLACK) -> None:
    """Raise BoundViolationError if any eigenvalue modulus escapes
    [inner - slack, outer + slack]."""
    lo = report.bounds.inner - slack
    hi = report.bounds.outer + slack
    for t, eigs in enumerate(report.eigenvalues):
        moduli = np.abs(eigs)
        if moduli.min() < lo or moduli.max() > hi:
            raise BoundViolationError(
                f"step {t}: eigenvalue modulus outside [{lo}, {hi}] "
                f"(range [{moduli.min()}, {moduli.max()}])"
            )


def mlle(params: ReservoirParams, config: ReservoirConfig,
         trajectory: Trajectory) -> LyapunovReport:
    """Maximum local Lyapunov exponent of the trajectory.

    Per step, r_n[t] is the n-th singular value of J[t] (sorted
    descending); the exponent is the largest, over n, of the time averages
    of log r_n[t]. With the descending sort that maximum is attained at
    n = 1, and the report also carries the per-step log of the top
    singular value. The analytic squeeze lower <= mlle <= upper is checked
    before returning.
    """
    t_len = trajectory.n_steps
    n_r = config.n_r
    log_sv = np.empty((t_len, n_r))
    for t, jac in _jacobians(params, config, trajectory):
        sv = singular_values(jac)
        if sv[-1] <= 0.0:
            raise DegenerateJacobianError(
                f"step {t}: zero singular value, log r is undefined"
            )
        log_sv[t] = np.log(sv)
    per_index_avg = log_sv.mean(axis=0)
    lam = float(per_index_avg.max())

    sigma = config.rho * spectral_norm(params.w_r)
    gamma = _gamma_for(params, config, trajectory)
    low_arg = 1.0 - config.mix * (gamma * sigma + 1.0)
    high_arg = 1.0 + config.mix * (gamma * sigma - 1.0)
    lower = float(np.log(low_arg)) if low_arg > 0 else -np.inf
    upper = float(np.log(high_arg)) if high_arg > 0 else -np.inf
    if lam < lower - _BOUND_SLACK or lam > upper + _BOUND_SLACK:
        raise BoundViolationError(
            f"exponent {lam} escapes squeeze [{lower}, {upper}]"
        )
    return LyapunovReport(
        mlle=lam,
        lower=lower,
        upper=upper,
        per_step_max_log_sv=log_sv[:, 0].copy(),
        gamma=float(gamma),
        sigma=float(sigma),
    )


def spectrum_to_csv(report: SpectrumReport, path) -> None:
    """Eigenvalue export, one row per eigenvalue: re, im, step."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("re,im,step\n")
        for t, eigs in enumerate(report.eigenvalues):
            for mu in eigs:
                fh.write(f"{format_float(mu.real)},{format_float(mu.imag)},{t}\n")
