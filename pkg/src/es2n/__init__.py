"""Reservoir computing at the edge of stability.

Five reservoir models (the edge-of-stability es2n, the leaky ESN, and the
linear / orthogonal / cyclic-shift baselines) with ridge-trained readouts,
spectral and Lyapunov analysis whose containment bounds are verified at
runtime, and benchmark experiments for memory capacity, the
memory-nonlinearity trade-off, and MSO8 autoregressive generation.
"""

__version__ = "0.1.0"

from .analysis import (
    AnnulusBounds,
    BoundViolationError,
    DegenerateJacobianError,
    LyapunovReport,
    SpectrumReport,
    annulus_bounds,
    empirical_gamma,
    esp_sufficient,
    mlle,
    spectrum_along,
    verify_containment,
)
from .numerics import (
    ConvergenceError,
    SingularMatrixError,
    child_seed,
    eigenvalues,
    gaussian_matrix,
    make_rng,
    qr_decompose,
    random_orthogonal,
    ridge_solve,
    singular_values,
    uniform_matrix,
)
from .readout import DivergenceError, Readout, fit, generate_closed_loop, predict
from .reservoir import (
    ModelKind,
    ReservoirConfig,
    ReservoirParams,
    Trajectory,
    drive,
    init,
    jacobian,
    step,
)
from .tasks import (
    McResult,
    MsoSignal,
    SearchSpace,
    TradeoffCell,
    TrialRecord,
    mc_mix_grid,
    mc_summarize,
    mc_sweep,
    mc_task,
    mso8_experiment,
    mso8_signal,
    nrmse,
    random_search,
    squared_correlation,
    tradeoff_grid,
)

__all__ = [name for name in dir() if not name.startswith("_")]
