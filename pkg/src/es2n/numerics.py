"""Dense linear-algebra kernels and seeded random generation.

Everything above this module is written in terms of these operations:
matrix sampling, QR / eigenvalue / singular-value factorizations, and the
regularized least-squares solve used for readout training. All arrays are
float64. Generators are PCG64 and fully determined by their seed, so any
computation in this package replays bit-exactly.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, SeedSequence, default_rng
from scipy.linalg import cho_factor, cho_solve

RNG_ALGORITHM = "PCG64"

# Eigenvalue-solver iteration budget lives inside LAPACK (30 iterations per
# eigenvalue); we surface its failure as ConvergenceError instead of garbage.
_LAPACK_NOTE = "LAPACK iteration cap exceeded"

MAX_EIG_DIM = 5000


class ConvergenceError(RuntimeError):
    """An iterative factorization failed to converge."""


class SingularMatrixError(np.linalg.LinAlgError):
    """A solve was requested on a numerically singular system."""


def make_rng(seed: int) -> Generator:
    """Seeded 64-bit generator; identical seeds yield identical streams."""
    return default_rng(SeedSequence(seed))


def child_seed(seed: int, *indices: int) -> int:
    """Derive a child seed deterministically from (seed, indices).

    Children at distinct index tuples are statistically independent, which
    is how parallel trials get their own streams.
    """
    state = SeedSequence(seed, spawn_key=tuple(indices)).generate_state(1, np.uint64)
    return int(state[0])


def child_rng(seed: int, *indices: int) -> Generator:
    return make_rng(child_seed(seed, *indices))


def uniform_matrix(rng: Generator, rows: int, cols: int, lo: float, hi: float) -> np.ndarray:
    """Matrix of i.i.d. uniform draws on [lo, hi), filled row-major."""
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dimensions must be >= 1, got {rows}x{cols}")
    if not lo < hi:
        raise ValueError(f"uniform range requires lo < hi, got [{lo}, {hi})")
    return rng.uniform(lo, hi, size=(rows, cols))


def gaussian_matrix(rng: Generator, rows: int, cols: int, mean: float, std: float) -> np.ndarray:
    """Matrix of i.i.d. normal draws N(mean, std^2), filled row-major."""
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dimensions must be >= 1, got {rows}x{cols}")
    if std < 0:
        raise ValueError(f"standard deviation must be >= 0, got {std}")
    return mean + std * rng.standard_normal(size=(rows, cols))


def qr_decompose(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR factorization with the diagonal of R forced positive.

    The sign convention removes the column ambiguity of QR, so seeded runs
    that route random matrices through here are reproducible.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < a.shape[1]:
        raise ValueError(f"QR requires rows >= cols, got shape {a.shape}")
    q, r = np.linalg.qr(a, mode="reduced")
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs, signs[:, None] * r


def random_orthogonal(rng: Generator, n: int) -> np.ndarray:
    """Random n x n orthogonal matrix: Q from the QR of a uniform(-1,1) matrix.

    A rank-deficient draw (probability zero) is discarded and the next
    stream values are used instead.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    while True:
        q, r = qr_decompose(uniform_matrix(rng, n, n, -1.0, 1.0))
        if np.abs(np.diag(r)).min() > n * np.finfo(float).eps:
            return q


def eigenvalues(a: np.ndarray) -> np.ndarray:
    """All eigenvalues (with multiplicity) of a square real matrix, unordered.

    Uses Hessenberg reduction plus shifted QR iteration (LAPACK); raises
    ConvergenceError if the iteration cap is exhausted rather than
    returning partial results.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"eigenvalues require a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_EIG_DIM:
        raise ValueError(f"matrix dimension {a.shape[0]} exceeds cap {MAX_EIG_DIM}")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration did not converge ({_LAPACK_NOTE}): {exc}") from exc


def singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values of a matrix, sorted descending, all >= 0."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"singular values require a non-empty matrix, got shape {a.shape}")
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD iteration did not converge ({_LAPACK_NOTE}): {exc}") from exc


def spectral_norm(a: np.ndarray) -> float:
    return float(singular_values(a)[0])


def ridge_solve(x_states: np.ndarray, y_targets: np.ndarray, mu: float) -> np.ndarray:
    """Solve W = Y X^T (X X^T + mu I)^-1 through an SPD factorization.

    X is n_r x T (one state per column), Y is n_o x T. The inverse is never
    formed: with mu > 0 a Cholesky solve is used, falling back to a pivoted
    LU solve if the factorization fails. With mu = 0 the Gram matrix is
    first checked for numerical rank deficiency (smallest eigenvalue below
    n * eps times the largest), which raises SingularMatrixError naming the
    offending rank instead of returning garbage.
    """
    x_states = np.asarray(x_states, dtype=float)
    y_targets = np.asarray(y_targets, dtype=float)
    if x_states.ndim != 2 or y_targets.ndim != 2:
        raise ValueError("ridge_solve expects 2-D state and target matrices")
    n_r, t = x_states.shape
    if y_targets.shape[1] != t:
        raise ValueError(
            f"states have {t} columns but targets have {y_targets.shape[1]}"
        )
    if t < 1:
        raise ValueError("at least one time step is required")
    if mu < 0:
        raise ValueError(f"regularization must be >= 0, got {mu}")
    if not np.isfinite(x_states).all():
        raise ValueError("state matrix contains non-finite values")
    if not np.isfinite(y_targets).all():
        raise ValueError("target matrix contains non-finite values")

    gram = x_states @ x_states.T
    if mu > 0:
        gram[np.diag_indices_from(gram)] += mu
    else:
        try:
            eigs = np.linalg.eigvalsh(gram)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"Gram eigensolve did not converge: {exc}") from exc
        tol = eigs[-1] * n_r * np.finfo(float).eps
        rank = int((eigs > tol).sum())
        if eigs[-1] <= 0 or rank < n_r:
            raise SingularMatrixError(
                f"unregularized solve on rank-deficient Gram matrix (rank {rank} < {n_r})"
            )

    rhs = x_states @ y_targets.T
    try:
        w_t = cho_solve(cho_factor(gram, lower=True), rhs)
    except np.linalg.LinAlgError:
        try:
            w_t = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError(f"pivoted fallback solve failed: {exc}") from exc
    return w_t.T


def format_float(value: float) -> str:
    """17-significant-digit decimal formatting; round-trips any float64."""
    return format(value, ".17g")


def save_matrix_csv(a: np.ndarray, path) -> None:
    """Write a matrix as CSV, one row per line, full round-trip precision."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    with open(path, "w", encoding="ascii") as fh:
        for row in a:
            fh.write(",".join(format_float(v) for v in row))
            fh.write("\n")


def load_matrix_csv(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        rows = [
            [float(tok) for tok in line.strip().split(",")]
            for line in fh
            if line.strip()
        ]
    if not rows:
        raise ValueError(f"no rows in {path}")
    return np.array(rows, dtype=float)
