"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one [PASS]/[FAIL] line per criterion (visible with
``pytest tests/test_acceptance.py -s``) and fails if any line failed.
The suite takes several minutes; the heavy MSO8 comparison dominates.
"""

import math

import numpy as np

from es2n.analysis import empirical_gamma, mlle, spectrum_along
from es2n.numerics import (
    child_seed,
    eigenvalues,
    make_rng,
    ridge_solve,
    singular_values,
    uniform_matrix,
)
from es2n.reservoir import ModelKind, ReservoirConfig, drive, init, jacobian, step
from es2n.tasks import (
    SearchSpace,
    mc_mix_grid,
    mc_summarize,
    mc_sweep,
    mc_task,
    mso8_experiment,
    random_search,
    tradeoff_grid,
)

from oracles import eigenvalue_oracle, fd_jacobian, match_distance, ridge_oracle


def finish(results):
    failed = [f"{name}: {detail}" for name, ok, detail in results if not ok]
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name} ({detail})")
    assert not failed, "; ".join(failed)


# ---------------------------------------------------------------------------
# Table-1 memory capacity reproduction


TABLE1_CASES = [
    # (kind, mix, rho, band); the orthogonal reservoir runs unscaled
    (ModelKind.LINEAR_SCR, 1.0, 0.9, (98.5, 99.5)),
    (ModelKind.ES2N, 0.05, 0.9, (97.0, 99.5)),
    (ModelKind.ORTHO_ESN, 1.0, 1.0, (85.0, 94.0)),
    (ModelKind.LEAKY_ESN, 1.0, 0.9, (22.0, 39.0)),
    (ModelKind.LINEAR_ESN, 1.0, 0.9, (20.0, 85.0)),
]


def test_table1_memory_capacity():
    results = []
    for mi, (kind, mix, rho, (lo, hi)) in enumerate(TABLE1_CASES):
        config = ReservoirConfig(kind=kind, n_r=100, rho=rho, omega=0.1,
                                 mix=mix, seed=0)
        scores = [mc_task(config, child_seed(12345, mi, t)).mc for t in range(10)]
        mean = float(np.mean(scores))
        results.append((
            f"table1 {kind.value} mean MC in [{lo}, {hi}]",
            lo <= mean <= hi,
            f"mean={mean:.2f} std={np.std(scores):.2f}",
        ))
    finish(results)


# ---------------------------------------------------------------------------
# MC sweep shape


def test_mc_sweep_shape():
    base = ReservoirConfig(kind=ModelKind.ES2N, n_r=100, rho=0.9, omega=0.1,
                           mix=0.05, seed=0)
    grid = list(mc_mix_grid(2718, count=18)) + [1.0]
    results = []

    sweep = mc_sweep([ModelKind.ES2N], grid, n_seeds=5, base=base, master_seed=555)
    cells = sorted(mc_summarize(sweep), key=lambda s: s.mix)
    best = max(cells, key=lambda s: s.mc_mean)
    at_one = [s for s in cells if s.mix == 1.0][0]
    results.append((
        "sweep: es2n max at mix in [0.01, 0.15]",
        0.01 <= best.mix <= 0.15,
        f"argmax mix={best.mix:.4f} MC={best.mc_mean:.2f}",
    ))
    results.append((
        "sweep: es2n max exceeds mix=1 value by >= 40",
        best.mc_mean - at_one.mc_mean >= 40.0,
        f"{best.mc_mean:.2f} vs {at_one.mc_mean:.2f}",
    ))

    sweep = mc_sweep([ModelKind.LEAKY_ESN], grid, n_seeds=5, base=base,
                     master_seed=556)
    cells = sorted(mc_summarize(sweep), key=lambda s: s.mix)
    best = max(cells, key=lambda s: s.mc_mean)
    at_one = [s for s in cells if s.mix == 1.0][0]
    results.append((
        "sweep: leaky mix=1 is grid max within one std",
        at_one.mc_mean >= best.mc_mean - best.mc_std,
        f"at mix=1: {at_one.mc_mean:.2f}; max {best.mc_mean:.2f}±{best.mc_std:.2f} "
        f"at mix={best.mix:.4f}",
    ))
    finish(results)


# ---------------------------------------------------------------------------
# Theorem verification suite


def _sweep_config(rng, kind):
    n_r = int(rng.choice([10, 50, 100]))
    rho = float(rng.uniform(0.1, 3.0))
    omega = float(rng.uniform(0.0, 6.0))
    mix = float(1.0 - rng.uniform(0.0, 1.0))  # in (0, 1]
    return ReservoirConfig(kind=kind, n_r=n_r, rho=rho, omega=omega, mix=mix,
                           seed=int(rng.integers(0, 2**63)))


def _driven(config, t_len, rng):
    params = init(config)
    u = rng.uniform(-1.0, 1.0, (1, t_len))
    return params, drive(params, config, u)


def test_annulus_containment():
    rng = make_rng(900)
    violations = 0
    for _ in range(200):
        config = _sweep_config(rng, ModelKind.ES2N)
        params, trajectory = _driven(config, 50, rng)
        report = spectrum_along(params, config, trajectory)
        for eigs in report.eigenvalues:
            moduli = np.abs(eigs)
            if (moduli < report.bounds.inner - 1e-10).any() or \
               (moduli > report.bounds.outer + 1e-10).any():
                violations += 1
    finish([(
        "annulus containment over 200 es2n configs x 50 steps",
        violations == 0,
        f"{violations} violating steps",
    )])


def test_leaky_disc_containment():
    rng = make_rng(901)
    violations = 0
    for _ in range(200):
        config = _sweep_config(rng, ModelKind.LEAKY_ESN)
        params, trajectory = _driven(config, 50, rng)
        report = spectrum_along(params, config, trajectory)
        radius = config.mix * report.gamma * report.sigma
        center = 1.0 - config.mix
        for eigs in report.eigenvalues:
            if (np.abs(eigs - center) > radius + 1e-10).any():
                violations += 1
    finish([(
        "leaky disc containment over 200 configs x 50 steps",
        violations == 0,
        f"{violations} violating steps",
    )])


def test_mlle_bounds():
    rng = make_rng(902)
    accepted = 0
    attempts = 0
    worst_margin = math.inf
    ok = True
    while accepted < 100 and attempts < 2000:
        attempts += 1
        config = _sweep_config(rng, ModelKind.ES2N)
        params, trajectory = _driven(config, 50, rng)
        gamma = empirical_gamma(params, config, trajectory)
        sigma = config.rho * singular_values(params.w_r)[0]
        if config.mix * (gamma * sigma + 1.0) >= 1.0:
            continue
        accepted += 1
        report = mlle(params, config, trajectory)
        assert math.isfinite(report.lower)
        margin = min(report.mlle - report.lower, report.upper - report.mlle)
        worst_margin = min(worst_margin, margin)
        if not report.lower <= report.mlle <= report.upper:
            ok = False
    finish([(
        "mlle inside [log(1-mix(gs+1)), log(1+mix(gs-1))] for 100 configs",
        ok and accepted == 100,
        f"accepted={accepted} worst margin={worst_margin:.2e}",
    )])


def test_mlle_tracks_minus_mix():
    results = []
    for i, mix in enumerate((0.005, 0.01, 0.02)):
        config = ReservoirConfig(kind=ModelKind.ES2N, n_r=100, rho=0.9,
                                 omega=0.1, mix=mix, seed=child_seed(903, i))
        params = init(config)
        u = uniform_matrix(make_rng(child_seed(904, i)), 1, 1000, -1.0, 1.0)
        trajectory = drive(params, config, u)
        report = mlle(params, config, trajectory)
        tol = mix * report.gamma * report.sigma + 0.01
        results.append((
            f"mlle ~ -mix at mix={mix}",
            abs(report.mlle + mix) <= tol,
            f"mlle={report.mlle:+.5f} |mlle+mix|={abs(report.mlle + mix):.5f} tol={tol:.5f}",
        ))
    finish(results)


def test_mlle_exact_special_cases():
    results = []
    config = ReservoirConfig(kind=ModelKind.LINEAR_SCR, n_r=20, rho=1.0,
                             omega=0.3, seed=905)
    params = init(config)
    u = uniform_matrix(make_rng(906), 1, 100, -1.0, 1.0)
    report = mlle(params, config, drive(params, config, u))
    results.append((
        "mlle of cyclic shift at rho=1 is 0 to 1e-12",
        abs(report.mlle) <= 1e-12,
        f"mlle={report.mlle:.2e}",
    ))

    config = ReservoirConfig(kind=ModelKind.LINEAR_ESN, n_r=50, rho=0.9, seed=907)
    params = init(config)
    u = uniform_matrix(make_rng(908), 1, 100, -1.0, 1.0)
    report = mlle(params, config, drive(params, config, u))
    expected = math.log(singular_values(config.rho * params.w_r)[0])
    results.append((
        "mlle of linear model equals log sigma_max to 1e-10",
        abs(report.mlle - expected) <= 1e-10,
        f"diff={abs(report.mlle - expected):.2e}",
    ))
    finish(results)


# ---------------------------------------------------------------------------
# Memory-nonlinearity spot checks


def test_tradeoff_spot_checks():
    results = []
    cell = tradeoff_grid(ModelKind.ES2N, [10], [1.3], n_trials=30,
                         search_seed=31337)[0]
    results.append((
        "tradeoff: es2n best NRMSE < 0.6 at ln(nu)=1.3, tau=10",
        cell.best_nrmse < 0.6,
        f"best={cell.best_nrmse:.4f}",
    ))
    cell = tradeoff_grid(ModelKind.LINEAR_SCR, [10], [1.3], n_trials=30,
                         search_seed=31337)[0]
    results.append((
        "tradeoff: linear_scr best NRMSE > 0.8 at ln(nu)=1.3, tau=10",
        cell.best_nrmse > 0.8,
        f"best={cell.best_nrmse:.4f}",
    ))
    cell = tradeoff_grid(ModelKind.LINEAR_SCR, [10], [-1.0], n_trials=30,
                         search_seed=31337)[0]
    results.append((
        "tradeoff: linear_scr best NRMSE < 0.1 at ln(nu)=-1.0, tau=10",
        cell.best_nrmse < 0.1,
        f"best={cell.best_nrmse:.4f}",
    ))
    finish(results)


# ---------------------------------------------------------------------------
# MSO8


def test_mso8_generation_and_comparison():
    results = []
    runs = []
    for t in range(10):
        config = ReservoirConfig(kind=ModelKind.ES2N, n_r=300, rho=1.0,
                                 omega=0.11, mix=0.03,
                                 seed=child_seed(2024, t), noise_std=1e-4)
        short, long_run = mso8_experiment(
            config, eval_windows=((1, 300), (15000, 300)))
        runs.append((short, long_run))
    best_short, best_long = min(runs, key=lambda r: r[0])
    results.append((
        "mso8: best-of-10 es2n-300 NRMSE(steps 1-300) < 0.1",
        best_short < 0.1,
        f"best={best_short:.4f}",
    ))
    results.append((
        "mso8: same seed NRMSE(steps 15000-15300) < 0.5",
        best_long < 0.5,
        f"value={best_long:.4f}",
    ))

    es2n_space = SearchSpace(kind=ModelKind.ES2N, n_r=100, mix=(0.01, 0.1))
    leaky_space = SearchSpace(kind=ModelKind.LEAKY_ESN, n_r=600, mix=(0.1, 1.0))
    _, es2n_records = random_search("mso8", 200, es2n_space, master_seed=771)
    _, leaky_records = random_search("mso8", 200, leaky_space, master_seed=772)
    es2n_mean = float(np.mean([r.nrmse for r in es2n_records]))
    leaky_mean = float(np.mean([r.nrmse for r in leaky_records]))
    results.append((
        "mso8: leaky-600 sweep mean NRMSE > es2n-100 sweep mean (200 configs)",
        leaky_mean > es2n_mean,
        f"leaky={leaky_mean:.4f} es2n={es2n_mean:.4f}",
    ))
    finish(results)


# ---------------------------------------------------------------------------
# Numerics oracles


def test_ridge_against_elimination_oracle():
    rng = make_rng(950)
    worst = 0.0
    for _ in range(50):
        n_r = int(rng.integers(2, 12))
        n_o = int(rng.integers(1, 4))
        t_len = int(rng.integers(n_r + 5, 60))
        mu = float(rng.uniform(1e-6, 1.0))
        x = rng.uniform(-1.0, 1.0, (n_r, t_len))
        y = rng.uniform(-1.0, 1.0, (n_o, t_len))
        w = ridge_solve(x, y, mu)
        w_ref = ridge_oracle(x, y, mu)
        worst = max(worst, np.linalg.norm(w - w_ref) / np.linalg.norm(w_ref))
    finish([(
        "oracle: ridge matches elimination on 50 instances to 1e-10",
        worst < 1e-10,
        f"worst relative error={worst:.2e}",
    )])


def test_eigenvalues_against_quartic_oracle():
    worst = 0.0
    for seed in range(20):
        a = uniform_matrix(make_rng(960 + seed), 4, 4, -1.0, 1.0)
        worst = max(worst, match_distance(eigenvalues(a), eigenvalue_oracle(a)))
    finish([(
        "oracle: eigenvalues match quartic characteristic roots to 1e-8",
        worst < 1e-8,
        f"worst distance={worst:.2e}",
    )])


def test_jacobians_against_finite_differences():
    worst = 0.0
    for kind in ModelKind:
        config = ReservoirConfig(kind=kind, n_r=15, rho=1.1, omega=0.8,
                                 mix=1.0 if kind.fixed_unit_mix else 0.35,
                                 seed=970)
        params = init(config)
        rng = make_rng(971)
        for _ in range(20):
            x = rng.uniform(-1.0, 1.0, 15)
            u = rng.uniform(-1.0, 1.0, 1)
            jac = jacobian(params, config, u, x)
            fd = fd_jacobian(lambda xx: step(params, config, xx, u), x)
            worst = max(worst, float(np.abs(jac - fd).max()))
    finish([(
        "oracle: Jacobians match central differences to 1e-5",
        worst < 1e-5,
        f"worst abs error={worst:.2e}",
    )])
