import numpy as np
import pytest


def write_csv(path, header, rows):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    return str(path)


@pytest.fixture
def golden(tmp_path):
    """Small schema-conformant CSVs for every figure family."""
    rng = np.random.default_rng(7)
    files = {}

    # eigenspectrum of a pure orthogonal system: points exactly on the circle
    angles = rng.uniform(0.0, 2.0 * np.pi, 40)
    files["eigenspectrum_ortho"] = write_csv(
        tmp_path / "eig_ortho.csv", ["re", "im", "step"],
        [(np.cos(a), np.sin(a), 0) for a in angles])
    moduli = rng.uniform(0.85, 0.99, 30)
    angles = rng.uniform(0.0, 2.0 * np.pi, 30)
    files["eigenspectrum_inner"] = write_csv(
        tmp_path / "eig_inner.csv", ["re", "im", "step"],
        [(m * np.cos(a), m * np.sin(a), 1) for m, a in zip(moduli, angles)])

    rows = []
    for model in ("es2n", "linear_scr", "leaky_esn"):
        for seed in (0, 1):
            for k in range(1, 21):
                rows.append((model, 0.05, seed, k, float(rng.uniform(0, 1))))
    files["mc_k"] = write_csv(tmp_path / "mc_k.csv",
                              ["model", "mix", "seed", "k", "mc_k"], rows)
    rows = [(m, mix, 5, float(rng.uniform(20, 100)), 0.5)
            for m in ("es2n", "leaky_esn") for mix in (0.01, 0.1, 1.0)]
    files["mc_summary"] = write_csv(
        tmp_path / "mc_summary.csv",
        ["model", "mix", "n_seeds", "mc_mean", "mc_std"], rows)

    rows = [(tau, round(-1.0 + 0.5 * i, 3), float(rng.uniform(0, 1.5)))
            for tau in range(1, 6) for i in range(5)]
    files["tradeoff"] = write_csv(tmp_path / "tradeoff.csv",
                                  ["tau", "log_nu", "best_nrmse"], rows)
    rows = [(tau, round(-1.0 + 0.5 * i, 3), 0.0)
            for tau in range(1, 6) for i in range(5)]
    files["tradeoff_zero"] = write_csv(tmp_path / "tradeoff_zero.csv",
                                       ["tau", "log_nu", "best_nrmse"], rows)

    t = np.arange(1, 121)
    target = np.sin(0.2 * t)
    files["trace_a"] = write_csv(
        tmp_path / "trace_a.csv", ["t", "target", "output"],
        list(zip(t, target, target + 0.05 * rng.standard_normal(len(t)))))
    files["trace_b"] = write_csv(
        tmp_path / "trace_b.csv", ["t", "target", "output"],
        list(zip(t, target, target + 0.2 * rng.standard_normal(len(t)))))

    rows = [(j, float(rng.uniform(0.8, 1.2)), float(rng.uniform(0, 0.4)),
             float(rng.uniform(0.01, 0.1)), float(rng.uniform(0.005, 2.0)))
            for j in range(50)]
    files["search"] = write_csv(tmp_path / "search.csv",
                                ["trial", "rho", "omega", "mix", "nrmse"], rows)
    return files
