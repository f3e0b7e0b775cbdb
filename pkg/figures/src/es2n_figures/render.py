"""Deterministic figure rendering from experiment CSV files.

Six figure families map one-to-one onto the CSV schemas the experiment
harness emits. All science numbers come from the CSVs; this module only
plots them. Rendering is pinned (backend, size, dpi, fonts, colors) so the
same inputs always produce the same pixels.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LinearSegmentedColormap
from matplotlib.figure import Figure

FIGURE_IDS = (
    "eigenspectrum",
    "mc_curves",
    "tradeoff_heatmap",
    "tradeoff_traces",
    "mso_traces",
    "search_scatter",
)

MODEL_COLORS = {
    "es2n": "red",
    "leaky_esn": "green",
    "linear_scr": "black",
    "ortho_esn": "blue",
    "linear_esn": "orange",
}
# Trace files carry no model column; series are colored by position.
SERIES_PALETTE = ("red", "green", "blue", "orange", "purple")

# NRMSE 0 -> black, NRMSE >= 1 -> saturated yellow.
HEATMAP_CMAP = LinearSegmentedColormap.from_list(
    "black_yellow", [(0.0, 0.0, 0.0), (1.0, 1.0, 0.0)])

_RC = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "svg.hashsalt": "es2n-figures",
}


class SchemaError(ValueError):
    """An input CSV does not carry the columns its figure id requires."""


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    inputs: tuple
    output: str

    def __post_init__(self):
        if self.figure not in FIGURE_IDS:
            raise ValueError(
                f"unknown figure id {self.figure!r}; valid ids: "
                + ", ".join(FIGURE_IDS))
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def read_columns(path, required):
    """Load a CSV as {column: array}; missing required columns raise SchemaError."""
    path = Path(path)
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path.name}: missing column(s) {', '.join(missing)}; "
                f"found {', '.join(header)}")
        rows = list(reader)
    out = {}
    for col in header:
        values = [row[col] for row in rows]
        try:
            out[col] = np.array([float(v) for v in values])
        except ValueError:
            out[col] = np.array(values)
    return out


def _new_figure(width=6.4, height=4.8):
    return Figure(figsize=(width, height))


def _eigenspectrum(inputs) -> Figure:
    fig = _new_figure(5.0, 5.0)
    ax = fig.add_subplot(111)
    theta = np.linspace(0.0, 2.0 * np.pi, 512)
    ax.plot(np.cos(theta), np.sin(theta), color="black", linewidth=1.0,
            label="unit circle")
    for i, path in enumerate(inputs):
        data = read_columns(path, ("re", "im", "step"))
        color = SERIES_PALETTE[i % len(SERIES_PALETTE)]
        ax.scatter(data["re"], data["im"], s=6, color=color,
                   label=Path(path).stem)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.legend(loc="upper right", fontsize=7)
    return fig


def _mc_curves(inputs) -> Figure:
    per_k = []
    summaries = []
    for path in inputs:
        data = read_columns(path, ())
        if {"model", "k", "mc_k"} <= set(data):
            per_k.append(data)
        elif {"model", "mix", "mc_mean"} <= set(data):
            summaries.append(data)
        else:
            raise SchemaError(
                f"{Path(path).name}: expected mc_k columns (model, k, mc_k) "
                "or summary columns (model, mix, mc_mean)")
    n_panels = (1 if per_k else 0) + (1 if summaries else 0)
    fig = _new_figure(6.4 * n_panels, 4.8)
    panel = 1
    if per_k:
        ax = fig.add_subplot(1, n_panels, panel)
        panel += 1
        for data in per_k:
            for model in sorted(set(data["model"])):
                mask = data["model"] == model
                ks = data["k"][mask]
                # average mc_k over seeds at each delay
                uniq = np.unique(ks)
                means = [data["mc_k"][mask][ks == k].mean() for k in uniq]
                ax.plot(uniq, means, color=MODEL_COLORS.get(model, "gray"),
                        label=model)
        ax.set_xlabel("delay k")
        ax.set_ylabel("MC_k")
        ax.set_ylim(-0.05, 1.05)
        ax.legend(fontsize=7)
    if summaries:
        ax = fig.add_subplot(1, n_panels, panel)
        for data in summaries:
            for model in sorted(set(data["model"])):
                mask = data["model"] == model
                order = np.argsort(data["mix"][mask])
                ax.plot(data["mix"][mask][order], data["mc_mean"][mask][order],
                        marker="o", markersize=3,
                        color=MODEL_COLORS.get(model, "gray"), label=model)
        ax.set_xscale("log")
        ax.set_xlabel("mix (leak rate / proximity)")
        ax.set_ylabel("MC")
        ax.legend(fontsize=7)
    return fig


def _tradeoff_heatmap(inputs) -> Figure:
    data = read_columns(inputs[0], ("tau", "log_nu", "best_nrmse"))
    taus = np.unique(data["tau"])
    log_nus = np.unique(data["log_nu"])
    grid = np.full((len(taus), len(log_nus)), np.nan)
    for tau, log_nu, value in zip(data["tau"], data["log_nu"], data["best_nrmse"]):
        grid[np.searchsorted(taus, tau), np.searchsorted(log_nus, log_nu)] = value
    fig = _new_figure(6.0, 4.5)
    ax = fig.add_subplot(111)
    image = ax.imshow(np.clip(grid, 0.0, 1.0), origin="lower", aspect="auto",
                      cmap=HEATMAP_CMAP, vmin=0.0, vmax=1.0,
                      extent=(log_nus[0], log_nus[-1], taus[0], taus[-1]))
    fig.colorbar(image, ax=ax, label="best NRMSE (clipped at 1)")
    ax.set_xlabel("log(nu)")
    ax.set_ylabel("tau")
    return fig


def _traces(inputs, xlabel) -> Figure:
    fig = _new_figure(8.0, 3.5)
    ax = fig.add_subplot(111)
    first = read_columns(inputs[0], ("t", "target", "output"))
    ax.plot(first["t"], first["target"], color="black", linestyle="--",
            linewidth=1.0, label="target")
    for i, path in enumerate(inputs):
        data = read_columns(path, ("t", "target", "output"))
        color = SERIES_PALETTE[i % len(SERIES_PALETTE)]
        ax.plot(data["t"], data["output"], color=color, linewidth=1.0,
                label=Path(path).stem)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("signal")
    ax.legend(fontsize=7)
    return fig


def _search_scatter(inputs) -> Figure:
    data = read_columns(inputs[0], ("trial", "rho", "omega", "mix", "nrmse"))
    finite = np.isfinite(data["nrmse"])
    best = int(np.argmin(np.where(finite, data["nrmse"], np.inf)))
    fig = _new_figure(10.5, 3.5)
    for panel, name in enumerate(("rho", "omega", "mix"), start=1):
        ax = fig.add_subplot(1, 3, panel)
        ax.scatter(data[name][finite], data["nrmse"][finite], s=4,
                   color="tab:blue")
        ax.axhline(data["nrmse"][best], color="orange", linewidth=1.0)
        ax.plot([data[name][best]], [data["nrmse"][best]], marker="o",
                markersize=5, color="red")
        ax.set_xlabel(name)
        if panel == 1:
            ax.set_ylabel("NRMSE")
    return fig


_BUILDERS = {
    "eigenspectrum": lambda inputs: _eigenspectrum(inputs),
    "mc_curves": lambda inputs: _mc_curves(inputs),
    "tradeoff_heatmap": lambda inputs: _tradeoff_heatmap(inputs),
    "tradeoff_traces": lambda inputs: _traces(inputs, "t (test step)"),
    "mso_traces": lambda inputs: _traces(inputs, "t (autonomous step)"),
    "search_scatter": lambda inputs: _search_scatter(inputs),
}


def build_figure(spec: FigureSpec) -> Figure:
    """Construct the figure object without writing it (used by tests to
    inspect data-to-pixel placement)."""
    with plt.rc_context(_RC):
        for path in spec.inputs:
            if not Path(path).exists():
                raise FileNotFoundError(f"input CSV not found: {path}")
        return _BUILDERS[spec.figure](spec.inputs)


def render(spec: FigureSpec) -> Path:
    """Render a figure spec to its output image and return the path."""
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(_RC):
        fig = build_figure(spec)
        fig.savefig(out, metadata=_strip_volatile_metadata(out.suffix))
    return out


def _strip_volatile_metadata(suffix: str):
    # PNG carries no timestamps; SVG embeds a creation date unless cleared.
    if suffix.lower() == ".svg":
        return {"Date": None}
    return None
