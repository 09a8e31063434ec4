"""Matplotlib figure rendering for the CLI report paths.

Figures are rendered headlessly (Agg) straight to files next to the
delimited outputs; nothing here opens a window.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["save_contour_figure", "save_convergence_figure"]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_contour_figure(study, path: str | Path) -> Path:
    """Filled contour of the ellipsoid risk ratio with the sub-unit region outlined."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    A, B = np.meshgrid(study.alphas, study.betas)
    levels = np.unique(
        np.round(np.linspace(float(study.values.min()), float(np.percentile(study.values, 98)), 14), 4)
    )
    cf = ax.contourf(A, B, study.values, levels=levels, cmap="viridis", extend="max")
    fig.colorbar(cf, ax=ax, label="risk ratio")
    ax.contour(A, B, study.values, levels=[1.0], colors="red", linewidths=1.2)
    ax.plot([study.min_alpha], [study.min_beta], "r+", markersize=10)
    ax.annotate(
        f"min {study.min_value:.6f}",
        (study.min_alpha, study.min_beta),
        textcoords="offset points",
        xytext=(8, 6),
        color="red",
        fontsize=9,
    )
    ax.set_xscale("log")
    ax.set_xlabel("alpha")
    ax.set_ylabel("beta")
    ax.set_title("Uniform / re-allocated risk ratio (ellipsoid); red: ratio = 1")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def save_convergence_figure(drifts: dict[str, dict[str, list[float]]], path: str | Path) -> Path:
    """Rescaled finite-n risks vs budget, one line per sequence, with limits dashed.

    ``drifts`` maps a label to {"n": [...], "rescaled": [...], "limit": x}.
    """
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for label, series in drifts.items():
        (line,) = ax.plot(series["n"], series["rescaled"], "o-", label=label)
        ax.axhline(series["limit"], color=line.get_color(), linestyle="--", linewidth=0.8)
    ax.set_xscale("log")
    ax.set_xlabel("budget n")
    ax.set_ylabel("rescaled risk")
    ax.set_title("Finite-n risks approaching their asymptotic coefficients")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
