"""Figure rendering for training logs and bound checks.

All figures are written straight to files (Agg backend); nothing is shown
interactively.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["plot_training_curves", "plot_bound_margin"]


def plot_training_curves(records, path) -> None:
    """Risk curves and the validation metric across epochs."""
    epochs = [r.epoch for r in records]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(epochs, [r.r_psi for r in records], label="weighted risk")
    ax1.plot(epochs, [r.r_surrogate for r in records], label="truncated risk")
    ax1.plot(epochs, [r.r_zero_one for r in records], label="0-1 risk")
    ax1.set_xlabel("epoch")
    ax1.set_ylabel("risk")
    ax1.legend(fontsize=8)
    ax2.plot(epochs, [r.tpauc_val for r in records], color="tab:red")
    ax2.set_xlabel("epoch")
    ax2.set_ylabel("validation TPAUC")
    ax2.set_ylim(0.0, 1.0)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_bound_margin(report, path) -> None:
    """Margin curve of the upper-bound certificate across the exponent grid."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    margin = report.rho - report.xi
    ax.plot(report.p_values, margin, color="tab:blue")
    ax.axhline(0.0, color="black", linewidth=0.8, linestyle="--")
    ax.set_xlabel("p")
    ax.set_ylabel("margin")
    status = "indeterminate" if report.indeterminate else (
        "holds" if report.holds else "fails"
    )
    ax.set_title(f"certificate {status}; best margin {report.best_margin:.3g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
