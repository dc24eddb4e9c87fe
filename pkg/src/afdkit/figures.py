"""File-only matplotlib rendering for run reports.

Matplotlib is imported lazily with the Agg backend so the library works on
headless machines and never opens a window; every helper writes one PNG and
returns its path.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "save_residual_curve",
    "save_parameter_disc",
    "save_reconstruction",
    "save_signal_pair",
    "save_decay",
    "save_alignment",
]

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
    "lines.linewidth": 1.4,
}

# Log plots clip exact zeros (a nulled residual) to this floor.
_LOG_FLOOR = 1e-18


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_residual_curve(trace, path: str, ylabel: str = "residual energy") -> str:
    """Semilog residual-energy trace against the step index."""
    plt = _pyplot()
    trace = np.asarray(trace, dtype=float)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(np.arange(trace.size), np.maximum(trace, _LOG_FLOOR), marker="o", markersize=3.5)
        ax.set_xlabel("step")
        ax.set_ylabel(ylabel)
        ax.set_title("Energy decay")
        fig.savefig(path, bbox_inches="tight")
        plt.close(fig)
    return path


def save_parameter_disc(params, r_max: float, path: str) -> str:
    """Selected parameters inside the unit disc, numbered by selection order."""
    plt = _pyplot()
    params = np.asarray(params, dtype=np.complex128)
    theta = np.linspace(0.0, 2.0 * np.pi, 361)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5.2, 5.2))
        ax.plot(np.cos(theta), np.sin(theta), color="0.3")
        ax.plot(r_max * np.cos(theta), r_max * np.sin(theta), color="0.6", linestyle="--", linewidth=0.9)
        ax.scatter(params.real, params.imag, s=36, color="#c23b22", zorder=3)
        for k, a in enumerate(params, start=1):
            ax.annotate(str(k), (a.real, a.imag), textcoords="offset points", xytext=(5, 4), fontsize=8)
        ax.set_xlim(-1.05, 1.05)
        ax.set_ylim(-1.05, 1.05)
        ax.set_aspect("equal")
        ax.set_title("Selected parameters")
        fig.savefig(path, bbox_inches="tight")
        plt.close(fig)
    return path


def save_reconstruction(t, original, reconstruction, path: str) -> str:
    """Real parts of the input and its partial reconstruction, overlaid."""
    plt = _pyplot()
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(t, np.real(original), label="input", color="0.25")
        ax.plot(t, np.real(reconstruction), label="reconstruction", color="#c23b22", linestyle="--")
        ax.set_xlabel("t")
        ax.set_ylabel("Re f(t)")
        ax.set_title("Reconstruction")
        ax.legend(frameon=False)
        fig.savefig(path, bbox_inches="tight")
        plt.close(fig)
    return path


def save_signal_pair(t, signal, transformed, path: str) -> str:
    """Input signal and its circular Hilbert transform."""
    plt = _pyplot()
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(t, np.real(signal), label="input", color="0.25")
        ax.plot(t, np.real(transformed), label="Hilbert transform", color="#1f6f8b")
        ax.set_xlabel("t")
        ax.set_title("Hilbert transform")
        ax.legend(frameon=False)
        fig.savefig(path, bbox_inches="tight")
        plt.close(fig)
    return path


def save_decay(radii, measured, bound, path: str) -> str:
    """Boundary decay of the selection objective against the bound."""
    plt = _pyplot()
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(radii, np.maximum(np.asarray(measured, dtype=float), _LOG_FLOOR), marker="o", markersize=4, label="measured")
        ax.semilogy(radii, np.maximum(np.asarray(bound, dtype=float), _LOG_FLOOR), marker="s", markersize=4, linestyle="--", label="bound")
        ax.set_xlabel("radius")
        ax.set_ylabel("objective")
        ax.set_title("Boundary decay")
        ax.legend(frameon=False)
        fig.savefig(path, bbox_inches="tight")
        plt.close(fig)
    return path


def save_alignment(deviations, path: str) -> str:
    """Per-term deviation of |<GS term, reference term>| from one."""
    plt = _pyplot()
    deviations = np.asarray(deviations, dtype=float)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.bar(np.arange(1, deviations.size + 1), np.maximum(deviations, _LOG_FLOOR), color="#1f6f8b")
        ax.set_yscale("log")
        ax.set_xlabel("term")
        ax.set_ylabel("| |alignment| - 1 |")
        ax.set_title("Orthonormalization alignment")
        fig.savefig(path, bbox_inches="tight")
        plt.close(fig)
    return path
