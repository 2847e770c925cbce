"""Figure rendering for the CLI report paths (Agg backend, PNG files).

PNG metadata is stripped so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_kernel_plot",
    "save_quasi_plots",
    "save_iterate_plots",
    "save_kappa_plot",
]

_META = {"Software": None}  # drop the version stamp for reproducible bytes


def _save(fig, path):
    fig.savefig(path, dpi=130, metadata=_META)
    plt.close(fig)


def save_kernel_plot(table, path) -> None:
    t = table.t_grid
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(t, table.values, lw=1.0, label="G(t)")
    env = table.decay_m1 * np.exp(-table.decay_delta1 * np.abs(t))
    ax.plot(t, env, "k--", lw=0.8, label="decay envelope")
    ax.plot(t, -env, "k--", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("kernel")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title(f"Green kernel (r1={table.r1:g}, N={table.N:g})")
    fig.tight_layout()
    _save(fig, path)


def save_quasi_plots(t, lower_vals, upper_vals, ue, outdir) -> None:
    for name, vals, color in (("quasi_upper", upper_vals, "C0"),
                              ("quasi_lower", lower_vals, "C1")):
        fig, ax = plt.subplots(figsize=(5.4, 3.6))
        ax.plot(t, vals, color=color, lw=1.2)
        ax.axhline(ue, color="gray", lw=0.6, ls=":")
        ax.set_xlabel("t")
        ax.set_ylabel("profile")
        ax.set_title(name.replace("_", " "))
        fig.tight_layout()
        _save(fig, outdir / f"{name}.png")


def save_iterate_plots(t, phi0, phi_final, lower_vals, deltas, outdir) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(t, phi0, lw=1.0, label="initial (quasi upper)")
    ax.plot(t, phi_final, lw=1.4, label="final")
    ax.plot(t, lower_vals, lw=0.8, ls="--", label="quasi lower")
    ax.set_xlabel("t")
    ax.set_ylabel("profile")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    _save(fig, outdir / "wave_profile.png")

    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    ax.semilogy(np.arange(1, len(deltas) + 1), deltas, ".-", ms=3, lw=0.8)
    ax.set_xlabel("step")
    ax.set_ylabel("sup-norm update")
    fig.tight_layout()
    _save(fig, outdir / "convergence.png")


def save_kappa_plot(rows, path) -> None:
    n = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    ax.semilogx(n, [r[2] for r in rows], "o-", label="printed integrand")
    ax.semilogx(n, [r[3] for r in rows], "s--", label="consistent integrand")
    ax.set_xlabel("subintervals n")
    ax.set_ylabel("|I_n|")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
