"""Optional PNG rendering for the CLI's --plot flag.

Imported lazily so the core library never touches matplotlib.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402


def render_simulation(path: str, ts, columns, populations):
    """Two panels: bare-basis populations and dressed-basis populations."""
    names = columns[1:]
    bare = [k for k, n in enumerate(names)
            if n.startswith(("pop_e", "pop_g"))]
    dressed = [k for k, n in enumerate(names)
               if n.startswith(("pop_plus", "pop_minus"))]
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for ax, idx, title in ((axes[0], bare, "bare basis"),
                           (axes[1], dressed, "dressed basis")):
        for k in idx:
            if np.max(populations[:, k]) < 1e-3:
                continue            # don't clutter with empty levels
            ax.plot(ts, populations[:, k], label=names[k][4:], lw=1.0)
        ax.set_ylabel("population")
        ax.set_title(title, fontsize=9)
        ax.legend(fontsize=7, ncol=4, loc="center right")
        ax.set_ylim(-0.02, 1.02)
    axes[1].set_xlabel(r"$t\,\nu_1$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep(path: str, result):
    """Fidelity curve with the extracted threshold/band marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ok = np.isfinite(result.fidelities)
    ax.plot(result.omegas[ok], result.fidelities[ok], lw=1.2)
    ax.axhline(result.threshold_level, color="grey", lw=0.6, ls="--")
    if result.threshold is not None:
        ax.axvline(result.threshold, color="tab:red", lw=0.8, ls=":",
                   label=f"threshold {result.threshold:.4g}")
        ax.legend(fontsize=8)
    if result.spec.scheme != "lightshift":
        ax.set_xscale("log")
    ax.set_xlabel(r"$\Omega'/\nu_1$")
    ax.set_ylabel("fidelity")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(f"{result.spec.scheme}, eta={result.spec.eta}", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
