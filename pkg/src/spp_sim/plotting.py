"""Report figures rendered to PNG with the Agg backend.

Figures are built through the object API (no pyplot state), so rendering is
safe from worker processes and byte-reproducible for identical data.
"""

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

__all__ = ["plot_dispersion", "plot_trajectory", "plot_map", "plot_plan", "save"]

_METADATA = {"Software": None}


def _figure(width=5.0, height=3.6):
    fig = Figure(figsize=(width, height), dpi=100)
    FigureCanvasAgg(fig)
    return fig


def save(fig, path):
    fig.savefig(path, format="png", metadata=_METADATA)


def plot_dispersion(omega_ev, q_nm, light_q_nm, path):
    fig = _figure()
    ax = fig.add_subplot()
    ax.plot(q_nm, omega_ev, label="graphene SPP")
    ax.plot(light_q_nm, omega_ev, "--", label="light line")
    ax.set_xscale("log")
    ax.set_xlabel(r"$q$ (nm$^{-1}$)")
    ax.set_ylabel(r"$\hbar\omega$ (eV)")
    ax.legend(frameon=False)
    fig.tight_layout()
    save(fig, path)


def plot_trajectory(t, alpha, path, time_label=r"$\gamma t$"):
    fig = _figure()
    ax = fig.add_subplot()
    ax.plot(t, np.abs(alpha) ** 2, label=r"$|\alpha|^2$")
    ax.plot(t, alpha.real, lw=0.8, label=r"Re $\alpha$")
    ax.set_xlabel(time_label)
    ax.legend(frameon=False)
    fig.tight_layout()
    save(fig, path)


def plot_map(grid, path):
    fig = _figure(4.6, 4.0)
    ax = fig.add_subplot()
    mesh = ax.pcolormesh(grid.kx, grid.ky, grid.values, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$P/P_{\max}$")
    ax.set_xlabel(r"$k_x / k_{sp}$")
    ax.set_ylabel(r"$k_y / k_{sp}$")
    ax.set_aspect("equal")
    fig.tight_layout()
    save(fig, path)


def plot_plan(q_mag, delta_ev, light_cone, k_sp, path):
    fig = _figure()
    ax = fig.add_subplot()
    ax.plot(q_mag / k_sp, delta_ev, "o-")
    ax.axvline(light_cone / k_sp, ls="--", color="gray", label="light cone")
    ax.set_xlabel(r"$|q_n| / k_{sp}$")
    ax.set_ylabel(r"$\Delta_n$ (eV)")
    ax.legend(frameon=False)
    fig.tight_layout()
    save(fig, path)
