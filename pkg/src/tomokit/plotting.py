"""PNG renderings of tomograms, sections and time series (Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed metadata keeps repeated renders byte-identical
_PNG_META = {"Software": None}

params = {
    "font.size": 8,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 7,
    "lines.linewidth": 1.0,
    "lines.markersize": 3,
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "image.cmap": "viridis",
}


def _save(fig, path):
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)
    return path


def render_tomogram(tom, path, title=""):
    """Tomogram as an image over ``(theta, X)``."""
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        th = tom.theta_grid.values
        x = tom.x_grid.values
        ax.pcolormesh(th / np.pi, x, tom.values.T, shading="auto", rasterized=True)
        ax.set_xlabel(r"$\theta/\pi$")
        ax.set_ylabel(r"$X_\theta$")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)


def render_section(sec, path, title=""):
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(3.4, 3.0))
        x1 = sec.x1_grid.values
        x2 = sec.x2_grid.values
        ax.pcolormesh(x1, x2, sec.values.T, shading="auto", rasterized=True)
        ax.set_xlabel(r"$X_{\theta_1}$")
        ax.set_ylabel(r"$X_{\theta_2}$")
        ax.set_aspect("equal")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)


def render_series(t, columns: dict, path, reference=None, ylabel="", title=""):
    """Line/marker plot of several series against ``t / T_rev``.

    Keys ending in ``"tomogram"`` are drawn as crosses, the rest as lines.
    """
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(4.0, 2.8))
        for name, y in columns.items():
            if name.endswith("tomogram"):
                ax.plot(t, y, "x", label=name)
            else:
                ax.plot(t, y, "-", label=name)
        if reference is not None:
            ax.axhline(reference, color="0.4", lw=0.8, ls="--")
        ax.set_xlabel(r"$t/T_{rev}$")
        if ylabel:
            ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)
