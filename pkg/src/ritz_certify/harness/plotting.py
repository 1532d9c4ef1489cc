"""SVG plots computed only from emitted CSV files.

``matplotlib`` is imported lazily so the numerical code does not depend on it.
Output is byte-stable: no timestamp metadata and a fixed SVG id salt.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .report import read_csv

SERIES = {
    "fig2": ("R_norm", ["observed_max", "dk_bound", "new_bound", "u_over_gap"]),
    "laplacian": ("iteration", ["exact_sin", "dk", "sin22", "sin2indiv", "boundvec"]),
    "laplacian_residuals": ("ritz_value", ["residual_norm"]),
    "sturm": ("k", ["true_angle", "dk", "sin22_sweep", "sin2indiv_sweep", "boundvec"]),
    "sturm_residual": ("x", ["residual"]),
    "svd": ("level", ["theta_spectral", "svd_boundvec_spectral", "svd_sin22_spectral",
                      "svd_sin2indiv_spectral"]),
}
LOG_AXES = {
    "fig2": (True, True),
    "laplacian": (False, True),
    "laplacian_residuals": (False, True),
    "sturm": (False, True),
    "sturm_residual": (False, False),
    "svd": (False, True),
}


def kind_of(csv_path):
    stem = Path(csv_path).stem
    for kind in sorted(SERIES, key=len, reverse=True):
        if stem.startswith(kind):
            return kind
    raise KeyError(f"no plot layout for {stem}")


def plot_csv(csv_path, svg_path=None, kind=None):
    """Write an SVG next to ``csv_path`` (or to ``svg_path``); returns the path."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    kind = kind or kind_of(csv_path)
    xname, ynames = SERIES[kind]
    logx, logy = LOG_AXES[kind]
    table = read_csv(csv_path)
    x = table.column(xname)
    svg_path = Path(svg_path) if svg_path else Path(csv_path).with_suffix(".svg")
    with matplotlib.rc_context({"svg.hashsalt": "ritz-certify", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for name in ynames:
            if name not in table.columns:
                continue
            y = table.column(name)
            ok = np.isfinite(y) & np.isfinite(x)
            if logy:
                ok &= y > 0
            if logx:
                ok &= x > 0
            ax.plot(x[ok], y[ok], marker=".", label=name)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xname)
        ax.legend(fontsize="small")
        ax.set_title(Path(csv_path).stem)
        fig.tight_layout()
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return svg_path
