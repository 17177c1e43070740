"""Figures written next to the tabular outputs.

Only the Agg backend is used; nothing here opens a window.
"""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .potential import FREE_SPACE_COEFFICIENT  # noqa: E402

_STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 120,
    "savefig.dpi": 200,
    "savefig.bbox": "tight",
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "axes.spines.top": False,
    "axes.spines.right": False,
    # reproducible PNGs
    "svg.hashsalt": "casimir-plate",
}

_MARKERS = {"far": "o", "wick": "s", "abel": "^", "double": "x", "free": "D"}


def _finite(values):
    return np.array([v if v is not None and math.isfinite(v) else np.nan for v in values], dtype=float)


def _save(fig, path):
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_scan(rows: list[dict], path) -> None:
    """Reduced coefficient against the plate distance of the nearer atom.

    x axis is min(z_a, z_b)/R, so the free-space value is approached to the
    right; the dashed line marks -23/(4 pi).
    """
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        methods = sorted({r["method_key"] for r in rows if r.get("method_key")})
        for m in methods:
            sel = [r for r in rows if r.get("method_key") == m and r.get("R")]
            x = _finite([min(r["z_a"], r["z_b"]) / r["R"] for r in sel])
            y = _finite([r.get("reduced_coefficient") for r in sel])
            ax.plot(x, y, linestyle="none", marker=_MARKERS.get(m, "."), label=m, fillstyle="none")
        ax.axhline(FREE_SPACE_COEFFICIENT, color="0.5", linestyle="--", linewidth=0.8, label="free space")
        ax.set_xscale("symlog", linthresh=1e-2)
        ax.set_xlabel(r"$\min(z_A, z_B)/R$")
        ax.set_ylabel(r"$\Delta E\, R^7 / (\hbar c\, \alpha_A \alpha_B)$")
        ax.legend()
        _save(fig, path)


def plot_compare(rows: list[dict], tol: float, path) -> None:
    """Largest pairwise relative deviation per grid point."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        dev = _finite([r.get("max_deviation") for r in rows])
        idx = np.arange(len(rows))
        floor = np.finfo(float).eps
        ok = np.array([bool(r.get("passed")) for r in rows])
        ax.semilogy(idx[ok], np.maximum(dev[ok], floor), "o", fillstyle="none", label="pass")
        if (~ok).any():
            bad = np.where(np.isfinite(dev[~ok]), dev[~ok], 1.0)
            ax.semilogy(idx[~ok], np.maximum(bad, floor), "x", color="C3", label="fail")
        ax.axhline(tol, color="0.5", linestyle="--", linewidth=0.8, label=f"tol = {tol:g}")
        ax.set_xlabel("grid point")
        ax.set_ylabel("max pairwise relative deviation")
        ax.legend()
        _save(fig, path)


def plot_correlation(rows: list[dict], path) -> None:
    """Diagonal correlation components against z_a, one line per (k, z_b, rho)."""
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, 3, figsize=(10, 3.2), sharex=True)
        keys = sorted({(r["k"], r["z_b"], r["rho"]) for r in rows})
        for i, key in enumerate(keys[:12]):
            sel = sorted((r for r in rows if (r["k"], r["z_b"], r["rho"]) == key), key=lambda r: r["z_a"])
            za = [r["z_a"] for r in sel]
            for ax, comp in zip(axes, ("c_xx", "c_yy", "c_zz")):
                ax.plot(za, [r[comp] for r in sel], color=f"C{i % 10}",
                        label=f"k={key[0]:g}, z_B={key[1]:g}, rho={key[2]:g}")
        for ax, comp in zip(axes, ("xx", "yy", "zz")):
            ax.set_title(f"$C_{{{comp}}}$")
            ax.set_xlabel("$z_A$")
        axes[0].legend(fontsize=6)
        fig.tight_layout()
        _save(fig, path)
