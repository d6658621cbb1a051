"""Figures for sweep and joint-numerical-range outputs.

Only imported when a ``--plot`` path is given, so matplotlib stays optional.
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    # fixed metadata keeps repeated renders byte-identical
    "svg.hashsalt": "cspectral",
}


def figsize(scale=1.0, ratio=0.62):
    width = 5.0 * scale
    return (width, width * ratio)


def _save(fig, path):
    meta = {"Date": None} if str(path).lower().endswith((".pdf", ".svg")) else {}
    fig.savefig(path, bbox_inches="tight", metadata=meta or None)
    plt.close(fig)


def sweep(path, result, xlabel="x", ylabel="metric"):
    """Mean with a min-max band, one point per grid value."""
    x = result.column("x")
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize())
        ax.fill_between(x, result.column("min"), result.column("max"), alpha=0.25, lw=0)
        ax.plot(x, result.column("mean"), marker="o", ms=3)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        _save(fig, path)


def jnr(path, samples, threshold=None):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize())
        for origin, marker in (("unconstrained_eigvec", "o"), ("feasible_cut", "x")):
            pts = np.array([(s.cost_coord, s.purity_coord) for s in samples if s.origin == origin])
            if len(pts):
                ax.scatter(pts[:, 0], pts[:, 1], s=12, marker=marker, label=origin.replace("_", " "))
        if threshold is not None:
            ax.axhline(threshold, color="k", lw=0.8, ls="--")
        ax.set_xlabel("cost  v'Lv")
        ax.set_ylabel("purity  v'Qv")
        ax.legend(frameon=False)
        _save(fig, path)
