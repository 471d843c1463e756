"""Figure assembly: one log-log panel per alpha, one series per gamma."""

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reader import read_results


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    output_image: str
    title: str = ""
    # slopes of the dashed guide lines; empty means one guide per gamma at
    # the theoretical rate recorded in the CSV
    reference_slopes: tuple = field(default_factory=tuple)


def _series(rows):
    """Group rows into {alpha: {gamma: (dims, errors, emp, theo)}}."""
    panels = {}
    for r in rows:
        panels.setdefault(r.alpha, {}).setdefault(r.gamma, []).append(r)
    out = {}
    for alpha, by_gamma in sorted(panels.items()):
        out[alpha] = {}
        for gamma, rs in sorted(by_gamma.items()):
            rs = sorted(rs, key=lambda r: r.dim)
            dims = np.array([r.dim for r in rs], dtype=float)
            errs = np.array([r.error for r in rs])
            out[alpha][gamma] = (dims, errs, rs[0].empirical_rate,
                                 rs[0].theoretical_rate)
    return out


def render(spec):
    """Render the figure described by ``spec`` and write the image file.

    Returns the matplotlib Figure. The input CSV is only read.
    """
    rows = read_results(spec.input_csv)
    panels = _series(rows)
    n = len(panels)
    fig, axes = plt.subplots(1, n, figsize=(5.2 * n, 4.2), squeeze=False)
    for ax, (alpha, by_gamma) in zip(axes[0], panels.items()):
        for gamma, (dims, errs, emp, theo) in by_gamma.items():
            ax.loglog(
                dims,
                errs,
                marker="o",
                label=(f"$\\gamma$={gamma:g}: emp {emp:.3f}, "
                       f"theo {theo:.3f}"),
            )
            slopes = spec.reference_slopes or (theo,)
            for s in slopes:
                # anchor each guide at the first data point
                guide = errs[0] * (dims / dims[0]) ** (-s)
                ax.loglog(dims, guide, linestyle="--", color="0.55",
                          linewidth=0.9)
        ax.set_xlabel("dimension")
        ax.set_ylabel("error")
        ax.set_title(f"$\\alpha$={alpha:g}")
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.25)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    out = Path(spec.output_image)
    out.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata so identical inputs give identical bytes
    fig.savefig(out, dpi=150, metadata={"Software": "convergence_plots"})
    return fig
