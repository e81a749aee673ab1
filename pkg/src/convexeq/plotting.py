"""
Figures for planar partitions.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from convexeq.geometry import Polytope  # noqa: E402
from convexeq.partition import boundary_faces, ordered_vertices  # noqa: E402

SVG_RC = {
    "svg.hashsalt": "convexeq",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 8,
}


def pretty_plot(width=6, height=None):
    """A figure and axes with the package defaults; height defaults to width."""
    matplotlib.rcParams.update(SVG_RC)
    fig, ax = plt.subplots(figsize=(width, height or width))
    ax.set_aspect("equal")
    return fig, ax


def _wedge(apex, start, sweep, length, steps=32):
    th = start + np.linspace(0.0, sweep, steps)
    arc = apex + length * np.column_stack([np.cos(th), np.sin(th)])
    return np.vstack([apex, arc])


def plot_partition(S: Polytope, rows, window, boundary_samples: int = 3, ax=None):
    """Draw S, its vertex cones and edge rays, and the exterior samples by face.

    ``rows`` are ``(x, y, base_x, base_y, face)`` tuples from
    :func:`convexeq.partition.partition_table`.
    """
    if ax is None:
        _, ax = pretty_plot()
    xmin, xmax, ymin, ymax = window
    reach = 2.0 * math.hypot(xmax - xmin, ymax - ymin)
    faces = boundary_faces(S)
    labels = [f.label for f in faces]
    cmap = plt.get_cmap("tab20")
    colors = {lab: cmap(i % 20) for i, lab in enumerate(labels)}

    for f in faces:
        if len(f.points) == 1:
            ax.add_patch(Polygon(_wedge(f.points[0], f.cone[0], f.cone[1], reach), closed=True,
                                 facecolor=colors[f.label], alpha=0.15, edgecolor="none"))
        else:
            a, b = f.points
            n = np.array([math.cos(f.cone[0]), math.sin(f.cone[0])])
            for t in (np.arange(boundary_samples) + 1.0) / (boundary_samples + 1.0):
                p = (1 - t) * a + t * b
                q = p + reach * n
                ax.plot([p[0], q[0]], [p[1], q[1]], color=colors[f.label], lw=0.8, ls="--")

    if rows:
        pts = np.array([[r[0], r[1]] for r in rows])
        face = [r[4] for r in rows]
        for lab in labels:
            mask = np.array([fc == lab for fc in face])
            if mask.any():
                ax.scatter(pts[mask, 0], pts[mask, 1], s=4, color=colors[lab], label=lab, zorder=3)

    v = ordered_vertices(S)
    if len(v) >= 3:
        ax.add_patch(Polygon(v, closed=True, facecolor="0.85", edgecolor="k", lw=1.2, zorder=4))
    elif len(v) == 2:
        ax.plot(v[:, 0], v[:, 1], color="k", lw=1.5, zorder=4)
    ax.scatter(v[:, 0], v[:, 1], s=20, color="k", zorder=5)
    for i, p in enumerate(v):
        ax.annotate(f"v{i}", p, textcoords="offset points", xytext=(4, 4), zorder=6)

    ax.set_xlim(xmin, xmax)
    ax.set_ylim(ymin, ymax)
    ax.set_xlabel("$x_1$")
    ax.set_ylabel("$x_2$")
    ax.legend(loc="upper left", bbox_to_anchor=(1.01, 1.0), markerscale=3, frameon=False)
    return ax


def save_svg(fig, path) -> None:
    fig.savefig(path, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)
