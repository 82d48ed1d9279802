"""
SVG rendering of the obstruction chart
Arcs in canonical (a < b) coordinates, crossings and the diagonal on the
unit square; output is byte-stable for identical atlases
"""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.collections import LineCollection
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "quadrisecant-chart"
matplotlib.rcParams["svg.fonttype"] = "none"


def _polylines(arc):
    """Canonical chart polyline, broken where it wraps across the square"""
    pts = np.array([s.coord.canonical for s in arc.samples])
    pieces, start = [], 0
    for i in range(1, len(pts)):
        if np.abs(pts[i] - pts[i - 1]).max() > 0.5:
            pieces.append(pts[start:i])
            start = i
    pieces.append(pts[start:])
    return [p for p in pieces if len(p) >= 2]


def write_chart(atlas, path, title: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot([0, 1], [0, 1], color="0.6", lw=0.8, ls="--")
    segments = [piece for arc in atlas.arcs for piece in _polylines(arc)]
    if segments:
        ax.add_collection(LineCollection(segments, colors="tab:blue", linewidths=1.0))
    if atlas.crossings:
        xy = np.array([c.coord.canonical for c in atlas.crossings])
        ax.scatter(xy[:, 0], xy[:, 1], s=18, color="tab:red", zorder=3)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    ax.set_title(title or f"component {atlas.component}: {len(atlas.arcs)} arcs, "
                          f"{len(atlas.crossings)} crossings")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
