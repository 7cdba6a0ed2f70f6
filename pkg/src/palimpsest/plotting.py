"""SVG figures for the CLI report paths.

Output is made byte-stable: fixed hash salt, no date metadata, fixed canvas.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .graph_core import LabeledGraph, format_vertex  # noqa: E402

FIGSIZE = (800 / 72, 600 / 72)  # 800 x 600 pt canvas
DPI = 72
_SVG_META = {"Date": None, "Creator": "palimpsest"}


def _save(fig, out) -> None:
    with matplotlib.rc_context({"svg.hashsalt": "palimpsest", "svg.fonttype": "none"}):
        fig.savefig(out, format="svg", metadata=_SVG_META)
    plt.close(fig)


def frontier_figure(points, h_x: float, h_y: float, out) -> None:
    """Plot achievable (K, L) pairs along the tilted-design curve."""
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ks = [h_x + float(p.K_loss) for p in points]
    ls = [h_y + float(p.L_loss) for p in points]
    ax.plot(ks, ls, "o-", color="tab:blue", markersize=3, label="tilted design")
    if len(points) > 1:
        ax.plot([ks[0], ks[-1]], [ls[0], ls[-1]], "--", color="tab:gray", label="time sharing")
    ax.axvline(h_x, color="k", linewidth=0.5)
    ax.axhline(h_y, color="k", linewidth=0.5)
    ax.set_xlabel("K")
    ax.set_ylabel("L")
    ax.set_title("Rate pairs for one code used on both versions")
    ax.legend(loc="upper right")
    _save(fig, out)


def _circle_layout(vertices) -> dict:
    n = len(vertices)
    return {v: (math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n))
            for i, v in enumerate(vertices)}


def embedding_figure(guest: LabeledGraph, host: LabeledGraph, vertex_map: dict,
                     deleted_edges, out) -> None:
    """Host drawn dotted; images of kept guest edges drawn thick."""
    pos = _circle_layout(host.vertices)
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    for u, v, _ in host.edges():
        (x0, y0), (x1, y1) = pos[u], pos[v]
        ax.plot([x0, x1], [y0, y1], ":", color="tab:gray", linewidth=0.8)
    dropped = {frozenset(e[:2]) for e in deleted_edges}
    for u, v, _ in guest.edges():
        if frozenset((u, v)) in dropped:
            continue
        (x0, y0), (x1, y1) = pos[vertex_map[u]], pos[vertex_map[v]]
        ax.plot([x0, x1], [y0, y1], "-", color="tab:blue", linewidth=2.5)
    for h in host.vertices:
        x, y = pos[h]
        ax.plot([x], [y], "o", color="white", markeredgecolor="k", markersize=6)
        ax.annotate(format_vertex(h), (x, y), textcoords="offset points", xytext=(6, 6), fontsize=8,
                    color="tab:gray")
    for g, h in vertex_map.items():
        x, y = pos[h]
        ax.annotate(format_vertex(g), (x, y), textcoords="offset points", xytext=(6, -12),
                    fontsize=10, color="tab:blue")
    ax.set_aspect("equal")
    ax.axis("off")
    _save(fig, out)
