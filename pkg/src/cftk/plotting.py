"""SVG dumps of annulus interior regions (the only plotting the toolkit does)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geometry import Region  # noqa: E402

__all__ = ["region_svg"]


def region_svg(region: Region, path, title: str = "", points=None) -> Path:
    """Write the outer and inner boundary polygons (and optional query points) as SVG.

    Output is byte-stable: the SVG date stamp is dropped and the id salt fixed.
    """
    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "cftk", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(4, 4))
        outer = np.append(region.outer, region.outer[:1])
        inner = np.append(region.inner, region.inner[:1])
        if not region.empty:
            ax.fill(outer.real, outer.imag, color="#c6dbef", lw=0)
            ax.fill(inner.real, inner.imag, color="white", lw=0)
        ax.plot(outer.real, outer.imag, color="#08519c", lw=1)
        ax.plot(inner.real, inner.imag, color="#a50f15", lw=1)
        if points is not None:
            pts = np.asarray(points, dtype=complex)
            ax.plot(pts.real, pts.imag, "k.", ms=3)
        ax.set_aspect("equal")
        ax.set_xlim(-1.1, 1.1)
        ax.set_ylim(-1.1, 1.1)
        if title:
            ax.set_title(title, fontsize=9)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
