"""SVG rendering of grid decompositions, one square per vertex."""
from __future__ import annotations

import colorsys

import numpy as np


def center_color(center: int) -> str:
    """Deterministic color for a center id (Knuth multiplicative hash -> HSV)."""
    h = (int(center) * 2654435761) & 0xFFFFFFFF
    hue = h / 2**32
    sat = 0.45 + 0.4 * ((h >> 8) & 0xFF) / 255
    val = 0.65 + 0.3 * ((h >> 16) & 0xFF) / 255
    r, g, b = colorsys.hsv_to_rgb(hue, sat, val)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def render_grid_svg(rows: int, cols: int, owner, cell: int = 4) -> str:
    owner = np.asarray(owner)
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    if owner.shape != (rows * cols,):
        raise ValueError(f"{owner.size} labels for a {rows}x{cols} grid")
    palette = {c: center_color(c) for c in np.unique(owner).tolist()}
    w, h = cols * cell, rows * cell
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" shape-rendering="crispEdges">\n'
    ]
    labels = owner.tolist()
    for i in range(rows):
        y = i * cell
        for j in range(cols):
            out.append(
                f'<rect x="{j * cell}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{palette[labels[i * cols + j]]}"/>\n'
            )
    out.append("</svg>\n")
    return "".join(out)
