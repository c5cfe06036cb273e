"""Minimal static SVG figures: spike raster over ASDR, and fitness over generations."""
from __future__ import annotations

from pathlib import Path

import numpy as np

WIDTH = 800
MARGIN = 50


def _header(height: int) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{height}" fill="white"/>',
    ]


def _polyline(xs, ys, stroke: str, cls: str) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{stroke}" stroke-width="1"/>'


def raster_svg(times, channels, duration_s: float, asdr_counts, n_channels: int = 60) -> str:
    """Raster on top, ASDR underneath, sharing the time axis.

    Each spike is a single ``<rect class="spike">`` so marks can be counted.
    """
    raster_h, asdr_h = 300, 120
    height = MARGIN + raster_h + 30 + asdr_h + MARGIN
    plot_w = WIDTH - 2 * MARGIN
    duration_s = max(float(duration_s), 1e-9)
    sx = plot_w / duration_s
    row_h = raster_h / n_channels

    out = _header(int(height))
    out.append(f'<text x="{MARGIN}" y="{MARGIN - 15}">Spike raster ({len(times)} spikes)</text>')
    out.append(f'<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{raster_h}" '
               f'fill="none" stroke="black"/>')
    out.append('<g fill="black">')
    for t, c in zip(times, channels):
        x = MARGIN + float(t) * sx
        y = MARGIN + int(c) * row_h
        out.append(f'<rect class="spike" x="{x:.2f}" y="{y:.2f}" width="1" height="{max(row_h, 1):.2f}"/>')
    out.append("</g>")

    top = MARGIN + raster_h + 30
    counts = np.asarray(asdr_counts, dtype=float)
    peak = max(counts.max(), 1.0) if counts.size else 1.0
    out.append(f'<text x="{MARGIN}" y="{top - 5}">ASDR (spikes/s, max {int(peak)})</text>')
    out.append(f'<rect x="{MARGIN}" y="{top}" width="{plot_w}" height="{asdr_h}" fill="none" stroke="black"/>')
    if counts.size:
        xs = MARGIN + (np.arange(counts.size) + 0.5) * sx
        ys = top + asdr_h - counts / peak * asdr_h
        out.append(_polyline(xs, ys, "steelblue", "asdr"))
    out.append(f'<text x="{WIDTH / 2 - 20}" y="{height - 15}">time (s)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def fitness_svg(mean, std) -> str:
    """Mean top-k score per generation with a one-standard-deviation band."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    plot_h = 300
    height = plot_h + 2 * MARGIN
    plot_w = WIDTH - 2 * MARGIN
    lo_v = float(min(0.0, np.min(mean - std))) if mean.size else 0.0
    hi_v = 1.0
    n = max(mean.size - 1, 1)

    def x(i):
        return MARGIN + i / n * plot_w

    def y(v):
        return MARGIN + (hi_v - v) / (hi_v - lo_v) * plot_h

    out = _header(height)
    out.append(f'<text x="{MARGIN}" y="{MARGIN - 15}">Score of top individuals per generation</text>')
    out.append(f'<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>')
    if mean.size:
        upper = [f"{x(i):.2f},{y(v):.2f}" for i, v in enumerate(mean + std)]
        lower = [f"{x(i):.2f},{y(v):.2f}" for i, v in reversed(list(enumerate(mean - std)))]
        out.append(f'<polygon class="band" points="{" ".join(upper + lower)}" fill="lightsteelblue" stroke="none"/>')
        out.append(_polyline([x(i) for i in range(mean.size)], [y(v) for v in mean], "navy", "mean"))
    out.append(f'<text x="{WIDTH / 2 - 30}" y="{height - 15}">generation</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, text: str) -> Path:
    Path(path).write_text(text, encoding="utf-8", newline="\n")
    return Path(path)
