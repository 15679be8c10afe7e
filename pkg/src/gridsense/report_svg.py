"""Dependency-free SVG rendering: confusion heatmap + importance bars."""

from __future__ import annotations

import numpy as np

CELL = 90
MARGIN = 70
BAR_H = 16
BAR_GAP = 6
BAR_W = 300


def _heat_color(v: float) -> str:
    # white -> steel blue ramp
    v = min(max(v, 0.0), 1.0)
    r = int(255 - 185 * v)
    g = int(255 - 125 * v)
    b = int(255 - 75 * v)
    return f"rgb({r},{g},{b})"


def confusion_heatmap_svg(row_normalized, classes, x0=0, y0=0) -> list:
    parts = [f'<text x="{x0 + MARGIN}" y="{y0 + 20}" font-size="16" '
             f'font-family="sans-serif">Confusion matrix (row-normalized)</text>']
    m = np.asarray(row_normalized, dtype=float)
    n = len(classes)
    for i in range(n):
        for j in range(n):
            x = x0 + MARGIN + j * CELL
            y = y0 + 40 + i * CELL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                f'fill="{_heat_color(m[i, j])}" stroke="#888"/>'
            )
            parts.append(
                f'<text x="{x + CELL / 2}" y="{y + CELL / 2 + 5}" font-size="14" '
                f'font-family="sans-serif" text-anchor="middle">{m[i, j] * 100:.2f}%</text>'
            )
    for i, c in enumerate(classes):
        parts.append(
            f'<text x="{x0 + MARGIN - 8}" y="{y0 + 40 + i * CELL + CELL / 2 + 5}" '
            f'font-size="13" font-family="sans-serif" text-anchor="end">{c}</text>'
        )
        parts.append(
            f'<text x="{x0 + MARGIN + i * CELL + CELL / 2}" y="{y0 + 36 + n * CELL + 16}" '
            f'font-size="13" font-family="sans-serif" text-anchor="middle">{c}</text>'
        )
    return parts


def importance_bars_svg(scores, x0=0, y0=0, title="Top feature importances") -> list:
    parts = [f'<text x="{x0}" y="{y0 + 20}" font-size="16" '
             f'font-family="sans-serif">{title}</text>']
    if not scores:
        return parts
    vmax = max(s for _, s in scores) or 1.0
    for i, (name, score) in enumerate(scores):
        y = y0 + 40 + i * (BAR_H + BAR_GAP)
        w = BAR_W * score / vmax
        parts.append(
            f'<rect x="{x0 + 220}" y="{y}" width="{w:.1f}" height="{BAR_H}" fill="#4878a8"/>'
        )
        parts.append(
            f'<text x="{x0 + 214}" y="{y + BAR_H - 3}" font-size="11" '
            f'font-family="monospace" text-anchor="end">{name}</text>'
        )
        parts.append(
            f'<text x="{x0 + 226 + w:.1f}" y="{y + BAR_H - 3}" font-size="11" '
            f'font-family="sans-serif">{score:.3f}</text>'
        )
    return parts


def render_report_svg(row_normalized, classes, importances) -> str:
    """Full report figure: heatmap left, top-k importance bars right."""
    n = len(classes)
    heat_w = MARGIN + n * CELL + 40
    bars_h = 60 + len(importances) * (BAR_H + BAR_GAP)
    height = max(60 + n * CELL + 40, bars_h + 20)
    width = heat_w + 620
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    parts += confusion_heatmap_svg(row_normalized, classes, 0, 10)
    parts += importance_bars_svg(importances, heat_w, 10)
    parts.append("</svg>")
    return "\n".join(parts)
