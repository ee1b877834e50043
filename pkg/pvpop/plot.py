"""Deterministic SVG scatter of p-values against posterior probabilities.

The SVG is written as text so identical input gives identical bytes.
"""

from __future__ import annotations

import os
from collections.abc import Iterable
from xml.sax.saxutils import escape

from pvpop.csvio import atomic_write_text
from pvpop.errors import DomainError
from pvpop.harness import read_records_csv

TAGLINE = "made with pvpop: p-values and posterior probabilities of the null"

SIZE = 420
MARGIN = 50
PLOT = SIZE - 2 * MARGIN
TICKS = (0.0, 0.25, 0.5, 0.75, 1.0)

_MARKER_COLOR = "#2196F3"
_AXIS_COLOR = "#333333"
_IDENTITY_COLOR = "#F44336"


def _fmt(value: float) -> str:
    return f"{value:.3f}"


def to_pixels(p: float, pop: float) -> tuple[float, float]:
    """Map a (p-value, PoP) pair in [0, 1]² to SVG coordinates."""
    return MARGIN + p * PLOT, SIZE - MARGIN - pop * PLOT


def render_scatter_svg(
    pairs: Iterable[tuple[float, float]],
    *,
    x_label: str = "p-value",
    y_label: str = "posterior probability of H0",
    title: str | None = None,
) -> str:
    points = list(pairs)
    for i, (p, pop) in enumerate(points):
        if not (0.0 <= p <= 1.0 and 0.0 <= pop <= 1.0):
            raise DomainError(f"point {i} = ({p!r}, {pop!r}) lies outside [0, 1]²")

    left, right = MARGIN, MARGIN + PLOT
    top, bottom = MARGIN, MARGIN + PLOT
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#FFFFFF"/>',
        f'<g class="axes" stroke="{_AXIS_COLOR}" stroke-width="1" fill="none">',
        f'<rect x="{left}" y="{top}" width="{PLOT}" height="{PLOT}"/>',
    ]
    for tick in TICKS:
        x, y = to_pixels(tick, tick)
        lines.append(f'<line x1="{_fmt(x)}" y1="{bottom}" x2="{_fmt(x)}" y2="{bottom + 5}"/>')
        lines.append(f'<line x1="{left - 5}" y1="{_fmt(y)}" x2="{left}" y2="{_fmt(y)}"/>')
    lines.append("</g>")

    lines.append(f'<g class="tick-labels" font-family="sans-serif" font-size="10" fill="{_AXIS_COLOR}">')
    for tick in TICKS:
        x, y = to_pixels(tick, tick)
        lines.append(
            f'<text x="{_fmt(x)}" y="{bottom + 17}" text-anchor="middle">{tick:g}</text>'
        )
        lines.append(
            f'<text x="{left - 8}" y="{_fmt(y + 3)}" text-anchor="end">{tick:g}</text>'
        )
    lines.append("</g>")

    lines.append(
        f'<line class="identity" x1="{left}" y1="{bottom}" x2="{right}" y2="{top}" '
        f'stroke="{_IDENTITY_COLOR}" stroke-width="1" stroke-dasharray="6,4"/>'
    )

    lines.append(f'<g class="markers" fill="{_MARKER_COLOR}" fill-opacity="0.6">')
    for p, pop in points:
        x, y = to_pixels(p, pop)
        lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2"/>')
    lines.append("</g>")

    lines.append(
        f'<g class="labels" font-family="sans-serif" font-size="12" fill="{_AXIS_COLOR}">'
    )
    lines.append(
        f'<text x="{SIZE / 2:g}" y="{SIZE - 12}" text-anchor="middle">{escape(x_label)}</text>'
    )
    lines.append(
        f'<text x="14" y="{SIZE / 2:g}" text-anchor="middle" '
        f'transform="rotate(-90 14 {SIZE / 2:g})">{escape(y_label)}</text>'
    )
    if title:
        lines.append(f'<text x="{SIZE / 2:g}" y="30" text-anchor="middle">{escape(title)}</text>')
    lines.append(
        f'<text x="{SIZE - 4}" y="{SIZE - 2}" text-anchor="end" font-size="8" '
        f'fill="#888888">{escape(TAGLINE)}</text>'
    )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def max_vertical_deviation(pairs: Iterable[tuple[float, float]]) -> float:
    """Largest |PoP - p| over the points, the distance from the identity line."""
    return max((abs(pop - p) for p, pop in pairs), default=0.0)


def load_pairs(path: str | os.PathLike, sided: str = "one") -> list[tuple[float, float]]:
    return [record.pair(sided) for record in read_records_csv(path)]


def write_svg(path: str | os.PathLike, content: str) -> None:
    atomic_write_text(path, content)
