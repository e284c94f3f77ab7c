"""Static SVG line charts of temperature profiles u(x) at fixed times.

Hand-written SVG so the output is byte-for-byte reproducible (no ids,
timestamps or renderer metadata).
"""

from __future__ import annotations

import csv
from collections import defaultdict
from typing import TextIO

from .errors import ConfigError

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 120, 20, 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def read_profiles(fh: TextIO) -> dict[float, list[tuple[float, float]]]:
    """Group an ``x,t,u[,...]`` CSV into ``{t: [(x, u), ...]}``."""
    reader = csv.DictReader(fh)
    if reader.fieldnames is None or not {"x", "t", "u"} <= set(reader.fieldnames):
        raise ConfigError("grid CSV must have columns x, t, u")
    groups: dict[float, list[tuple[float, float]]] = defaultdict(list)
    for lineno, row in enumerate(reader, start=2):
        try:
            groups[float(row["t"])].append((float(row["x"]), float(row["u"])))
        except (TypeError, ValueError):
            raise ConfigError(f"malformed CSV row at line {lineno}") from None
    if not groups:
        raise ConfigError("grid CSV has no data rows")
    return {t: sorted(pts) for t, pts in sorted(groups.items())}


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def render_svg(profiles: dict[float, list[tuple[float, float]]]) -> str:
    xs = [x for pts in profiles.values() for x, _ in pts]
    us = [u for pts in profiles.values() for _, u in pts]
    x0, x1 = min(xs), max(xs)
    u0, u1 = min(min(us), 0.0), max(max(us), 0.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if u1 == u0:
        u1 = u0 + 1.0
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def sy(u):
        return MARGIN_T + (u1 - u) / (u1 - u0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g stroke="black" fill="none">'
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T + ph}" x2="{MARGIN_L + pw}" y2="{MARGIN_T + ph}"/>'
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{MARGIN_T + ph}"/></g>',
    ]
    for tx in _ticks(x0, x1):
        out.append(
            f'<text x="{sx(tx):.2f}" y="{MARGIN_T + ph + 16}" text-anchor="middle">{tx:.4g}</text>'
        )
    for tu in _ticks(u0, u1):
        out.append(
            f'<text x="{MARGIN_L - 6}" y="{sy(tu) + 4:.2f}" text-anchor="end">{tu:.4g}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">x</text>'
    )
    out.append(
        f'<text x="16" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.2f})">u</text>'
    )
    for i, (t, pts) in enumerate(profiles.items()):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{sx(x):.3f},{sy(u):.3f}" for x, u in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
    for i, t in enumerate(profiles):
        color = PALETTE[i % len(PALETTE)]
        ly = MARGIN_T + 12 + 16 * i
        lx = MARGIN_L + pw + 12
        out.append(
            f'<g class="legend"><line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" '
            f'stroke-width="1.5"/><text x="{lx + 26}" y="{ly + 4}">t = {t:.6g}</text></g>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
