"""Minimal log-log line plot written as SVG text."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

WIDTH, HEIGHT, PAD = 640, 420, 60
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]


def _polyline(points, color, dash=""):
    pts = " ".join(f"{x:.1f},{y:.1f}" for x, y in points)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="2"{extra} points="{pts}"/>'


def loglog_svg(series: Mapping[str, Sequence[tuple[float, float]]], title: str = "",
               xlabel: str = "n", ylabel: str = "queries", dashed: Sequence[str] = ()) -> str:
    """Render named ``(x, y)`` series on log-log axes. Series named in ``dashed`` are drawn dashed."""
    xs = [x for s in series.values() for x, _ in s if x > 0]
    ys = [y for s in series.values() for _, y in s if y > 0]
    if not xs or not ys:
        raise ValueError("nothing to plot")
    lx0, lx1 = math.log10(min(xs)), math.log10(max(xs))
    ly0, ly1 = math.log10(min(ys)), math.log10(max(ys))
    lx1 = lx1 if lx1 > lx0 else lx0 + 1
    ly1 = ly1 if ly1 > ly0 else ly0 + 1

    def px(x):
        return PAD + (math.log10(x) - lx0) / (lx1 - lx0) * (WIDTH - 2 * PAD)

    def py(y):
        return HEIGHT - PAD - (math.log10(y) - ly0) / (ly1 - ly0) * (HEIGHT - 2 * PAD)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
             f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
             f'<line x1="{PAD}" y1="{HEIGHT - PAD}" x2="{WIDTH - PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
             f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
             f'<text x="{WIDTH / 2}" y="{PAD / 2}" text-anchor="middle" font-size="14">{title}</text>',
             f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle">{xlabel} (log)</text>',
             f'<text x="15" y="{HEIGHT / 2}" transform="rotate(-90 15 {HEIGHT / 2})" text-anchor="middle">{ylabel} (log)</text>']
    for d in range(math.ceil(lx0), math.floor(lx1) + 1):
        parts.append(f'<text x="{px(10 ** d):.1f}" y="{HEIGHT - PAD + 16}" text-anchor="middle">1e{d}</text>')
    for d in range(math.ceil(ly0), math.floor(ly1) + 1):
        parts.append(f'<text x="{PAD - 6}" y="{py(10 ** d) + 4:.1f}" text-anchor="end">1e{d}</text>')
    for i, (name, pts) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        parts.append(_polyline([(px(x), py(y)) for x, y in pts if x > 0 and y > 0], color,
                               "6,4" if name in dashed else ""))
        parts.append(f'<text x="{WIDTH - PAD - 150}" y="{PAD + 16 * (i + 1)}" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def scaling_svg(medians: Mapping[int, float], title: str = "median queries vs n") -> str:
    """Measured medians with ``n^2`` and ``n log^2 n`` references anchored at the smallest n."""
    ns = sorted(medians)
    n0, q0 = ns[0], medians[ns[0]]
    quad = [(n, q0 * (n / n0) ** 2) for n in ns]
    nlog = [(n, q0 * (n * math.log(n) ** 2) / (n0 * math.log(n0) ** 2)) for n in ns]
    return loglog_svg({"measured": [(n, medians[n]) for n in ns], "n^2": quad, "n log^2 n": nlog},
                      title=title, dashed=("n^2", "n log^2 n"))
