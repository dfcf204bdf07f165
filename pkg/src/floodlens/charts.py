"""Hand-rolled SVG line charts juxtaposing two weekly series.

Both series are min-max scaled into the same plot area (their units differ:
a flood fraction against km^2 or people affected), which is exactly what a
rank correlation looks at anyway. Output is deterministic: fixed geometry,
fixed float formatting, no timestamps.
"""

from __future__ import annotations

from .series import RegionSeries

WIDTH, HEIGHT = 860, 320
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 50, 20, 34, 46
PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_H = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

SERIES_A_COLOR = "#1f6fb2"  # news
SERIES_B_COLOR = "#c05621"  # reference


def _scale(values: list[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi - lo <= 0:
        return [0.5] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def _polyline(weeks: list[str], scaled: list[float], color: str, dash: str = "") -> str:
    n = len(weeks)
    points = []
    for i, v in enumerate(scaled):
        x = MARGIN_LEFT + (PLOT_W * i / (n - 1) if n > 1 else PLOT_W / 2)
        y = MARGIN_TOP + PLOT_H * (1.0 - v)
        points.append(f"{x:.2f},{y:.2f}")
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash_attr} '
        f'points="{" ".join(points)}"/>'
    )


def _week_ticks(weeks: list[str]) -> str:
    n = len(weeks)
    step = max(1, n // 8)
    parts = []
    for i in range(0, n, step):
        x = MARGIN_LEFT + (PLOT_W * i / (n - 1) if n > 1 else PLOT_W / 2)
        y0 = MARGIN_TOP + PLOT_H
        parts.append(f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 5}" stroke="#444"/>')
        parts.append(
            f'<text x="{x:.2f}" y="{y0 + 18}" font-size="10" text-anchor="middle" '
            f'fill="#444">{weeks[i]}</text>'
        )
    return "\n".join(parts)


def render_comparison(
    title: str,
    a: RegionSeries,
    b: RegionSeries,
    a_label: str = "news",
    b_label: str = "reference",
) -> str:
    weeks = [w for w in a.points if w in b.points]
    weeks.sort()
    va = _scale([a.points[w] for w in weeks])
    vb = _scale([b.points[w] for w in weeks])
    frame = (
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{PLOT_W}" height="{PLOT_H}" '
        f'fill="none" stroke="#888"/>'
    )
    legend = (
        f'<rect x="{MARGIN_LEFT + 8}" y="{MARGIN_TOP + 8}" width="12" height="3" fill="{SERIES_A_COLOR}"/>'
        f'<text x="{MARGIN_LEFT + 26}" y="{MARGIN_TOP + 13}" font-size="11" fill="#222">{a_label}</text>'
        f'<rect x="{MARGIN_LEFT + 108}" y="{MARGIN_TOP + 8}" width="12" height="3" fill="{SERIES_B_COLOR}"/>'
        f'<text x="{MARGIN_LEFT + 126}" y="{MARGIN_TOP + 13}" font-size="11" fill="#222">{b_label}</text>'
    )
    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<text x="{WIDTH / 2:.0f}" y="20" font-size="14" text-anchor="middle" '
            f'fill="#111">{title}</text>',
            frame,
            _week_ticks(weeks),
            _polyline(weeks, va, SERIES_A_COLOR),
            _polyline(weeks, vb, SERIES_B_COLOR, dash="5,3"),
            legend,
            "</svg>",
            "",
        ]
    )
