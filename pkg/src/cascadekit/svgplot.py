"""Self-contained SVG rendering of accuracy-cost curves.

No plotting dependency: the chart is assembled as SVG elements directly.
The drawing shows the swept curve, one marker per standalone model, and a
dashed horizontal guide from each standalone model to the curve point that
matches its accuracy.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

WIDTH, HEIGHT = 860, 540
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 78, 30, 48, 62
CURVE_COLOR = "#1f77b4"
MODEL_COLOR = "#d62728"
GUIDE_COLOR = "#d62728"
AXIS_COLOR = "#333333"
GRID_COLOR = "#dddddd"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _fmt(value: float) -> str:
    return f"{value:.4g}"


def render_curve_svg(
    curve: list[tuple[float, float]],
    standalone: list[tuple[str, float, float]],
    matched: list[tuple[str, float, float | None]],
    title: str = "accuracy vs. computation cost",
) -> str:
    """Build the SVG document.

    ``curve`` holds (mean_cost, accuracy) points sorted by cost; ``standalone``
    holds (model_id, accuracy, mean_cost) markers; ``matched`` holds
    (model_id, accuracy, matched_cost-or-None) guide lines.
    """
    costs = [c for c, _ in curve] + [c for _, _, c in standalone]
    accs = [a for _, a in curve] + [a for _, a, _ in standalone]
    if not costs:
        raise ValueError("nothing to plot")

    x_lo, x_hi = min(costs), max(costs)
    y_lo, y_hi = min(accs), max(accs)
    x_pad = (x_hi - x_lo) * 0.05 or max(abs(x_hi), 1.0) * 0.05
    y_pad = (y_hi - y_lo) * 0.08 or 1.0
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = max(0.0, y_lo - y_pad), min(100.0, y_hi + y_pad)

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(cost: float) -> float:
        return MARGIN_L + (cost - x_lo) / (x_hi - x_lo) * plot_w

    def sy(acc: float) -> float:
        return MARGIN_T + (y_hi - acc) / (y_hi - y_lo) * plot_h

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    parts.append(
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" '
        f'font-family="sans-serif" font-size="17">{escape(title)}</text>'
    )

    # grid + ticks
    for xt in _ticks(x_lo, x_hi):
        px = sx(xt)
        parts.append(
            f'<line x1="{px:.2f}" y1="{MARGIN_T}" x2="{px:.2f}" '
            f'y2="{HEIGHT - MARGIN_B}" stroke="{GRID_COLOR}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{HEIGHT - MARGIN_B + 20}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">'
            f"{_fmt(xt / 1e9)}</text>"
        )
    for yt in _ticks(y_lo, y_hi):
        py = sy(yt)
        parts.append(
            f'<line x1="{MARGIN_L}" y1="{py:.2f}" x2="{WIDTH - MARGIN_R}" '
            f'y2="{py:.2f}" stroke="{GRID_COLOR}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{_fmt(yt)}</text>'
        )

    # axes
    parts.append(
        f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" '
        f'x2="{WIDTH - MARGIN_R}" y2="{HEIGHT - MARGIN_B}" '
        f'stroke="{AXIS_COLOR}" stroke-width="1.5"/>'
    )
    parts.append(
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="{AXIS_COLOR}" stroke-width="1.5"/>'
    )
    parts.append(
        f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{HEIGHT - 16}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13">'
        "mean cost (10^9 FLOPs)</text>"
    )
    parts.append(
        f'<text x="20" y="{MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {MARGIN_T + plot_h / 2:.1f})">'
        "accuracy (%)</text>"
    )

    # matched-accuracy guides: dashed line from the standalone point to the
    # curve intersection
    for model_id, acc, cost in matched:
        if cost is None:
            continue
        stand = next((c for mid, _, c in standalone if mid == model_id), None)
        if stand is None:
            continue
        py = sy(acc)
        parts.append(
            f'<line x1="{sx(cost):.2f}" y1="{py:.2f}" x2="{sx(stand):.2f}" '
            f'y2="{py:.2f}" stroke="{GUIDE_COLOR}" stroke-width="1.2" '
            'stroke-dasharray="6 4"/>'
        )
        parts.append(
            f'<line x1="{sx(cost):.2f}" y1="{py - 5:.2f}" x2="{sx(cost):.2f}" '
            f'y2="{py + 5:.2f}" stroke="{GUIDE_COLOR}" stroke-width="1.2"/>'
        )

    # curve
    if len(curve) > 1:
        pts = " ".join(f"{sx(c):.2f},{sy(a):.2f}" for c, a in curve)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{CURVE_COLOR}" '
            'stroke-width="2"/>'
        )
    for c, a in curve:
        parts.append(
            f'<circle cx="{sx(c):.2f}" cy="{sy(a):.2f}" r="2.5" '
            f'fill="{CURVE_COLOR}" class="curve-point"/>'
        )

    # standalone model markers
    for model_id, acc, cost in standalone:
        px, py = sx(cost), sy(acc)
        parts.append(
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="5" fill="{MODEL_COLOR}" '
            'class="model-marker"/>'
        )
        parts.append(
            f'<text x="{px + 8:.2f}" y="{py - 8:.2f}" '
            f'font-family="sans-serif" font-size="12" fill="{MODEL_COLOR}">'
            f"{escape(model_id)}</text>"
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
