"""Minimal native SVG charts: measured values against declared bounds."""

from __future__ import annotations


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def bound_chart(
    labels: list[str],
    measured: list[float],
    bounds: list[float],
    title: str,
    width: int = 640,
    height: int = 360,
) -> str:
    """Bar chart of measured values with a tick marking each bound."""
    if not labels or len(labels) != len(measured) or len(labels) != len(bounds):
        raise ValueError("labels, measured, bounds must be equal-length and non-empty")
    pad_l, pad_r, pad_t, pad_b = 60, 20, 40, 60
    plot_w = width - pad_l - pad_r
    plot_h = height - pad_t - pad_b
    top = max(max(measured), max(bounds), 1e-12) * 1.15

    def ypix(v: float) -> float:
        return pad_t + plot_h * (1.0 - v / top)

    slot = plot_w / len(labels)
    bar_w = slot * 0.5
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="15" '
        f'font-family="sans-serif">{title}</text>',
        f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{pad_t + plot_h}" stroke="black"/>',
        f'<line x1="{pad_l}" y1="{pad_t + plot_h}" x2="{pad_l + plot_w}" '
        f'y2="{pad_t + plot_h}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = top * frac
        y = ypix(v)
        parts.append(
            f'<text x="{pad_l - 6}" y="{y + 4}" text-anchor="end" font-size="10" '
            f'font-family="sans-serif">{_fmt(v)}</text>'
        )
        parts.append(
            f'<line x1="{pad_l}" y1="{y}" x2="{pad_l + plot_w}" y2="{y}" '
            'stroke="#dddddd" stroke-width="0.5"/>'
        )
    for i, (label, val, bnd) in enumerate(zip(labels, measured, bounds)):
        x0 = pad_l + slot * i + (slot - bar_w) / 2
        parts.append(
            f'<rect x="{x0:.1f}" y="{ypix(val):.1f}" width="{bar_w:.1f}" '
            f'height="{pad_t + plot_h - ypix(val):.1f}" fill="#4477aa"/>'
        )
        parts.append(
            f'<line x1="{x0 - slot * 0.15:.1f}" y1="{ypix(bnd):.1f}" '
            f'x2="{x0 + bar_w + slot * 0.15:.1f}" y2="{ypix(bnd):.1f}" '
            'stroke="#cc3311" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{x0 + bar_w / 2:.1f}" y="{pad_t + plot_h + 16}" '
            f'text-anchor="middle" font-size="10" font-family="sans-serif">{label}</text>'
        )
    parts.append(
        f'<text x="{pad_l}" y="{height - 12}" font-size="10" font-family="sans-serif" '
        'fill="#444444">bars: measured, red ticks: bound</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def histogram_chart(
    values: list[float], bins: int, title: str, width: int = 640, height: int = 360
) -> str:
    """Simple frequency histogram."""
    if not values or bins < 1:
        raise ValueError("need values and bins >= 1")
    lo, hi = min(values), max(values)
    span = (hi - lo) or 1.0
    counts = [0] * bins
    for v in values:
        idx = min(int((v - lo) / span * bins), bins - 1)
        counts[idx] += 1
    labels = [_fmt(lo + span * (i + 0.5) / bins) for i in range(bins)]
    return bound_chart(labels, [float(c) for c in counts], [0.0] * bins, title, width, height)
