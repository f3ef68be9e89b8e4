"""Self-contained SVG figures: draw scatter, region boundaries, marginal histograms."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 720, 720
MAIN = (80, 200, 500, 460)  # left, top, width, height of the scatter panel
TOP_H = 120
RIGHT_W = 120
GAP = 12
LEVEL_STYLE = {0.5: ("#d62728", "6 4"), 0.95: ("#1f3a93", "")}

LABELS = {
    "log_o0": "log(O0)",
    "log_or": "log(OR)",
    "o0": "O0",
    "or_": "OR",
    "r0": "R0",
    "rd": "RD",
    "rr": "RR",
    "af": "AF",
}


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(round(v, 10)) for v in np.arange(start, hi + step * 1e-9, step)]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _range(values: list[np.ndarray]) -> tuple[float, float]:
    allv = np.concatenate([np.ravel(v) for v in values if np.size(v)])
    lo, hi = float(allv.min()), float(allv.max())
    pad = 0.05 * (hi - lo) if hi > lo else 0.5
    return lo - pad, hi + pad


def scatter_with_regions(
    x: np.ndarray,
    y: np.ndarray,
    regions: list[tuple[float, np.ndarray]],
    point: tuple[float, float],
    axes: tuple[str, str],
    title: str,
    bins: int = 30,
) -> str:
    """Figure with the draw cloud, one closed boundary per level and both marginals.

    Axis limits cover the central 99% of draws and every region point, so a
    few extreme draws (OR is heavy-tailed) do not flatten the picture; draws
    beyond the limits are clipped.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    core_x = np.quantile(x, [0.005, 0.995])
    core_y = np.quantile(y, [0.005, 0.995])
    xlo, xhi = _range([core_x, *[r[:, 0] for _, r in regions], np.array([point[0]])])
    ylo, yhi = _range([core_y, *[r[:, 1] for _, r in regions], np.array([point[1]])])
    left, top, w, h = MAIN

    def px(v):
        return left + (v - xlo) / (xhi - xlo) * w

    def py(v):
        return top + h - (v - ylo) / (yhi - ylo) * h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="Helvetica, Arial, sans-serif">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
        f'<title>{escape(title)}</title>',
        '<defs><clipPath id="main-clip">'
        f'<rect x="{left}" y="{top}" width="{w}" height="{h}"/></clipPath></defs>',
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="#333333"/>',
    ]

    for t in _nice_ticks(xlo, xhi):
        out.append(f'<line x1="{px(t):.2f}" y1="{top + h}" x2="{px(t):.2f}" y2="{top + h + 5}" stroke="#333333"/>')
        out.append(
            f'<text x="{px(t):.2f}" y="{top + h + 20}" text-anchor="middle" font-size="11">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(ylo, yhi):
        out.append(f'<line x1="{left - 5}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" stroke="#333333"/>')
        out.append(
            f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end" font-size="11">{_fmt(t)}</text>'
        )
    out.append(
        f'<text x="{left + w / 2:.1f}" y="{top + h + 42}" text-anchor="middle" font-size="13">'
        f"{escape(LABELS.get(axes[0], axes[0]))}</text>"
    )
    out.append(
        f'<text x="{left - 52}" y="{top + h / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 {left - 52} {top + h / 2:.1f})">{escape(LABELS.get(axes[1], axes[1]))}</text>'
    )

    out.append('<g class="draws" clip-path="url(#main-clip)" fill="#7f7f7f" fill-opacity="0.35">')
    for a, b in zip(x, y):
        out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="1.4"/>')
    out.append("</g>")

    for level, pts in regions:
        color, dash = LEVEL_STYLE.get(level, ("#2ca02c", "2 2"))
        coords = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in pts)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<polyline class="region" data-level="{level:g}" points="{coords}" fill="none" '
            f'stroke="{color}" stroke-width="2"{dash_attr} clip-path="url(#main-clip)"/>'
        )
    out.append(
        f'<circle class="point-estimate" cx="{px(point[0]):.2f}" cy="{py(point[1]):.2f}" r="5" '
        f'fill="#ff7f0e" stroke="#000000"/>'
    )

    # top marginal: baseline measure
    counts, edges = np.histogram(np.clip(x, xlo, xhi), bins=bins, range=(xlo, xhi))
    hbase = top - GAP
    cmax = counts.max() or 1
    out.append('<g class="hist-x" fill="#9ecae1" stroke="#3182bd">')
    for c, e0, e1 in zip(counts, edges[:-1], edges[1:]):
        bh = c / cmax * TOP_H
        out.append(f'<rect x="{px(e0):.2f}" y="{hbase - bh:.2f}" width="{px(e1) - px(e0):.2f}" height="{bh:.2f}"/>')
    out.append("</g>")

    # right marginal: effect measure
    counts, edges = np.histogram(np.clip(y, ylo, yhi), bins=bins, range=(ylo, yhi))
    vbase = left + w + GAP
    cmax = counts.max() or 1
    out.append('<g class="hist-y" fill="#9ecae1" stroke="#3182bd">')
    for c, e0, e1 in zip(counts, edges[:-1], edges[1:]):
        bw = c / cmax * RIGHT_W
        out.append(f'<rect x="{vbase:.2f}" y="{py(e1):.2f}" width="{bw:.2f}" height="{py(e0) - py(e1):.2f}"/>')
    out.append("</g>")

    ly = HEIGHT - 40
    lx = left
    for level, _ in regions:
        color, dash = LEVEL_STYLE.get(level, ("#2ca02c", "2 2"))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 30}" y2="{ly}" stroke="{color}" stroke-width="2"{dash_attr}/>'
        )
        out.append(f'<text x="{lx + 36}" y="{ly + 4}" font-size="12">{level * 100:g}% region</text>')
        lx += 140
    out.append(f'<circle cx="{lx + 6}" cy="{ly}" r="5" fill="#ff7f0e" stroke="#000000"/>')
    out.append(
        f'<text x="{lx + 16}" y="{ly + 4}" font-size="12">ML estimate ({point[0]:.2f}, {point[1]:.2f})</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
