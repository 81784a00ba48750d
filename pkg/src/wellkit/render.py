"""Small static SVG renderings (no plotting dependency)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .persistence import PersistenceDiagram
from .wellcore import WellDiagram

INF = math.inf


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">')
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>',
                      *body, "</svg>"]) + "\n"


def _num(v: float) -> str:
    return f"{v:.4g}"


def well_diagram_svg(d: WellDiagram, title: str = "well diagram") -> str:
    """Number line with one stacked dot per unit of multiplicity; points at
    infinity sit past a break in the right margin."""
    width, height, pad, inf_x = 520, 160, 40, 490
    finite = [p.value for p in d.points if p.value != INF]
    top = max(finite, default=1.0) * 1.1 or 1.0
    axis_y = height - 40
    scale = (inf_x - 30 - pad) / top

    def x_of(v):
        return inf_x if v == INF else pad + v * scale

    body = [f'<text x="{pad}" y="18">{escape(title)}</text>',
            f'<line x1="{pad}" y1="{axis_y}" x2="{inf_x - 25}" y2="{axis_y}" stroke="black"/>',
            f'<line x1="{inf_x - 15}" y1="{axis_y}" x2="{inf_x + 10}" y2="{axis_y}" '
            'stroke="black" stroke-dasharray="3,2"/>',
            f'<text x="{inf_x - 4}" y="{axis_y + 18}">∞</text>']
    for t in np.linspace(0, top, 5):
        body.append(f'<line x1="{x_of(t):.1f}" y1="{axis_y}" x2="{x_of(t):.1f}" '
                    f'y2="{axis_y + 4}" stroke="black"/>')
        body.append(f'<text x="{x_of(t) - 8:.1f}" y="{axis_y + 18}">{_num(t)}</text>')
    for p in d.points:
        colour = "#c0392b" if p.flag == "boundary" else "#1f4e79"
        for k in range(p.multiplicity):
            body.append(f'<circle cx="{x_of(p.value):.1f}" cy="{axis_y - 8 - 10 * k}" r="4" '
                        f'fill="{colour}"><title>{_num(p.value)} ({p.flag})</title></circle>')
    return _svg(width, height, body)


def persistence_svg(d: PersistenceDiagram, title: str = "persistence diagram") -> str:
    size, pad = 360, 40
    pairs = d.off_diagonal()
    finite = [v for p in pairs for v in (p.birth, p.death) if v != INF]
    lo = min(finite, default=0.0)
    hi = max(finite, default=1.0)
    span = (hi - lo) or 1.0
    hi_plot = hi + 0.15 * span
    inner = size - 2 * pad

    def px(v):
        return pad + (v - lo) / (hi_plot - lo) * inner

    def py(v):
        return size - pad - ((hi_plot if v == INF else v) - lo) / (hi_plot - lo) * inner

    body = [f'<text x="{pad}" y="18">{escape(title)}</text>',
            f'<rect x="{pad}" y="{pad}" width="{inner}" height="{inner}" fill="none" stroke="black"/>',
            f'<line x1="{px(lo):.1f}" y1="{py(lo):.1f}" x2="{px(hi_plot):.1f}" '
            f'y2="{py(hi_plot):.1f}" stroke="#888"/>',
            f'<text x="{pad + 4}" y="{pad + 12}">∞</text>']
    colours = ["#1f4e79", "#c0392b", "#27ae60"]
    for p in pairs:
        body.append(f'<circle cx="{px(p.birth):.1f}" cy="{py(p.death):.1f}" r="3.5" '
                    f'fill="{colours[p.dim % 3]}"><title>dim {p.dim}: ({_num(p.birth)}, '
                    f'{"inf" if p.death == INF else _num(p.death)})</title></circle>')
    return _svg(size, size, body)


def heatmap_svg(values: np.ndarray, xs, ys, title: str = "robustness field") -> str:
    """Grayscale heatmap, darker is more robust; infinite cells are hatched black."""
    rows, cols = values.shape
    cell = max(4, min(40, 400 // max(rows, cols)))
    pad = 30
    finite = values[np.isfinite(values)]
    top = float(finite.max()) if finite.size and finite.max() > 0 else 1.0
    body = [f'<text x="{pad}" y="18">{escape(title)} (max {_num(top)})</text>']
    for i in range(rows):
        y = pad + (rows - 1 - i) * cell
        for j in range(cols):
            v = values[i, j]
            g = 0 if v == INF else int(round(255 * (1 - min(v / top, 1.0))))
            body.append(f'<rect x="{pad + j * cell}" y="{y}" width="{cell}" height="{cell}" '
                        f'fill="rgb({g},{g},{g})"><title>a=({_num(xs[j])}, {_num(ys[i])}): '
                        f'{"inf" if v == INF else _num(v)}</title></rect>')
    return _svg(2 * pad + cols * cell, 2 * pad + rows * cell, body)
