"""Chart model of a spectral-sequence page and its ASCII/SVG renderings."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .sseq import SSPage

Point = tuple[int, int]


@dataclass(frozen=True)
class Dot:
    s: int
    t: int
    label: str
    multiplicity: int


@dataclass(frozen=True)
class Stroke:
    source: Point
    target: Point
    r: int


@dataclass
class ChartModel:
    dots: list[Dot] = field(default_factory=list)
    strokes: list[Stroke] = field(default_factory=list)
    window: tuple[int, int] | None = None  # defaults to the extent of the dots

    def __post_init__(self):
        if self.window is None:
            self.window = (max((d.s for d in self.dots), default=0),
                           max((d.t for d in self.dots), default=0))
        where = {(d.s, d.t) for d in self.dots}
        for st in self.strokes:
            if st.source not in where or st.target not in where:
                raise ValueError(f"stroke {st} does not join two dots")

    def column_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.dots:
            out[d.s] = out.get(d.s, 0) + d.multiplicity
        return out

    def dot_multiset(self) -> dict[Point, int]:
        return {(d.s, d.t): d.multiplicity for d in self.dots}


def chart_from_page(page: SSPage, max_s: int | None = None) -> ChartModel:
    conv = page.convention
    pres = page.pres
    dots = []
    for b, monos in sorted(page.by_bidegree.items(), key=lambda kv: conv.coords(kv[0])):
        s, t = conv.coords(b)
        if max_s is not None and s > max_s:
            continue
        label = ", ".join(pres.monomial_name(m) for m in monos)
        dots.append(Dot(s, t, label, len(monos)))
    strokes = set()
    if page.d is not None:
        for m, img in page.d.items():
            if not img:
                continue
            src = conv.coords(page.bidegree(m))
            tgt = conv.coords(page.bidegree(next(iter(img))))
            if max_s is None or (src[0] <= max_s and tgt[0] <= max_s):
                strokes.add(Stroke(src, tgt, page.r))
    s_max = max((d.s for d in dots), default=0)
    t_max = max((d.t for d in dots), default=0)
    return ChartModel(dots, sorted(strokes, key=lambda x: (x.source, x.target, x.r)),
                      (s_max, t_max))


def chart_from_dims(dims: list[int]) -> ChartModel:
    """A one-row chart of a graded vector space (t = 0)."""
    dots = [Dot(k, 0, "", n) for k, n in enumerate(dims) if n]
    return ChartModel(dots, [], (max(len(dims) - 1, 0), 0))


def render_ascii(chart: ChartModel, width: int = 100) -> str:
    """One cell per (s, t): 'o' for a dot, a digit for multiplicity."""
    s_max, t_max = chart.window
    cells = chart.dot_multiset()
    label_w = len(str(t_max)) + 1
    per_block = max(1, width - label_w - 1)
    blocks = []
    start = 0
    while start <= s_max:
        stop = min(s_max, start + per_block - 1)
        lines = []
        for t in range(t_max, -1, -1):
            row = []
            for s in range(start, stop + 1):
                n = cells.get((s, t), 0)
                row.append("." if n == 0 else "o" if n == 1 else str(n) if n < 10 else "+")
            lines.append(f"{t:>{label_w - 1}} |" + "".join(row))
        lines.append(" " * label_w + "+" + "-" * (stop - start + 1))
        ticks = [" "] * (stop - start + 1)
        for s in range(start, stop + 1):
            if s % 5 == 0:
                for i, ch in enumerate(str(s)):
                    if s - start + i < len(ticks):
                        ticks[s - start + i] = ch
        lines.append(" " * (label_w + 1) + "".join(ticks).rstrip())
        blocks.append("\n".join(lines))
        start = stop + 1
    out = "\n\n".join(blocks)
    if chart.strokes:
        out += "\n\nstrokes:\n" + "\n".join(
            f"  d_{st.r}: {st.source} -> {st.target}" for st in chart.strokes)
    return out + "\n"


def render_svg(chart: ChartModel, scale: int = 16, margin: int = 32) -> str:
    s_max, t_max = chart.window
    w = margin * 2 + scale * (s_max + 1)
    h = margin * 2 + scale * (t_max + 1)

    def x(s, off=0.0):
        return margin + scale * (s + 0.5) + off

    def y(t):
        return h - margin - scale * (t + 0.5)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<line class="axis" x1="{margin}" y1="{h - margin}" x2="{w - margin}" y2="{h - margin}" '
        'stroke="black" stroke-width="1"/>',
        f'<line class="axis" x1="{margin}" y1="{margin}" x2="{margin}" y2="{h - margin}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for s in range(0, s_max + 1, 5):
        out.append(f'<text x="{x(s):.1f}" y="{h - margin + 14}" font-size="10" '
                   f'text-anchor="middle">{s}</text>')
    for t in range(0, t_max + 1, 5):
        out.append(f'<text x="{margin - 6}" y="{y(t) + 3:.1f}" font-size="10" '
                   f'text-anchor="end">{t}</text>')
    for st in chart.strokes:
        out.append(f'<line class="stroke" data-r="{st.r}" x1="{x(st.source[0]):.1f}" '
                   f'y1="{y(st.source[1]):.1f}" x2="{x(st.target[0]):.1f}" '
                   f'y2="{y(st.target[1]):.1f}" stroke="black" stroke-width="1.2"/>')
    for d in chart.dots:
        for i in range(d.multiplicity):
            off = (i - (d.multiplicity - 1) / 2) * 4.0
            out.append(f'<circle class="dot" data-s="{d.s}" data-t="{d.t}" '
                       f'cx="{x(d.s, off):.1f}" cy="{y(d.t):.1f}" r="2.5" fill="black">'
                       f'<title>{escape(d.label)}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
