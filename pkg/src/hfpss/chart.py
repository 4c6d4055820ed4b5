"""ASCII and SVG charts of a page in Adams coordinates (x = stem, y = filtration)."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .abgroup import FgAbGroup
from .specseq import DiffMap, Page, Provenance

SQUARE = "□"  # Z
DOT = "•"  # Z/2
CIRCLED = "⊙"  # Z_2
LEGEND = "□ Z   • Z/2   ⊙ Z_2   2^k Z/2^k   d_r arrows: ─> known, ╌> assumed zero (unknown)"


def summand_glyphs(g: FgAbGroup) -> list[str]:
    """One glyph per cyclic summand, free summands first."""
    out = [CIRCLED if p else SQUARE for p in g.pro2]
    for d in g.torsion:
        if d == 2:
            out.append(DOT)
        elif d & (d - 1) == 0:
            out.append(f"2^{d.bit_length() - 1}")
        else:
            out.append(f"/{d}")
    return out


def _cell_text(g: FgAbGroup) -> str:
    glyphs = summand_glyphs(g)
    # multi-character labels need a separator to stay readable
    return ("," if any(len(x) > 1 for x in glyphs) else "").join(glyphs)


def _adams(bideg: tuple[int, int]) -> tuple[int, int]:
    s, t = bideg
    return t - s, s


def render_ascii(page: Page, arrows: Sequence[tuple[int, DiffMap]] = (), title: str = "") -> str:
    w = page.window
    stems = list(range(w.stem_min, w.stem_max + 1))
    texts = {}
    for cell in page.displayed():
        if not cell.group.is_trivial():
            texts[_adams((cell.s, cell.t))] = _cell_text(cell.group)
    width = max([3] + [len(x) + 1 for x in texts.values()] + [len(str(n)) + 1 for n in stems])
    label_w = max(len(str(w.filtration_max)), 1) + 1
    lines = []
    if title:
        lines.append(title)
    for s in range(w.filtration_max, -1, -1):
        row = f"{s:>{label_w - 1}}|"
        for n in stems:
            row += texts.get((n, s), ".").center(width)
        lines.append(row.rstrip())
    lines.append(" " * label_w + "-" * (width * len(stems)))
    lines.append(" " * label_w + "".join(str(n).center(width) for n in stems).rstrip())
    lines.append(" " * label_w + "stem (t-s) →   filtration s ↑")
    lines.append(LEGEND)
    shown = [(r, m) for r, m in arrows if w.contains(*m.source) or w.contains(*m.target)]
    if shown:
        lines.append("differentials (stem, s):")
        for r, m in sorted(shown, key=lambda x: (x[0], _adams(x[1].source))):
            dashed = m.provenance == Provenance.UNKNOWN
            arrow = "╌╌>" if dashed else "──>"
            (n0, s0), (n1, s1) = _adams(m.source), _adams(m.target)
            lines.append(f"  d{r}: ({n0},{s0}) {arrow} ({n1},{s1})  [{m.provenance.value}]")
    return "\n".join(lines) + "\n"


def render_svg(page: Page, arrows: Sequence[tuple[int, DiffMap]] = (), title: str = "") -> str:
    w = page.window
    cell = 40
    margin = 50
    ncols = w.stem_max - w.stem_min + 1
    nrows = w.filtration_max + 1
    width = margin * 2 + ncols * cell
    height = margin * 2 + nrows * cell + 20

    def x_of(n: float) -> float:
        return margin + (n - w.stem_min + 0.5) * cell

    def y_of(s: float) -> float:
        return margin + (w.filtration_max - s + 0.5) * cell

    def f(v: float) -> str:
        return f"{v:.1f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" style="background:#ffffff;font-family:monospace">',
        "<defs>"
        '<marker id="head" markerWidth="8" markerHeight="8" refX="7" refY="4" orient="auto">'
        '<path d="M0,0 L8,4 L0,8 z" style="fill:#b00000"/></marker>'
        "</defs>",
    ]
    if title:
        parts.append(f'<text x="{margin}" y="20" style="font-size:14px">{escape(title)}</text>')
    for i in range(ncols + 1):
        x = margin + i * cell
        parts.append(f'<line x1="{x}" y1="{margin}" x2="{x}" y2="{margin + nrows * cell}" style="stroke:#e0e0e0"/>')
    for j in range(nrows + 1):
        y = margin + j * cell
        parts.append(f'<line x1="{margin}" y1="{y}" x2="{margin + ncols * cell}" y2="{y}" style="stroke:#e0e0e0"/>')
    for n in range(w.stem_min, w.stem_max + 1):
        parts.append(
            f'<text x="{f(x_of(n))}" y="{margin + nrows * cell + 15}" style="font-size:11px;text-anchor:middle">{n}</text>'
        )
    for s in range(nrows):
        parts.append(f'<text x="{margin - 8}" y="{f(y_of(s) + 4)}" style="font-size:11px;text-anchor:end">{s}</text>')
    parts.append(
        f'<text x="{f(width / 2)}" y="{height - 8}" style="font-size:12px;text-anchor:middle">stem t-s</text>'
    )
    for c in page.displayed():
        if c.group.is_trivial():
            continue
        n, s = _adams((c.s, c.t))
        glyphs = summand_glyphs(c.group)
        k = len(glyphs)
        for i, glyph in enumerate(glyphs):
            cx = x_of(n) + (i - (k - 1) / 2) * 9
            cy = y_of(s)
            if glyph == SQUARE:
                parts.append(f'<rect x="{f(cx - 4)}" y="{f(cy - 4)}" width="8" height="8" style="fill:none;stroke:#000000"/>')
            elif glyph == DOT:
                parts.append(f'<circle cx="{f(cx)}" cy="{f(cy)}" r="3.5" style="fill:#000000"/>')
            elif glyph == CIRCLED:
                parts.append(f'<circle cx="{f(cx)}" cy="{f(cy)}" r="4.5" style="fill:none;stroke:#000000"/>')
                parts.append(f'<circle cx="{f(cx)}" cy="{f(cy)}" r="1.5" style="fill:#000000"/>')
            else:
                parts.append(
                    f'<text x="{f(cx)}" y="{f(cy + 4)}" style="font-size:10px;text-anchor:middle">{escape(glyph)}</text>'
                )
    for r, m in sorted(arrows, key=lambda x: (x[0], x[1].source)):
        if not (w.contains(*m.source) or w.contains(*m.target)):
            continue
        (n0, s0), (n1, s1) = _adams(m.source), _adams(m.target)
        dash = ";stroke-dasharray:4,3" if m.provenance == Provenance.UNKNOWN else ""
        parts.append(
            f'<line x1="{f(x_of(n0))}" y1="{f(y_of(s0))}" x2="{f(x_of(n1))}" y2="{f(y_of(s1))}" '
            f'style="stroke:#b00000;stroke-width:1.2{dash}" marker-end="url(#head)"/>'
        )
        parts.append(
            f'<text x="{f((x_of(n0) + x_of(n1)) / 2 - 6)}" y="{f((y_of(s0) + y_of(s1)) / 2)}" '
            f'style="font-size:9px;fill:#b00000">d{r}</text>'
        )
    parts.append(
        f'<text x="{margin}" y="{margin - 12}" style="font-size:11px">{escape(LEGEND)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_chart(page: Page, fmt: str = "ascii", arrows: Sequence[tuple[int, DiffMap]] = (), title: str = "") -> str:
    if fmt in ("ascii", "chart-ascii"):
        return render_ascii(page, arrows, title)
    if fmt in ("svg", "chart-svg"):
        return render_svg(page, arrows, title)
    raise ValueError(f"unknown chart format {fmt!r}")
