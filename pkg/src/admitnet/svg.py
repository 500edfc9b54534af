"""Dependency-free SVG charts: signed attribution bars and a confusion matrix."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .metrics import ConfusionMatrix

WIDTH = 900
POSITIVE = "#2e9e44"
NEGATIVE = "#d62728"

_BAR_H = 22
_GAP = 6
_TOP = 50
_LABEL_W = 300


def _num(v: float) -> str:
    return f"{v:.2f}"


def attribution_bars(rows, title: str = "Global LIME attribution") -> str:
    """Horizontal bars, one per ``(label, signed value)``, drawn in the given order.

    Positive values extend right of the zero line in green, negative ones left in red.
    """
    rows = [(str(label), float(value)) for label, value in rows]
    height = _TOP + len(rows) * (_BAR_H + _GAP) + 40
    plot_w = WIDTH - _LABEL_W - 40
    zero_x = _LABEL_W + plot_w / 2
    scale = max((abs(v) for _, v in rows), default=0.0)
    half = plot_w / 2 - 60
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="28" font-family="sans-serif" font-size="18" text-anchor="middle">{escape(title)}</text>',
    ]
    for i, (label, value) in enumerate(rows):
        y = _TOP + i * (_BAR_H + _GAP)
        length = half * abs(value) / scale if scale > 0 else 0.0
        x = zero_x if value >= 0 else zero_x - length
        fill = POSITIVE if value >= 0 else NEGATIVE
        text_x = zero_x + length + 4 if value >= 0 else zero_x - length - 4
        anchor = "start" if value >= 0 else "end"
        out.append(
            f'<text x="10" y="{_num(y + _BAR_H * 0.7)}" font-family="sans-serif" font-size="13" '
            f'text-anchor="start">{escape(label)}</text>'
        )
        out.append(
            f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(length)}" height="{_BAR_H}" fill="{fill}">'
            f"<title>{escape(label)}: {value:.6g}</title></rect>"
        )
        out.append(
            f'<text x="{_num(text_x)}" y="{_num(y + _BAR_H * 0.7)}" font-family="sans-serif" font-size="11" '
            f'text-anchor="{anchor}">{value:.4f}</text>'
        )
    bottom = _TOP + len(rows) * (_BAR_H + _GAP)
    out.append(f'<line x1="{_num(zero_x)}" y1="{_TOP - 4}" x2="{_num(zero_x)}" y2="{bottom}" stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def confusion_matrix_svg(cm: ConfusionMatrix, title: str = "Confusion matrix") -> str:
    """2x2 grid, rows = actual, columns = predicted; darker cells hold more rows."""
    cell = 150
    left, top = 200, 80
    height = top + 2 * cell + 60
    cells = cm.as_array()
    peak = max(int(cells.max()), 1)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>',
        f'<text x="{left + cell}" y="30" font-family="sans-serif" font-size="18" text-anchor="middle">{escape(title)}</text>',
    ]
    for c in range(2):
        out.append(
            f'<text x="{left + c * cell + cell // 2}" y="{top - 10}" font-family="sans-serif" '
            f'font-size="14" text-anchor="middle">predicted {c}</text>'
        )
    for r in range(2):
        out.append(
            f'<text x="{left - 10}" y="{top + r * cell + cell // 2}" font-family="sans-serif" '
            f'font-size="14" text-anchor="end">actual {r}</text>'
        )
        for c in range(2):
            count = int(cells[r, c])
            shade = 255 - int(200 * count / peak)
            text_fill = "white" if shade < 128 else "black"
            out.append(
                f'<rect x="{left + c * cell}" y="{top + r * cell}" width="{cell}" height="{cell}" '
                f'fill="rgb({shade},{shade},255)" stroke="black"/>'
            )
            out.append(
                f'<text x="{left + c * cell + cell // 2}" y="{top + r * cell + cell // 2 + 8}" '
                f'font-family="sans-serif" font-size="24" text-anchor="middle" fill="{text_fill}">{count}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
