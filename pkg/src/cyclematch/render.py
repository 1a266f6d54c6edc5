"""Static SVG rendering of barcodes and prevalence-augmented barcodes.

Bar length encodes persistence; in prevalence mode thickness and color both
encode the prevalence score, with a colorbar.  Bars carry ``data-*``
attributes (dim, birth, death, score) so the figures are self-describing
and can be verified by parsing the SVG back.
"""

from __future__ import annotations

import math

from .errors import InputFormatError

# eight anchors of a dark-blue -> green -> yellow map
_CMAP = [
    (68, 1, 84),
    (70, 50, 127),
    (54, 92, 141),
    (39, 127, 142),
    (31, 161, 135),
    (74, 194, 109),
    (159, 218, 58),
    (253, 231, 37),
]


def colormap(t: float) -> str:
    t = min(1.0, max(0.0, float(t)))
    x = t * (len(_CMAP) - 1)
    i = min(int(x), len(_CMAP) - 2)
    frac = x - i
    r, g, b = (
        round(_CMAP[i][c] + frac * (_CMAP[i + 1][c] - _CMAP[i][c])) for c in range(3)
    )
    return f"#{r:02x}{g:02x}{b:02x}"


_W = 900
_MARGIN_L = 60
_MARGIN_R = 150
_MARGIN_T = 30
_MARGIN_B = 40
_ROW = 14
_MAX_THICK = 12.0
_MIN_THICK = 2.0


def thickness(score: float) -> float:
    return _MIN_THICK + (_MAX_THICK - _MIN_THICK) * min(1.0, max(0.0, float(score)))


def _extract_bars(data) -> tuple[list[dict], bool]:
    """Normalize input JSON: returns (bars, prevalence_mode)."""
    if isinstance(data, list):
        bars = data
        mode = False
    elif isinstance(data, dict) and "bars" in data:
        bars = data["bars"]
        mode = True
    elif isinstance(data, dict) and data.get("kind") == "image":
        bars = data.get("finite", [])
        mode = False
    else:
        raise InputFormatError("input JSON is neither a barcode nor a prevalence report")
    for b in bars:
        if not isinstance(b, dict) or "dim" not in b or "birth" not in b:
            raise InputFormatError("malformed bar entry in input JSON")
    return list(bars), mode


def render_svg(data) -> str:
    """Render a barcode array or a prevalence report object to SVG text."""
    bars, prevalence_mode = _extract_bars(data)
    bars = sorted(
        bars,
        key=lambda b: (
            b["dim"],
            b["birth"],
            math.inf if b.get("death") is None else b["death"],
        ),
    )
    finite_hi = [b["death"] for b in bars if b.get("death") is not None]
    hi = max(finite_hi + [b["birth"] for b in bars] + [1.0])
    hi *= 1.05
    plot_w = _W - _MARGIN_L - _MARGIN_R
    height = _MARGIN_T + _MARGIN_B + max(1, len(bars)) * _ROW

    def sx(v: float) -> float:
        return _MARGIN_L + plot_w * (v / hi)

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{height}" '
        f'viewBox="0 0 {_W} {height}">'
    )
    out.append(f'<rect width="{_W}" height="{height}" fill="white"/>')
    # axes
    y0 = height - _MARGIN_B
    out.append(
        f'<line x1="{_MARGIN_L}" y1="{y0}" x2="{_MARGIN_L + plot_w}" y2="{y0}" '
        'stroke="black" stroke-width="1"/>'
    )
    out.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" y2="{y0}" '
        'stroke="black" stroke-width="1"/>'
    )
    for i in range(6):
        v = hi * i / 5
        x = sx(v)
        out.append(
            f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 4}" stroke="black"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{y0 + 16}" font-size="10" text-anchor="middle">'
            f"{v:.3g}</text>"
        )

    for row, b in enumerate(bars):
        y = _MARGIN_T + row * _ROW + _ROW / 2
        birth = float(b["birth"])
        death = b.get("death")
        essential = death is None
        x1 = sx(birth)
        x2 = _MARGIN_L + plot_w if essential else sx(float(death))
        if prevalence_mode:
            score = float(b.get("prevalence", 0.0))
            th = thickness(score)
            color = colormap(score)
        else:
            score = ""
            th = 4.0
            color = "#444488"
        d_attr = "inf" if essential else f"{float(death)!r}"
        out.append(
            f'<rect x="{x1:.3f}" y="{y - th / 2:.3f}" width="{max(x2 - x1, 0.5):.3f}" '
            f'height="{th:.3f}" fill="{color}" '
            f'data-dim="{b["dim"]}" data-birth="{birth!r}" data-death="{d_attr}"'
            + (f' data-score="{score!r}"' if prevalence_mode else "")
            + "/>"
        )
        if essential:
            out.append(
                f'<text x="{_MARGIN_L + plot_w + 4}" y="{y + 3:.2f}" font-size="9">'
                "&#8734;</text>"
            )

    if prevalence_mode:
        # colorbar with gradient stops
        cb_x = _W - _MARGIN_R + 40
        cb_y = _MARGIN_T
        cb_h = max(60, height - _MARGIN_T - _MARGIN_B)
        out.append("<defs><linearGradient id='prev' x1='0' y1='1' x2='0' y2='0'>")
        for i in range(9):
            t = i / 8
            out.append(f'<stop offset="{t:.3f}" stop-color="{colormap(t)}"/>')
        out.append("</linearGradient></defs>")
        out.append(
            f'<rect x="{cb_x}" y="{cb_y}" width="14" height="{cb_h}" '
            'fill="url(#prev)" stroke="black" stroke-width="0.5"/>'
        )
        for i in range(5):
            t = i / 4
            y = cb_y + cb_h * (1 - t)
            out.append(
                f'<text x="{cb_x + 20}" y="{y + 3:.2f}" font-size="9">{t:.2f}</text>'
            )
        out.append(
            f'<text x="{cb_x}" y="{cb_y - 8}" font-size="10">prevalence</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
