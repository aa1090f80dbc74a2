"""CSV and SVG writers.

Numbers are written with 12 significant digits so that identical inputs give
byte-identical files.  SVG is assembled by hand: a polyline for each curve
and horizontal segments for energy levels.
"""
from __future__ import annotations

import csv
import io
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ArnoldError

FLOAT_FMT = "%.12g"


class OutputError(ArnoldError, OSError):
    """File could not be written; the message names the path."""


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return FLOAT_FMT % v
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None


def emit_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    write_text(path, csv_text(header, rows))


def spectrum_rows(result) -> Tuple[List[str], List[list]]:
    """Rows ``n, E, parity, splitting_partner, weight_region_*`` of a solve."""
    k = 0 if result.localization is None else result.localization.shape[1]
    header = ["n", "E", "parity", "splitting_partner"] + [f"weight_region_{i}" for i in range(k)]
    partner = {}
    for d in result.splittings:
        partner[d.lower] = d.upper
        partner[d.upper] = d.lower
    rows = []
    for n in range(result.n_states):
        row = [n, float(result.energies[n]), result.parities[n].value, partner.get(n)]
        row += [float(w) for w in result.localization[n]] if k else []
        rows.append(row)
    return header, rows


def psi_rows(result) -> Tuple[List[str], list]:
    header = ["x"] + [f"psi_{n}" for n in range(result.n_states)]
    rows = np.column_stack([result.x, result.wavefunctions.T])
    return header, [[float(v) for v in r] for r in rows]


def allowed_segments(x: np.ndarray, v: np.ndarray, energy: float) -> List[Tuple[float, float]]:
    """Intervals where ``V(x) <= E``, end points linearly interpolated."""
    inside = v <= energy
    segs = []
    i, n = 0, len(x)
    while i < n:
        if not inside[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and inside[j + 1]:
            j += 1

        def cross(a, b):
            if v[b] == v[a]:
                return x[a]
            return x[a] + (energy - v[a]) * (x[b] - x[a]) / (v[b] - v[a])

        left = cross(i - 1, i) if i > 0 else x[0]
        right = cross(j, j + 1) if j + 1 < n else x[-1]
        segs.append((float(left), float(right)))
        i = j + 1
    return segs


def svg_text(curves: Sequence[Tuple[np.ndarray, np.ndarray]],
             levels: Sequence[Tuple[float, Sequence[Tuple[float, float]]]] = (),
             x_range: Optional[Tuple[float, float]] = None,
             y_range: Optional[Tuple[float, float]] = None,
             title: str = "", xlabel: str = "x", ylabel: str = "V(x)",
             markers: Sequence[Tuple[float, float]] = (),
             width: int = 640, height: int = 480) -> str:
    """Static plot: curves as polylines, levels as horizontal segments.

    ``levels`` is a list of ``(E, [(x0, x1), ...])``.  Everything is clipped
    to the plot frame.
    """
    xs = [c[0] for c in curves if len(c[0])]
    ys = [c[1][np.isfinite(c[1])] for c in curves if len(c[1])]
    if x_range is None:
        x_range = (min(float(a.min()) for a in xs), max(float(a.max()) for a in xs)) if xs else (0.0, 1.0)
    if y_range is None:
        vals = [float(a.min()) for a in ys if len(a)] + [float(a.max()) for a in ys if len(a)]
        vals += [e for e, _ in levels]
        vals += [m[1] for m in markers]
        y_range = (min(vals), max(vals)) if vals else (0.0, 1.0)
    x0, x1 = x_range
    y0, y1 = y_range
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    ml, mr, mt, mb = 70, 20, 30, 50
    pw, ph = width - ml - mr, height - mt - mb

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + (y1 - y) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<defs><clipPath id="frame">'
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}"/></clipPath></defs>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14">{_esc(title)}</text>')
    for t in np.linspace(x0, x1, 5):
        out.append(f'<text x="{px(t):.2f}" y="{mt + ph + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{fmt_tick(t)}</text>')
    for t in np.linspace(y0, y1, 5):
        out.append(f'<text x="{ml - 6}" y="{py(t) + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{fmt_tick(t)}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{_esc(xlabel)}</text>')
    out.append(f'<text x="15" y="{mt + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12" transform="rotate(-90 15 {mt + ph / 2:.1f})">{_esc(ylabel)}</text>')
    out.append('<g clip-path="url(#frame)" fill="none">')
    for cx, cy in curves:
        ok = np.isfinite(cy)
        # split at NaNs so gaps in a locus stay gaps
        start = None
        for i in range(len(cx) + 1):
            if i < len(cx) and ok[i]:
                start = i if start is None else start
                continue
            if start is not None and i - start >= 2:
                pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(cx[start:i], cy[start:i]))
                out.append(f'<polyline points="{pts}" stroke="black" stroke-width="1.5"/>')
            start = None
    for e, segs in levels:
        for a, b in segs:
            out.append(f'<line x1="{px(a):.2f}" y1="{py(e):.2f}" x2="{px(b):.2f}" y2="{py(e):.2f}" '
                       'stroke="red" stroke-width="1"/>')
    for a, b in markers:
        out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2" fill="blue"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def fmt_tick(t: float) -> str:
    return "%.4g" % t


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg(path: str, *args, **kwargs) -> None:
    write_text(path, svg_text(*args, **kwargs))
