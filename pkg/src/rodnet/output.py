"""CSV and SVG emission.  Files are written atomically (temp file + rename)."""

import csv
import io
import math
import os
import tempfile

import numpy as np

from . import __version__
from .equilibrium import FAILED, ISOTROPIC, NEMATIC
from .errors import DomainError
from .phase_diagram import COLORS, PhaseDiagram, StressCurve


def fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def header_lines(meta):
    lines = [f"rodnet {__version__}"]
    for k in sorted(meta):
        for i, part in enumerate(str(meta[k]).splitlines() or [""]):
            lines.append(f"{k}: {part}" if i == 0 else f"  {part}")
    return lines


def csv_text(columns, rows, meta=None):
    buf = io.StringIO()
    for line in header_lines(meta or {}):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def atomic_write(path, text):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, columns, rows, meta=None):
    atomic_write(path, csv_text(columns, rows, meta))


def read_csv(path):
    """(meta lines, header, rows) of a file written by :func:`write_csv`."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    meta = [ln[2:] for ln in lines if ln.startswith("# ")]
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = list(csv.reader(body))
    return meta, rows[0], rows[1:]


# -- SVG -------------------------------------------------------------------

W, H = 640, 480
ML, MR, MT, MB = 70, 20, 30, 55
LINE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
               "#e377c2")


def _n(x):
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, n))


def _escape(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _axes(parts, xlo, xhi, ylo, yhi, xlabel, ylabel, title):
    pw, ph = W - ML - MR, H - MT - MB
    parts.append(f'<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" '
                 f'stroke="black" stroke-width="1"/>')
    for t in _ticks(xlo, xhi):
        x = ML + (0 if xhi == xlo else (t - xlo) / (xhi - xlo) * pw)
        parts.append(f'<line x1="{_n(x)}" y1="{MT + ph}" x2="{_n(x)}" y2="{MT + ph + 5}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{_n(x)}" y="{MT + ph + 18}" font-size="11" '
                     f'text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(ylo, yhi):
        y = MT + ph - (0 if yhi == ylo else (t - ylo) / (yhi - ylo) * ph)
        parts.append(f'<line x1="{ML - 5}" y1="{_n(y)}" x2="{ML}" y2="{_n(y)}" stroke="black"/>')
        parts.append(f'<text x="{ML - 8}" y="{_n(y + 4)}" font-size="11" '
                     f'text-anchor="end">{t:.3g}</text>')
    parts.append(f'<text x="{ML + pw / 2}" y="{H - 12}" font-size="13" '
                 f'text-anchor="middle">{_escape(xlabel)}</text>')
    parts.append(f'<text x="16" y="{MT + ph / 2}" font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 16 {MT + ph / 2})">{_escape(ylabel)}</text>')
    parts.append(f'<text x="{ML + pw / 2}" y="18" font-size="14" '
                 f'text-anchor="middle">{_escape(title)}</text>')


def _doc(parts, meta):
    head = "\n".join(_escape(x) for x in header_lines(meta or {}))
    return ("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}">\n<!--\n{head}\n-->\n'
            '<rect width="100%" height="100%" fill="white"/>\n' + "\n".join(parts) + "\n</svg>\n")


def _diagram_svg(d, meta):
    rho, aa = d.rho, d.aa
    pw, ph = W - ML - MR, H - MT - MB
    nx, ny = len(rho), len(aa)
    cw, ch = pw / nx, ph / ny
    parts = []
    for j in range(ny):
        for i in range(nx):
            x = ML + i * cw
            y = MT + ph - (j + 1) * ch
            parts.append(f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(cw + 0.01)}" '
                         f'height="{_n(ch + 0.01)}" fill="{COLORS[d.labels[j, i]]}"/>')
    _axes(parts, rho[0], rho[-1], aa[0], aa[-1], "rho", "A_a",
          f"phase diagram, chi = {d.chi:g} ({d.protocol})")
    return _doc(parts, meta)


def _series_svg(series, xlabel, ylabel, title, meta):
    xs = np.concatenate([np.asarray(x, float) for _, x, _ in series])
    ys = np.concatenate([np.asarray(y, float) for _, _, y in series])
    ok = np.isfinite(xs) & np.isfinite(ys)
    if not ok.any():
        raise DomainError("nothing finite to plot")
    xlo, xhi = float(xs[ok].min()), float(xs[ok].max())
    ylo, yhi = float(ys[ok].min()), float(ys[ok].max())
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    pw, ph = W - ML - MR, H - MT - MB
    parts = []
    for k, (name, x, y) in enumerate(series):
        col = LINE_COLORS[k % len(LINE_COLORS)]
        pts = []
        for a, b in zip(x, y):
            if np.isfinite(a) and np.isfinite(b):
                px = ML + (a - xlo) / (xhi - xlo) * pw
                py = MT + ph - (b - ylo) / (yhi - ylo) * ph
                pts.append(f"{_n(px)},{_n(py)}")
        parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" '
                     f'points="{" ".join(pts)}"/>')
        parts.append(f'<text x="{W - MR - 8}" y="{MT + 16 + 14 * k}" font-size="11" '
                     f'text-anchor="end" fill="{col}">{_escape(name)}</text>')
    _axes(parts, xlo, xhi, ylo, yhi, xlabel, ylabel, title)
    return _doc(parts, meta)


def render_svg(obj, meta=None, title=None):
    """SVG text for a PhaseDiagram, a StressCurve, or a {A_a: Branch} family."""
    if isinstance(obj, PhaseDiagram):
        if obj.labels.size == 0:
            raise DomainError("empty diagram")
        return _diagram_svg(obj, meta)
    if isinstance(obj, StressCurve):
        if obj.lam.size == 0:
            raise DomainError("empty curve")
        return _series_svg([(f"A_a = {obj.meta.get('A_a', '')}", obj.lam, obj.p_xx)],
                           "lambda", "P_xx", title or "stress-strain", meta)
    if isinstance(obj, dict):
        if not obj:
            raise DomainError("empty curve family")
        first = next(iter(obj.values()))
        if isinstance(first, StressCurve):
            series = [(f"A_a = {a:g}", c.lam, c.p_xx) for a, c in obj.items()]
            return _series_svg(series, "lambda", "P_xx", title or "stress-strain", meta)
        series = [(f"A_a = {a:g}", b.rho, b.s_star) for a, b in obj.items()]
        return _series_svg(series, "rho", "s*", title or "order parameter", meta)
    raise DomainError(f"cannot render {type(obj).__name__}")


__all__ = ["render_svg", "write_csv", "csv_text", "atomic_write", "read_csv",
           "NEMATIC", "ISOTROPIC", "FAILED"]
