"""Self-contained SVG figures: heatmaps, line plots and labelled scatters."""
from html import escape

import numpy as np

W, H = 480, 400
L, R, T, B = 64, 24, 36, 52
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]


def _head(title):
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">',
            f'<rect width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>']


def _axes(out, xlo, xhi, ylo, yhi, xlabel, ylabel, logx=False, logy=False):
    out.append(f'<rect x="{L}" y="{T}" width="{W - L - R}" height="{H - T - B}" fill="none" stroke="black"/>')
    for k in range(5):
        fx = xlo + (xhi - xlo) * k / 4
        fy = ylo + (yhi - ylo) * k / 4
        px = L + (W - L - R) * k / 4
        py = H - B - (H - T - B) * k / 4
        tx = f"{10 ** fx:.3g}" if logx else f"{fx:.3g}"
        ty = f"{10 ** fy:.3g}" if logy else f"{fy:.3g}"
        out.append(f'<text x="{px:.1f}" y="{H - B + 14}" text-anchor="middle">{tx}</text>')
        out.append(f'<text x="{L - 4}" y="{py + 4:.1f}" text-anchor="end">{ty}</text>')
    out.append(f'<text x="{(L + W - R) / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{(T + H - B) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {(T + H - B) / 2})">{escape(ylabel)}</text>')


def _mapper(lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (np.asarray(v, float) - lo) / span * (b - a)


def heatmap(masses, path, title, u_max, xlabel="birth", ylabel="death"):
    """Grid of cell masses, row index on the x axis and column index on the y axis."""
    M = np.asarray(masses, float)
    G = M.shape[0]
    out = _head(title)
    vmax = float(M.max()) if M.size and M.max() > 0 else 1.0
    cw = (W - L - R) / G
    ch = (H - T - B) / G
    for i, j in zip(*np.nonzero(M > 0)):
        s = M[i, j] / vmax
        c = int(round(255 * (1 - s)))
        out.append(f'<rect x="{L + i * cw:.2f}" y="{H - B - (j + 1) * ch:.2f}" width="{cw + 0.05:.2f}" '
                   f'height="{ch + 0.05:.2f}" fill="rgb({c},{c},255)"/>')
    _axes(out, 0.0, u_max, 0.0, u_max, xlabel, ylabel)
    out.append(f'<text x="{W - R}" y="{T - 4}" text-anchor="end">max cell mass {vmax:.4g} (linear scale, white = 0)</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out))


def _log10(v):
    """log10 with non-positive values mapped to nan (dropped from the plot)."""
    v = np.asarray(v, float)
    out = np.full(v.shape, np.nan)
    np.log10(v, out=out, where=v > 0)
    return out


def line_plot(series, path, title, xlabel, ylabel, logx=False, logy=False):
    """series: list of dicts with keys x, y, label and optional dashed."""
    out = _head(title)
    tx = _log10 if logx else (lambda v: np.asarray(v, float))
    ty = _log10 if logy else (lambda v: np.asarray(v, float))
    xs = np.concatenate([tx(s["x"]) for s in series]) if series else np.zeros(1)
    ys = np.concatenate([ty(s["y"]) for s in series]) if series else np.zeros(1)
    ok = np.isfinite(xs) & np.isfinite(ys)
    xlo, xhi = (xs[ok].min(), xs[ok].max()) if ok.any() else (0.0, 1.0)
    ylo, yhi = (ys[ok].min(), ys[ok].max()) if ok.any() else (0.0, 1.0)
    pad = 0.05 * (yhi - ylo if yhi > ylo else 1.0)
    ylo, yhi = ylo - pad, yhi + pad
    fx = _mapper(xlo, xhi, L, W - R)
    fy = _mapper(ylo, yhi, H - B, T)
    _axes(out, xlo, xhi, ylo, yhi, xlabel, ylabel, logx, logy)
    for k, s in enumerate(series):
        col = PALETTE[k % len(PALETTE)]
        px, py = fx(tx(s["x"])), fy(ty(s["y"]))
        good = np.isfinite(px) & np.isfinite(py)
        pts = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(px[good], py[good]))
        dash = ' stroke-dasharray="5,4"' if s.get("dashed") else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.5"{dash}/>')
        if not s.get("dashed"):
            for a, b in zip(px[good], py[good]):
                out.append(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="2.5" fill="{col}"/>')
        out.append(f'<text x="{L + 8}" y="{T + 14 + 13 * k}" fill="{col}">{escape(str(s.get("label", "")))}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out))


def scatter(points, labels, path, title, xlabel="birth", ylabel="death"):
    """Diagram scatter with one color per label and the diagonal drawn."""
    P = np.asarray(points, float).reshape(-1, 2)
    labels = [str(x) for x in labels]
    out = _head(title)
    hi = float(P.max()) * 1.05 if len(P) else 1.0
    f = _mapper(0.0, hi, 0.0, 1.0)
    _axes(out, 0.0, hi, 0.0, hi, xlabel, ylabel)
    out.append(f'<line x1="{L}" y1="{H - B}" x2="{W - R}" y2="{T}" stroke="#999"/>')
    kinds = sorted(set(labels))
    for k, lab in enumerate(kinds):
        col = PALETTE[k % len(PALETTE)]
        sel = np.array([x == lab for x in labels], bool)
        for b, d in P[sel]:
            cx = L + f(b) * (W - L - R)
            cy = H - B - f(d) * (H - T - B)
            out.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="2.2" fill="{col}"/>')
        out.append(f'<text x="{L + 8}" y="{T + 14 + 13 * k}" fill="{col}">{escape(lab)} ({int(sel.sum())})</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out))
