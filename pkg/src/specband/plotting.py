"""Deterministic SVG rendering of coherence fields.

Hand-rolled SVG (no plotting backend) so identical inputs produce
byte-identical files: fixed float formatting, a fixed embedded colormap,
and no timestamps or random ids.  Layout: time on x, log2(scale) on y
growing downward, r2 as colored cells, a translucent overlay on the
cone-of-influence region, red outlines on cells above the significance
threshold, and phase arrows on a coarse grid.
"""

import math

import numpy as np

from .coherence import CoherenceResult
from .errors import ValidationError

_MOD = "plot"

# anchors approximating the viridis ramp; linear RGB interpolation between
_CMAP = [
    (0.000, (0x44, 0x01, 0x54)),
    (0.125, (0x46, 0x32, 0x7e)),
    (0.250, (0x36, 0x5c, 0x8d)),
    (0.375, (0x27, 0x7f, 0x8e)),
    (0.500, (0x21, 0x91, 0x8c)),
    (0.625, (0x1f, 0xa1, 0x87)),
    (0.750, (0x4a, 0xc1, 0x6d)),
    (0.875, (0xa0, 0xda, 0x39)),
    (1.000, (0xfd, 0xe7, 0x25)),
]

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 16, 16, 44
_PLOT_W, _PLOT_H = 720, 420
_MAX_ARROWS = 32
_MAX_COLS, _MAX_ROWS = 128, 64      # heatmap cells cap (keeps files small)


def _color(v: float) -> str:
    v = min(max(float(v), 0.0), 1.0)
    for (p0, c0), (p1, c1) in zip(_CMAP[:-1], _CMAP[1:]):
        if v <= p1:
            w = 0.0 if p1 == p0 else (v - p0) / (p1 - p0)
            rgb = tuple(round(a + w * (b - a)) for a, b in zip(c0, c1))
            return "#%02x%02x%02x" % rgb
    return "#%02x%02x%02x" % _CMAP[-1][1]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _block_edges(n: int, cap: int) -> np.ndarray:
    blocks = min(n, cap)
    return np.unique(np.round(np.linspace(0, n, blocks + 1)).astype(int))


def _downsample(result: CoherenceResult) -> CoherenceResult:
    """Block-average the field onto a grid of at most MAX_ROWS x MAX_COLS."""
    n_scales, n_times = result.r2.shape
    if n_scales <= _MAX_ROWS and n_times <= _MAX_COLS:
        return result
    re = _block_edges(n_scales, _MAX_ROWS)
    ce = _block_edges(n_times, _MAX_COLS)
    nr, nc = len(re) - 1, len(ce) - 1
    r2 = np.empty((nr, nc))
    phase = np.empty((nr, nc))
    thr = np.empty((nr, nc)) if result.threshold is not None else None
    unit_phase = np.exp(1j * result.phase)
    for i in range(nr):
        rs = slice(re[i], re[i + 1])
        for k in range(nc):
            cs = slice(ce[k], ce[k + 1])
            r2[i, k] = result.r2[rs, cs].mean()
            phase[i, k] = np.angle(unit_phase[rs, cs].mean())
            if thr is not None:
                thr[i, k] = result.threshold[rs, cs].mean()
    scales = np.array([np.exp(np.log(result.scales[re[i]:re[i + 1]]).mean())
                       for i in range(nr)])
    times = np.array([result.times[ce[k]:ce[k + 1]].mean() for k in range(nc)])
    coi = np.array([result.coi[ce[k]:ce[k + 1]].min() for k in range(nc)])
    return CoherenceResult(r2, phase, coi, scales, times, result.dt, thr)


def emit_plot(result: CoherenceResult, path):
    """Write a coherence heatmap as a deterministic SVG file."""
    result = _downsample(result)
    r2 = result.r2
    n_scales, n_times = r2.shape
    if n_scales < 2 or n_times < 2:
        raise ValidationError("coherence grid too small to plot", module=_MOD)
    s_log = np.log2(result.scales)
    t = result.times

    def x_of(time_val):
        return _MARGIN_L + (time_val - t[0]) / (t[-1] - t[0]) * _PLOT_W

    def y_of(scale_val):
        lo, hi = s_log[0], s_log[-1]
        return _MARGIN_T + (math.log2(scale_val) - lo) / (hi - lo) * _PLOT_H

    # cell edges: midpoints in time, geometric midpoints in scale
    t_edges = np.concatenate(([t[0]], (t[:-1] + t[1:]) / 2.0, [t[-1]]))
    s_edges_log = np.concatenate(([s_log[0]], (s_log[:-1] + s_log[1:]) / 2.0,
                                  [s_log[-1]]))
    xs = [x_of(v) for v in t_edges]
    ys = [_MARGIN_T + (v - s_log[0]) / (s_log[-1] - s_log[0]) * _PLOT_H
          for v in s_edges_log]

    parts = []
    parts.append('<?xml version="1.0" encoding="UTF-8"?>')
    width = _MARGIN_L + _PLOT_W + _MARGIN_R
    height = _MARGIN_T + _PLOT_H + _MARGIN_B
    parts.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
                 f'height="{height}" viewBox="0 0 {width} {height}">')
    parts.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>')

    for i in range(n_scales):
        y0, y1 = ys[i], ys[i + 1]
        for k in range(n_times):
            x0, x1 = xs[k], xs[k + 1]
            parts.append(
                f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0 + 0.5)}" '
                f'height="{_fmt(y1 - y0 + 0.5)}" fill="{_color(r2[i, k])}"/>')

    sig = result.significant() if result.threshold is not None else None
    if sig is not None:
        for i in range(n_scales):
            for k in range(n_times):
                if sig[i, k]:
                    parts.append(
                        f'<rect class="sig" x="{_fmt(xs[k])}" y="{_fmt(ys[i])}" '
                        f'width="{_fmt(xs[k + 1] - xs[k])}" '
                        f'height="{_fmt(ys[i + 1] - ys[i])}" fill="none" '
                        f'stroke="#d62728" stroke-width="0.6"/>')

    # cone of influence: shade scales above the per-time trustworthy limit
    s_min = float(result.scales[0])
    pts = []
    for k in range(n_times):
        c = max(result.coi[k], s_min / 2.0)
        y = y_of(c) if c >= s_min else _MARGIN_T
        pts.append((x_of(t[k]), min(max(y, _MARGIN_T), _MARGIN_T + _PLOT_H)))
    poly = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in pts)
    bottom_r = f"{_fmt(xs[-1])},{_fmt(_MARGIN_T + _PLOT_H)}"
    bottom_l = f"{_fmt(xs[0])},{_fmt(_MARGIN_T + _PLOT_H)}"
    parts.append(f'<polygon class="coi" points="{poly} {bottom_r} {bottom_l}" '
                 'fill="#ffffff" fill-opacity="0.55" stroke="#000000" '
                 'stroke-width="0.8"/>')

    # phase arrows on a coarse grid, outside the coi only
    stride_t = max(1, math.ceil(n_times / _MAX_ARROWS))
    stride_s = max(1, math.ceil(n_scales / _MAX_ARROWS))
    in_coi = result.in_coi()
    arrow = min((xs[-1] - xs[0]) / _MAX_ARROWS, 14.0) * 0.45
    for i in range(stride_s // 2, n_scales, stride_s):
        for k in range(stride_t // 2, n_times, stride_t):
            if in_coi[i, k]:
                continue
            cx = (xs[k] + xs[k + 1]) / 2.0
            cy = (ys[i] + ys[i + 1]) / 2.0
            ang = result.phase[i, k]
            dx, dy = arrow * math.cos(ang), -arrow * math.sin(ang)
            x0, y0, x1, y1 = cx - dx, cy - dy, cx + dx, cy + dy
            parts.append(f'<line class="phase" x1="{_fmt(x0)}" y1="{_fmt(y0)}" '
                         f'x2="{_fmt(x1)}" y2="{_fmt(y1)}" stroke="#000000" '
                         'stroke-width="0.9"/>')
            for rot in (2.6, -2.6):
                hx = x1 + 0.45 * arrow * math.cos(ang + rot)
                hy = y1 - 0.45 * arrow * math.sin(ang + rot)
                parts.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" '
                             f'x2="{_fmt(hx)}" y2="{_fmt(hy)}" stroke="#000000" '
                             'stroke-width="0.9"/>')

    # axes
    ax_y = _MARGIN_T + _PLOT_H
    parts.append(f'<line x1="{_MARGIN_L}" y1="{ax_y}" x2="{_MARGIN_L + _PLOT_W}" '
                 f'y2="{ax_y}" stroke="#000000" stroke-width="1"/>')
    parts.append(f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
                 f'y2="{ax_y}" stroke="#000000" stroke-width="1"/>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        tv = t[0] + frac * (t[-1] - t[0])
        parts.append(f'<text x="{_fmt(x_of(tv))}" y="{ax_y + 18}" '
                     f'font-size="11" text-anchor="middle" '
                     f'font-family="sans-serif">{tv:.6g}</text>')
    for i in range(0, n_scales, max(1, (n_scales - 1) // 6)):
        sv = result.scales[i]
        parts.append(f'<text x="{_MARGIN_L - 8}" y="{_fmt(y_of(sv) + 4)}" '
                     f'font-size="11" text-anchor="end" '
                     f'font-family="sans-serif">{sv:.4g}</text>')
    parts.append(f'<text x="{_MARGIN_L + _PLOT_W / 2:.0f}" y="{ax_y + 36}" '
                 'font-size="12" text-anchor="middle" '
                 'font-family="sans-serif">time</text>')
    parts.append('</svg>')
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
