"""Numeric convolution of a source with the tilted kernel, and its entropy.

The blurred density r(y) = (g * p)(y) is the reproduction marginal of the
test channel behind the convolution upper bound.  Smooth sources are handled
by Gauss-Legendre panels over the kernel's support (kinks of the kernel land
on panel edges; kinks of the source density get a local panel split).
Tabulated sources use exact cellwise integrals of the kernel CDF.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import gauss_legendre, panel_edges, panel_nodes
from .sources import Source, Tabulated
from .tilted import EpsilonLoss, _check_slope, tilted_cdf, tilted_pdf

__all__ = ["conv_pdf", "conv_entropy"]

_GL = 64
_CHUNK = 512


def _kernel_reach(s: float) -> float:
    # beyond eps + 45/|s| the kernel is below e^-45 of its peak
    return 45.0 / abs(s)


def _kernel_edges(s: float, loss: EpsilonLoss, smooth_scale: float) -> np.ndarray:
    eps = loss.epsilon
    reach = _kernel_reach(s)
    skirt = min(30.0 / abs(s), 2.0 * smooth_scale)
    left = panel_edges([-eps - reach, -eps], skirt)
    right = panel_edges([eps, eps + reach], skirt)
    if eps > 0.0:
        mid = panel_edges([-eps, eps], min(2.0 * smooth_scale, 2.0 * eps))
        return np.concatenate([left, mid[1:], right[1:]])
    return np.concatenate([left, right[1:]])


def _entropy_edges(s: float, loss: EpsilonLoss, upper: float, smooth_scale: float) -> np.ndarray:
    """Panel edges on [0, upper] for integrating -r log r.

    r is smooth at the source scale except near eps, where the kernel skirt
    introduces structure at scale 1/|s|.
    """
    eps = loss.epsilon
    fine_half = min(_kernel_reach(s), eps) if eps > 0.0 else 0.0
    fine_hi = min(eps + _kernel_reach(s), upper)
    coarse = 2.0 * smooth_scale
    fine = min(30.0 / abs(s), coarse)
    parts = [panel_edges([0.0, max(eps - fine_half, 0.0)], coarse)]
    parts.append(panel_edges([max(eps - fine_half, 0.0), min(eps, upper)], fine)[1:])
    parts.append(panel_edges([min(eps, upper), fine_hi], fine)[1:])
    parts.append(panel_edges([fine_hi, upper], coarse)[1:])
    return np.concatenate([p for p in parts if p.size])


def _kink_corrections(source, s, loss, y, edges, base):
    """Replace, per evaluation point, the panel crossed by a source-pdf kink."""
    xg, wg = gauss_legendre(_GL)
    out = base
    for kink in source.pdf_kinks:
        t0 = y - kink
        j = np.searchsorted(edges, t0) - 1
        valid = (j >= 0) & (j < edges.size - 1)
        jj = np.clip(j, 0, edges.size - 2)
        inside = valid & (t0 > edges[jj]) & (t0 < edges[jj + 1])
        idx = np.nonzero(inside)[0]
        if idx.size == 0:
            continue
        a = edges[jj[idx]]
        b = edges[jj[idx] + 1]
        t_mid = t0[idx]
        yy = y[idx, None]

        def seg(lo, hi):
            half = 0.5 * (hi - lo)
            tt = 0.5 * (hi + lo)[:, None] + half[:, None] * xg[None, :]
            vals = tilted_pdf(tt, s, loss) * source.pdf(yy - tt)
            return half * (vals * wg[None, :]).sum(axis=1)

        out[idx] += seg(a, t_mid) + seg(t_mid, b) - seg(a, b)
    return out


def conv_pdf(source: Source, s: float, loss: EpsilonLoss, y) -> np.ndarray:
    """(tilted kernel * source density)(y), vectorized over y."""
    s = _check_slope(s)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if isinstance(source, Tabulated):
        return _tabulated_conv_pdf(source, s, loss, y)
    smooth = math.sqrt(source.variance())
    edges = _kernel_edges(s, loss, smooth)
    t, w = panel_nodes(edges, _GL)
    gw = w * tilted_pdf(t, s, loss)
    out = np.empty_like(y)
    for start in range(0, y.size, _CHUNK):
        block = slice(start, start + _CHUNK)
        out[block] = source.pdf(y[block, None] - t[None, :]) @ gw
    if source.pdf_kinks:
        out = _kink_corrections(source, s, loss, y, edges, out)
    return out


def _tabulated_conv_pdf(source: Tabulated, s, loss, y):
    h = source.spacing
    cell_edges = np.concatenate([source.grid - 0.5 * h, [source.grid[-1] + 0.5 * h]])
    out = np.empty_like(y)
    for start in range(0, y.size, _CHUNK):
        block = slice(start, start + _CHUNK)
        cdf = tilted_cdf(y[block, None] - cell_edges[None, :], s, loss)
        out[block] = (cdf[:, :-1] - cdf[:, 1:]) @ (source.masses / h)
    return out


def _neg_r_log_r(r):
    r = np.maximum(r, 0.0)
    return -np.where(r > 0.0, r * np.log(np.where(r > 0.0, r, 1.0)), 0.0)


def conv_entropy(source: Source, s: float, loss: EpsilonLoss, refine: int = 1) -> float:
    """Differential entropy of (tilted kernel * source), by panel quadrature.

    refine multiplies the panel density (used for stability checks).
    """
    s = _check_slope(s)
    if isinstance(source, Tabulated):
        return _tabulated_conv_entropy(source, s, loss, refine)
    smooth = math.sqrt(source.variance()) / refine
    upper = source.tail_span(1e-16) + loss.epsilon + _kernel_reach(s)
    if source.symmetric:
        edges = _entropy_edges(s, loss, upper, smooth)
        yn, wq = panel_nodes(edges, _GL)
        return 2.0 * float(np.dot(wq, _neg_r_log_r(conv_pdf(source, s, loss, yn))))
    edges_pos = _entropy_edges(s, loss, upper, smooth)
    yn = np.concatenate([-edges_pos[::-1], edges_pos[1:]])
    yn, wq = panel_nodes(yn, _GL)
    return float(np.dot(wq, _neg_r_log_r(conv_pdf(source, s, loss, yn))))


def _tabulated_conv_entropy(source: Tabulated, s, loss, refine):
    # r has derivative kinks at every cell edge shifted by +-eps, so composite
    # Simpson on a fine uniform grid is the robust choice here (~1e-6 target)
    reach = loss.epsilon + _kernel_reach(s)
    lo = float(source.grid[0]) - 0.5 * source.spacing - reach
    hi = float(source.grid[-1]) + 0.5 * source.spacing + reach
    scales = [source.spacing, 1.0 / abs(s)]
    if loss.epsilon > 0.0:
        scales.append(loss.epsilon)
    step = min(scales) / (6.0 * refine)
    n = int(math.ceil((hi - lo) / step))
    n = min(max(n, 64), 400_000)
    if n % 2 == 1:
        n += 1
    yn = np.linspace(lo, hi, n + 1)
    vals = _neg_r_log_r(conv_pdf(source, s, loss, yn))
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((hi - lo) / n / 3.0 * np.dot(w, vals))
