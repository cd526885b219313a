"""Marching-squares isocontours with the asymptotic-decider saddle rule.

Contours are oriented with the superlevel region {f > level} on the
left, so closed loops around a positive island run counterclockwise.
Segment generation is vectorized; stitching into polylines walks shared
cell edges and is only needed where whole curves are consumed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .curves import PolylineCurve
from .geometry import clip_segments_to_rect

# (from_edge, to_edge) per case index; B/R/T/L are the cell's bottom,
# right, top and left edges.  Cases 5 and 10 are saddles resolved by the
# sign of the bilinear interpolant at its stationary point.
_SEG_TABLE = {
    1: (("B", "L"),),
    2: (("R", "B"),),
    3: (("R", "L"),),
    4: (("T", "R"),),
    6: (("T", "B"),),
    7: (("T", "L"),),
    8: (("L", "T"),),
    9: (("B", "T"),),
    11: (("R", "T"),),
    12: (("L", "R"),),
    13: (("B", "R"),),
    14: (("L", "B"),),
}
_SADDLE_TABLE = {
    (5, True): (("B", "R"), ("T", "L")),
    (5, False): (("B", "L"), ("T", "R")),
    (10, True): (("L", "B"), ("R", "T")),
    (10, False): (("R", "B"), ("L", "T")),
}


def _edge_crossings(g, origin, spacing):
    """Interpolated crossing coordinates on all horizontal/vertical edges."""
    x0, y0 = origin
    h = spacing
    ny, nx = g.shape
    with np.errstate(divide="ignore", invalid="ignore"):
        sh = g[:, :-1] / (g[:, :-1] - g[:, 1:])
        sv = g[:-1, :] / (g[:-1, :] - g[1:, :])
    sh = np.nan_to_num(sh, nan=0.5, posinf=0.5, neginf=0.5)
    sv = np.nan_to_num(sv, nan=0.5, posinf=0.5, neginf=0.5)
    sh = np.clip(sh, 0.0, 1.0)
    sv = np.clip(sv, 0.0, 1.0)
    jj = np.arange(nx - 1)
    ii = np.arange(ny)
    hx = x0 + (jj[None, :] + sh) * h
    hy = np.broadcast_to(y0 + ii[:, None] * h, sh.shape)
    jj2 = np.arange(nx)
    ii2 = np.arange(ny - 1)
    vx = np.broadcast_to(x0 + jj2[None, :] * h, sv.shape)
    vy = y0 + (ii2[:, None] + sv) * h
    return (hx, hy), (vx, vy)


def _cases(g):
    inside = g > 0
    c = (inside[:-1, :-1].astype(np.uint8)
         + 2 * inside[:-1, 1:]
         + 4 * inside[1:, 1:]
         + 8 * inside[1:, :-1])
    return c


def _saddle_center_inside(g, ci, cj):
    g00 = g[ci, cj]
    g10 = g[ci, cj + 1]
    g11 = g[ci + 1, cj + 1]
    g01 = g[ci + 1, cj]
    denom = g00 + g11 - g10 - g01
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (g00 * g11 - g10 * g01) / denom
    return np.where(denom == 0, True, val > 0)


def _gather(edge, ci, cj, hpts, vpts, nx):
    (hx, hy), (vx, vy) = hpts, vpts
    if edge == "B":
        return np.stack([hx[ci, cj], hy[ci, cj]], axis=1), ci * (nx - 1) + cj
    if edge == "T":
        return np.stack([hx[ci + 1, cj], hy[ci + 1, cj]], axis=1), (ci + 1) * (nx - 1) + cj
    nh_off = hx.shape[0] * (nx - 1)
    if edge == "L":
        return np.stack([vx[ci, cj], vy[ci, cj]], axis=1), nh_off + ci * nx + cj
    if edge == "R":
        return np.stack([vx[ci, cj + 1], vy[ci, cj + 1]], axis=1), nh_off + ci * nx + cj + 1
    raise AssertionError(edge)


def _all_segments(values, origin, spacing, level):
    g = np.asarray(values, dtype=float) - level
    ny, nx = g.shape
    cases = _cases(g)
    hpts, vpts = _edge_crossings(g, origin, spacing)
    starts, ends, fids, tids, cells = [], [], [], [], []

    def emit(ci, cj, pairs):
        for fe, te in pairs:
            p0, e0 = _gather(fe, ci, cj, hpts, vpts, nx)
            p1, e1 = _gather(te, ci, cj, hpts, vpts, nx)
            starts.append(p0)
            ends.append(p1)
            fids.append(e0)
            tids.append(e1)
            cells.append(np.stack([ci, cj], axis=1))

    for case, pairs in _SEG_TABLE.items():
        ci, cj = np.nonzero(cases == case)
        if len(ci):
            emit(ci, cj, pairs)
    for case in (5, 10):
        ci, cj = np.nonzero(cases == case)
        if not len(ci):
            continue
        center = _saddle_center_inside(g, ci, cj)
        for flag in (True, False):
            sel = center == flag
            if np.any(sel):
                emit(ci[sel], cj[sel], _SADDLE_TABLE[(case, flag)])

    if not starts:
        z = np.zeros((0, 2))
        zi = np.zeros(0, dtype=int)
        return z, z, zi, zi, np.zeros((0, 2), dtype=int)
    return (np.concatenate(starts), np.concatenate(ends),
            np.concatenate(fids), np.concatenate(tids), np.concatenate(cells))


def contour_segments(values, origin, spacing, level):
    """Unordered contour segments at the level, as (starts, ends) arrays."""
    p0, p1, _, _, _ = _all_segments(values, origin, spacing, level)
    return p0, p1


def contour_cells(values, level):
    """Boolean cell mask of grid cells crossed by the level contour."""
    g = np.asarray(values, dtype=float) - level
    cases = _cases(g)
    return (cases != 0) & (cases != 15)


def contour_length(values, origin, spacing, level, weight=None, clip=None,
                   keep_midpoint=None):
    """Total (optionally weighted) length of the level contour.

    weight: callable (x, y) -> w evaluated at segment midpoints.
    clip: Rect restricting the contour.
    keep_midpoint: callable (x, y) -> bool mask filtering segments.
    """
    p0, p1 = contour_segments(values, origin, spacing, level)
    if clip is not None and len(p0):
        p0, p1 = clip_segments_to_rect(p0, p1, clip)
    if not len(p0):
        return 0.0
    mids = 0.5 * (p0 + p1)
    lens = np.hypot(*(p1 - p0).T)
    if keep_midpoint is not None:
        sel = keep_midpoint(mids[:, 0], mids[:, 1])
        lens = lens[sel]
        mids = mids[sel]
    if weight is not None and len(lens):
        lens = lens * weight(mids[:, 0], mids[:, 1])
    return float(np.sum(lens))


@dataclass(frozen=True)
class Contour:
    """A stitched contour polyline plus the cells its segments cross."""

    polyline: PolylineCurve
    cells: np.ndarray


def contour_polylines(values, origin, spacing, level):
    """Stitch the level set into polylines (closed loops or open chains)."""
    p0, p1, fids, tids, cells = _all_segments(values, origin, spacing, level)
    n = len(fids)
    if n == 0:
        return []
    order = np.lexsort((tids, fids))
    from_map = {int(fids[k]): int(k) for k in order[::-1]}
    to_map = {int(tids[k]): int(k) for k in order[::-1]}
    used = np.zeros(n, dtype=bool)
    out = []
    for s0 in range(n):
        if used[s0]:
            continue
        chain = deque([s0])
        used[s0] = True
        k = s0
        while True:
            nxt = from_map.get(int(tids[k]))
            if nxt is None or used[nxt]:
                break
            chain.append(nxt)
            used[nxt] = True
            k = nxt
        closed = int(tids[k]) == int(fids[s0])
        if not closed:
            k = s0
            while True:
                prv = to_map.get(int(fids[k]))
                if prv is None or used[prv]:
                    break
                chain.appendleft(prv)
                used[prv] = True
                k = prv
        chain = list(chain)
        pts = np.concatenate([p0[chain], p1[chain[-1]][None, :]])
        if closed:
            pts[-1] = pts[0]
        seg_cells = cells[chain]
        if closed and len(pts) >= 3:
            poly = PolylineCurve(pts, closed=True)
        else:
            poly = PolylineCurve(pts, closed=False)
        out.append(Contour(poly, seg_cells))
    return out
