"""Axis-aligned rectangles and small planar predicates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle [x0, x1] x [y0, y1]."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise InvalidArgument("window must have positive width and height")

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0

    @property
    def center(self):
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def contains_point(self, p, margin=0.0):
        x, y = float(p[0]), float(p[1])
        return (self.x0 + margin <= x <= self.x1 - margin
                and self.y0 + margin <= y <= self.y1 - margin)

    def contains_ball(self, center, r, slack=1e-12):
        cx, cy = float(center[0]), float(center[1])
        pad = r - slack * max(1.0, r)
        return (self.x0 <= cx - pad and cx + pad <= self.x1
                and self.y0 <= cy - pad and cy + pad <= self.y1)

    def contains_rect(self, other, slack=1e-9):
        return (self.x0 - slack <= other.x0 and other.x1 <= self.x1 + slack
                and self.y0 - slack <= other.y0 and other.y1 <= self.y1 + slack)

    def intersects_ball(self, center, r):
        cx, cy = float(center[0]), float(center[1])
        dx = max(self.x0 - cx, 0.0, cx - self.x1)
        dy = max(self.y0 - cy, 0.0, cy - self.y1)
        return dx * dx + dy * dy < r * r

    def as_tuple(self):
        return (self.x0, self.y0, self.x1, self.y1)


def clip_segments_to_rect(starts, ends, rect):
    """Clip segments to a rectangle (Liang-Barsky, vectorized).

    starts, ends: (N, 2) arrays.  Returns clipped (starts, ends) with
    fully-outside segments removed.
    """
    p0 = np.asarray(starts, dtype=float)
    p1 = np.asarray(ends, dtype=float)
    d = p1 - p0
    t0 = np.zeros(len(p0))
    t1 = np.ones(len(p0))
    keep = np.ones(len(p0), dtype=bool)
    for axis, lo, hi in ((0, rect.x0, rect.x1), (1, rect.y0, rect.y1)):
        p = p0[:, axis]
        dd = d[:, axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            tlo = (lo - p) / dd
            thi = (hi - p) / dd
        tin = np.where(dd >= 0, tlo, thi)
        tout = np.where(dd >= 0, thi, tlo)
        par = dd == 0
        inside = (p >= lo) & (p <= hi)
        keep &= np.where(par, inside, True)
        tin = np.where(par, 0.0, tin)
        tout = np.where(par, 1.0, tout)
        t0 = np.maximum(t0, tin)
        t1 = np.minimum(t1, tout)
    keep &= t0 <= t1
    q0 = p0[keep] + t0[keep, None] * d[keep]
    q1 = p0[keep] + t1[keep, None] * d[keep]
    return q0, q1


def segments_properly_intersect(a0, a1, b0, b1, eps=1e-12):
    """Whether segment pairs intersect, vectorized over broadcastable inputs.

    Touching only at shared endpoints (within eps of an endpoint pair)
    does not count.  Used by the Jordan-curve simplicity test.
    """
    a0 = np.asarray(a0, float)
    a1 = np.asarray(a1, float)
    b0 = np.asarray(b0, float)
    b1 = np.asarray(b1, float)

    def cross(o, p, q):
        return ((p[..., 0] - o[..., 0]) * (q[..., 1] - o[..., 1])
                - (p[..., 1] - o[..., 1]) * (q[..., 0] - o[..., 0]))

    d1 = cross(a0, a1, b0)
    d2 = cross(a0, a1, b1)
    d3 = cross(b0, b1, a0)
    d4 = cross(b0, b1, a1)
    crossing = (((d1 > eps) & (d2 < -eps)) | ((d1 < -eps) & (d2 > eps))) & \
               (((d3 > eps) & (d4 < -eps)) | ((d3 < -eps) & (d4 > eps)))

    def on_seg(o, p, q):
        # q collinear-ish with (o,p): does q sit inside the bounding box?
        lo = np.minimum(o, p)
        hi = np.maximum(o, p)
        return np.all((q >= lo - eps) & (q <= hi + eps), axis=-1)

    touch = ((np.abs(d1) <= eps) & on_seg(a0, a1, b0)) | \
            ((np.abs(d2) <= eps) & on_seg(a0, a1, b1)) | \
            ((np.abs(d3) <= eps) & on_seg(b0, b1, a0)) | \
            ((np.abs(d4) <= eps) & on_seg(b0, b1, a1))
    return crossing | touch
