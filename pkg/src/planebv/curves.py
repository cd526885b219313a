"""Polyline curves: length, arc-length reparametrization, metric speed."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCurve, InvalidArgument, UndefinedAtVertex
from .geometry import segments_properly_intersect


@dataclass(frozen=True)
class PolylineCurve:
    """Ordered planar points, optionally closed (first point repeated last).

    params, when given, are strictly increasing parameter values for the
    vertices; the default parametrization is uniform on [0, 1].
    """

    points: np.ndarray
    closed: bool = False
    params: np.ndarray | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[1] != 2 or pts.shape[0] < 1:
            raise InvalidArgument("curve needs an (N, 2) point list with N >= 1")
        object.__setattr__(self, "points", pts)
        if self.closed:
            if len(pts) < 2 or not np.allclose(pts[0], pts[-1], atol=1e-9):
                raise InvalidArgument("closed curve must repeat its first point last")
        if self.params is not None:
            t = np.asarray(self.params, dtype=float)
            if t.shape != (len(pts),) or np.any(np.diff(t) <= 0):
                raise InvalidArgument("params must be strictly increasing, one per vertex")
            object.__setattr__(self, "params", t)

    def __len__(self):
        return len(self.points)

    def knots(self):
        if self.params is not None:
            return self.params
        n = len(self.points)
        if n == 1:
            return np.zeros(1)
        return np.linspace(0.0, 1.0, n)

    def segment_lengths(self):
        if len(self.points) < 2:
            return np.zeros(0)
        return np.hypot(*np.diff(self.points, axis=0).T)

    def arc_positions(self):
        return np.concatenate([[0.0], np.cumsum(self.segment_lengths())])

    def reversed(self):
        p = self.points[::-1].copy()
        t = None if self.params is None else (self.params[-1] - self.params[::-1])
        return PolylineCurve(p, self.closed, t)


def segment(p, q):
    return PolylineCurve(np.array([p, q], dtype=float))


def circle(radius=1.0, n=256, center=(0.0, 0.0)):
    th = np.linspace(0.0, 2 * np.pi, n + 1)
    pts = np.stack([center[0] + radius * np.cos(th),
                    center[1] + radius * np.sin(th)], axis=1)
    pts[-1] = pts[0]
    return PolylineCurve(pts, closed=True)


def ellipse(a, b, n=256, center=(0.0, 0.0)):
    th = np.linspace(0.0, 2 * np.pi, n + 1)
    pts = np.stack([center[0] + a * np.cos(th),
                    center[1] + b * np.sin(th)], axis=1)
    pts[-1] = pts[0]
    return PolylineCurve(pts, closed=True)


def length(curve):
    """Curve length: the supremum of inscribed partition sums.

    For a polyline this is the sum of segment lengths, which equals the
    one-dimensional Hausdorff measure of the support for simple curves.
    """
    return float(np.sum(curve.segment_lengths()))


def partition_sum(curve, ts):
    """Sum of chord lengths over a parameter partition (lower bound for length)."""
    ts = np.sort(np.asarray(ts, dtype=float))
    pts = np.stack([_eval_at(curve, t) for t in ts])
    return float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))


def _eval_at(curve, t):
    k = curve.knots()
    t = float(np.clip(t, k[0], k[-1]))
    i = int(np.clip(np.searchsorted(k, t, side="right") - 1, 0, len(k) - 2))
    dt = k[i + 1] - k[i]
    s = 0.0 if dt == 0 else (t - k[i]) / dt
    return (1 - s) * curve.points[i] + s * curve.points[i + 1]


def arclength_reparam(curve, n):
    """Resample to points equally spaced in arc length.

    Open curves get n vertices at spacing L/(n-1); closed curves n
    distinct samples at spacing L/n (the first repeated last).  The
    output carries arc-length params, so its metric speed is 1.
    """
    if n < 2:
        raise InvalidArgument("need at least two samples")
    L = length(curve)
    if L <= 0:
        raise DegenerateCurve("cannot reparametrize a zero-length curve")
    arcs = curve.arc_positions()
    if curve.closed:
        targets = np.arange(n + 1) * (L / n)
        targets[-1] = L
    else:
        targets = np.linspace(0.0, L, n)
    xs = np.interp(targets, arcs, curve.points[:, 0])
    ys = np.interp(targets, arcs, curve.points[:, 1])
    pts = np.stack([xs, ys], axis=1)
    if curve.closed:
        pts[-1] = pts[0]
        # strictly increasing params need the duplicate endpoint at L
        return PolylineCurve(pts, closed=True, params=targets)
    return PolylineCurve(pts, closed=False, params=targets)


def metric_speed(curve, t, vertex_eps=1e-12):
    """Local speed |gamma'| at parameter t (constant on each segment)."""
    if len(curve.points) < 2:
        raise InvalidArgument("speed undefined for a single point")
    k = curve.knots()
    if t < k[0] or t > k[-1]:
        raise InvalidArgument("parameter outside the curve's interval")
    scale = max(abs(k[0]), abs(k[-1]), 1.0)
    if np.any(np.abs(k - t) <= vertex_eps * scale):
        if not (abs(t - k[0]) <= vertex_eps * scale or abs(t - k[-1]) <= vertex_eps * scale):
            raise UndefinedAtVertex(f"speed undefined at vertex parameter {t}")
    i = int(np.clip(np.searchsorted(k, t, side="right") - 1, 0, len(k) - 2))
    return float(curve.segment_lengths()[i] / (k[i + 1] - k[i]))


def refine(curve, per_segment=1):
    """Insert collinear points on each segment; length is invariant."""
    pts = [curve.points[0]]
    for a, b in zip(curve.points[:-1], curve.points[1:]):
        for m in range(1, per_segment + 1):
            s = m / (per_segment + 1)
            pts.append((1 - s) * a + s * b)
        pts.append(b)
    return PolylineCurve(np.array(pts), curve.closed)


def is_simple(curve, eps=1e-12):
    """Whether the polyline has no self-intersections.

    Adjacent segments may share their common endpoint; any other contact
    (including collinear overlap) disqualifies.  Closed curves passing
    this test are genuine Jordan curves.
    """
    pts = curve.points
    nseg = len(pts) - 1
    if nseg < 2:
        return True
    a0 = pts[:-1]
    a1 = pts[1:]
    for i in range(nseg - 1):
        j0 = i + 2
        if j0 >= nseg:
            break
        jmax = nseg
        if curve.closed and i == 0:
            jmax = nseg - 1  # last segment is adjacent to the first
        if j0 >= jmax:
            continue
        hit = segments_properly_intersect(a0[i], a1[i], a0[j0:jmax], a1[j0:jmax], eps)
        if np.any(hit):
            return False
    # adjacent pairs: reject collinear spikes (next segment folding back)
    d = a1 - a0
    ln = np.hypot(d[:, 0], d[:, 1])
    ok = ln > 0
    u = d[ok] / ln[ok, None]
    for i in range(len(u) - 1):
        if np.dot(u[i], u[i + 1]) < -1 + 1e-12:
            return False
    return True
