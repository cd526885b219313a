"""Covering estimators for H^1 and the codimension-one measure H^h.

Covers are greedy arc-length covers: centers marched along the curve at
spacing delta so each ball of radius delta/2 contains its arc chunk.
They overestimate the true covering infimum by a bounded geometric
factor, which the comparability constant absorbs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import curves as cv
from . import weighted_plane as wp
from .errors import ClippedBall, InvalidArgument


def _omega(nu):
    return math.pi ** (nu / 2) / math.gamma(nu / 2 + 1)


@dataclass(frozen=True)
class CoverEstimate:
    """Value of a covering sum plus the cover that produced it."""

    value: float
    delta: float
    cover: tuple            # ((cx, cy), radius) pairs
    normalization: float

    def __post_init__(self):
        if self.value < 0 or self.delta <= 0:
            raise InvalidArgument("cover estimate needs value >= 0 and delta > 0")
        if any(r >= self.delta for _, r in self.cover):
            raise InvalidArgument("cover radii must stay below delta")


def _as_curve_list(curve_or_curves):
    if isinstance(curve_or_curves, cv.PolylineCurve):
        return [curve_or_curves]
    return list(curve_or_curves)


def _greedy_cover(curve, delta):
    """Ball centers of radius delta/2 marched along arc length at spacing
    delta; each ball covers its chunk since chords never exceed arcs."""
    L = cv.length(curve)
    if L == 0:
        return [(tuple(curve.points[0]), delta / 2)]
    n = max(1, math.ceil(L / delta))
    arcs = curve.arc_positions()
    centers_s = (np.arange(n) + 0.5) * (L / n)
    xs = np.interp(centers_s, arcs, curve.points[:, 0])
    ys = np.interp(centers_s, arcs, curve.points[:, 1])
    return [((float(x), float(y)), delta / 2) for x, y in zip(xs, ys)]


def cover_contains_curve(cover, curve, samples=512):
    """Sanity check: sampled curve points all lie inside some cover ball."""
    s = np.linspace(0, 1, samples)
    arcs = curve.arc_positions()
    L = arcs[-1]
    xs = np.interp(s * L, arcs, curve.points[:, 0])
    ys = np.interp(s * L, arcs, curve.points[:, 1])
    centers = np.array([c for c, _ in cover])
    radii = np.array([r for _, r in cover])
    d2 = (xs[:, None] - centers[None, :, 0]) ** 2 + (ys[:, None] - centers[None, :, 1]) ** 2
    return bool(np.all(np.min(d2 - (radii[None, :] * (1 + 1e-9)) ** 2, axis=1) <= 0))


def h1_cover_estimate(curve, delta):
    """Greedy covering sum for H^1: (omega_1/2) * sum of diameters.

    omega_1 = 2, so the normalization factor is exactly 1 and the value
    converges to the curve length as delta -> 0.
    """
    if delta <= 0:
        raise InvalidArgument("delta must be positive")
    cover = []
    for c in _as_curve_list(curve):
        cover.extend(_greedy_cover(c, delta))
    norm = _omega(1) / 2.0
    value = norm * sum(2 * r for _, r in cover)
    return CoverEstimate(value, delta, tuple(cover), norm)


def hh_cover_estimate(curve, plane, delta):
    """Same cover, but each ball contributes m(B_r(x)) / r.

    This is the codimension-one covering sum; on 2-Ahlfors regular
    planes it is comparable to the H^1 sum.
    """
    if delta <= 0:
        raise InvalidArgument("delta must be positive")
    cover = []
    for c in _as_curve_list(curve):
        cover.extend(_greedy_cover(c, delta))
    value = 0.0
    for (center, r) in cover:
        if not plane.window.contains_ball(center, r):
            raise ClippedBall("cover ball escapes the window")
        value += ball_h(plane, center, r)
    return CoverEstimate(value, delta, tuple(cover), 1.0)


def ball_h(plane, center, r):
    """h(B_r(x)) = m(B_r(x)) / r."""
    return wp.ball_measure(plane, center, r).value / r


def _dist_to_curve(p, curve):
    a = curve.points[:-1]
    b = curve.points[1:]
    if len(a) == 0:
        return float(np.hypot(p[0] - curve.points[0, 0], p[1] - curve.points[0, 1]))
    d = b - a
    den = np.maximum(np.sum(d * d, axis=1), 1e-300)
    t = np.clip(((p[0] - a[:, 0]) * d[:, 0] + (p[1] - a[:, 1]) * d[:, 1]) / den, 0, 1)
    proj = a + t[:, None] * d
    return float(np.min(np.hypot(proj[:, 0] - p[0], proj[:, 1] - p[1])))


@dataclass(frozen=True)
class ComparabilityReport:
    ratio_min: float
    ratio_max: float
    passes: bool
    applicable: bool
    ratios: tuple
    constant: float


def comparability_check(curve, plane, delta_ladder, constant=10.0,
                        ahlfors_centers=8, ahlfors_tol=wp.DEFAULT_FRAME_RATIO_TOL):
    """Ratio interval of hh/h1 over the delta ladder.

    The verdict requires the ratio interval inside [1/constant, constant].
    If the plane fails the 2-Ahlfors frame test near the curve the check
    is still computed but marked non-applicable.
    """
    deltas = sorted(set(float(d) for d in delta_ladder), reverse=True)
    if not deltas:
        raise InvalidArgument("empty delta ladder")
    curves_ = _as_curve_list(curve)

    applicable = True
    try:
        centers = []
        for c in curves_:
            arcs = c.arc_positions()
            L = arcs[-1]
            ss = (np.arange(ahlfors_centers) + 0.5) * (L / ahlfors_centers)
            xs = np.interp(ss, arcs, c.points[:, 0])
            ys = np.interp(ss, arcs, c.points[:, 1])
            centers.extend((float(x), float(y)) for x, y in zip(xs, ys))
        # singular density points inside the curve's neighborhood must be
        # probed directly; arc samples can straddle them
        for p in getattr(plane, "singular_points", ()):
            if min(_dist_to_curve(p, c) for c in curves_) <= deltas[0]:
                centers.append((float(p[0]), float(p[1])))
        r_hi = min(deltas[0], 0.25)
        ladder = wp.geometric_ladder(r_hi * 10 ** -3.6, r_hi, 10)
        fit = wp.ahlfors_fit(plane, wp.SampleConfig(tuple(centers), ladder),
                             frame_ratio_tol=ahlfors_tol)
        applicable = fit.regular_2
    except InvalidArgument:
        applicable = False

    ratios = []
    for d in deltas:
        h1 = h1_cover_estimate(curves_, d).value
        hh = hh_cover_estimate(curves_, plane, d).value
        if h1 > 0:
            ratios.append(hh / h1)
    if not ratios:
        raise InvalidArgument("no usable deltas in the ladder")
    lo, hi = min(ratios), max(ratios)
    passes = applicable and (1.0 / constant <= lo) and (hi <= constant)
    return ComparabilityReport(lo, hi, passes, applicable, tuple(ratios), constant)
