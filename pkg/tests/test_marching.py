import numpy as np
import pytest

from planebv import GridField, Rect
from planebv.curves import length
from planebv.marching import (contour_cells, contour_length, contour_polylines,
                              contour_segments)

WIN = Rect(-1.0, -1.0, 1.0, 1.0)


def dist_field(n=256):
    return GridField.from_function(np.hypot, WIN, n)


def test_circle_contour_length():
    f = dist_field(256)
    L = contour_length(f.values, f.origin, f.spacing, 0.5)
    assert L == pytest.approx(np.pi, rel=5e-4)


def test_contour_polyline_closed_and_oriented():
    f = GridField.from_function(lambda x, y: 0.5 - np.hypot(x, y), WIN, 128)
    polys = contour_polylines(f.values, f.origin, f.spacing, 0.0)
    assert len(polys) == 1
    poly = polys[0].polyline
    assert poly.closed
    # superlevel region (the disk) on the left -> counterclockwise
    pts = poly.points
    area2 = np.sum(pts[:-1, 0] * pts[1:, 1] - pts[1:, 0] * pts[:-1, 1])
    assert area2 > 0
    assert length(poly) == pytest.approx(np.pi, rel=2e-3)


def test_open_contour_reaches_boundary():
    f = GridField.from_function(lambda x, y: x, WIN, 64)
    polys = contour_polylines(f.values, f.origin, f.spacing, 0.1)
    assert len(polys) == 1
    poly = polys[0].polyline
    assert not poly.closed
    ys = poly.points[:, 1]
    assert ys.max() - ys.min() == pytest.approx(2 - f.spacing, rel=1e-9)


def test_level_clipping():
    f = dist_field(128)
    clip = Rect(0.0, -1.0, 1.0, 1.0)
    L = contour_length(f.values, f.origin, f.spacing, 0.5, clip=clip)
    assert L == pytest.approx(np.pi / 2, rel=5e-3)


def test_weighted_contour_length():
    f = dist_field(256)
    L = contour_length(f.values, f.origin, f.spacing, 0.5,
                       weight=lambda x, y: np.hypot(x, y))
    assert L == pytest.approx(np.pi / 2, rel=1e-3)


def test_saddle_decider_consistency():
    # checkerboard cell: corners (+,-,+,-) with a positive/negative center
    for bias, expected_segments in ((0.8, 2), (-0.8, 2)):
        v = np.array([[1.0, -1.0], [-1.0, 1.0]])
        vals = np.zeros((3, 3))
        vals[0:2, 0:2] = v
        # direct 2x2 saddle cell
        segs = contour_segments(v, (0.0, 0.0), 1.0, 0.0)
        assert len(segs[0]) == expected_segments


def test_saddle_decider_changes_topology():
    # bilinear saddle value sign decides which corners connect
    high = np.array([[1.0, -0.2], [-0.2, 1.0]])    # center value positive
    low = np.array([[0.2, -1.0], [-1.0, 0.2]])     # center value negative
    ph = contour_polylines(high, (0.0, 0.0), 1.0, 0.0)
    pl = contour_polylines(low, (0.0, 0.0), 1.0, 0.0)
    # both give two chains, but the paired edges differ
    def endpoints(polys):
        return sorted(tuple(np.round(p.polyline.points[[0, -1]].ravel(), 6))
                      for p in polys)
    assert endpoints(ph) != endpoints(pl)


def test_contour_cells_mask():
    f = dist_field(64)
    cells = contour_cells(f.values, 0.5)
    assert cells.any()
    # cells concentrate near the circle of radius 1/2
    ii, jj = np.nonzero(cells)
    h = f.spacing
    xs = f.origin[0] + (jj + 0.5) * h
    ys = f.origin[1] + (ii + 0.5) * h
    assert np.all(np.abs(np.hypot(xs, ys) - 0.5) < 3 * h)


def test_determinism():
    f = dist_field(128)
    a = contour_segments(f.values, f.origin, f.spacing, 0.5)
    b = contour_segments(f.values, f.origin, f.spacing, 0.5)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_segment_midpoints_on_level():
    f = dist_field(256)
    p0, p1 = contour_segments(f.values, f.origin, f.spacing, 0.5)
    mids = 0.5 * (p0 + p1)
    assert np.max(np.abs(np.hypot(mids[:, 0], mids[:, 1]) - 0.5)) < 2 * f.spacing
