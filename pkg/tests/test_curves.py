import numpy as np
import pytest

from planebv import DegenerateCurve, InvalidArgument, PolylineCurve, UndefinedAtVertex
from planebv.curves import (arclength_reparam, circle, is_simple, length,
                            metric_speed, partition_sum, refine, segment)


def test_l_shape_length():
    c = PolylineCurve(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    assert length(c) == pytest.approx(2.0)


def test_single_point_length_zero():
    assert length(PolylineCurve(np.array([[0.3, 0.7]]))) == 0.0


@pytest.mark.parametrize("n", [8, 64, 512])
def test_inscribed_ngon_length(n):
    # inscribed polygon formula, increasing to the circumference
    c = circle(1.0, n)
    assert length(c) == pytest.approx(2 * n * np.sin(np.pi / n), rel=1e-12)
    assert length(c) < 2 * np.pi


def test_length_invariances():
    c = PolylineCurve(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 2.0], [3.0, 2.0]]))
    assert length(c.reversed()) == pytest.approx(length(c))
    assert length(refine(c, 3)) == pytest.approx(length(c))


def test_partition_sums_monotone_under_refinement():
    rng = np.random.RandomState(3)
    c = circle(1.0, 64)
    ts = np.sort(rng.uniform(0, 1, 6))
    coarse = partition_sum(c, ts)
    finer = partition_sum(c, np.sort(np.concatenate([ts, rng.uniform(0, 1, 6)])))
    assert finer >= coarse - 1e-12
    assert finer <= length(c) + 1e-12


def test_reparam_unit_segment():
    out = arclength_reparam(segment((0.0, 0.0), (1.0, 0.0)), 3)
    assert np.allclose(out.points[:, 0], [0.0, 0.5, 1.0])


def test_reparam_circle_quarters():
    out = arclength_reparam(circle(1.0, 4096), 4)
    pts = out.points[:-1]
    assert len(pts) == 4
    d = np.hypot(*np.diff(out.points, axis=0).T)
    assert np.allclose(d, d[0], rtol=1e-6)


def test_reparam_l_shape_positions():
    c = PolylineCurve(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    out = arclength_reparam(c, 5)
    assert np.allclose(out.params, [0.0, 0.5, 1.0, 1.5, 2.0])


def test_reparam_preserves_length():
    c = circle(1.0, 256)
    for n in (64, 256, 1024):
        out = arclength_reparam(c, n)
        assert length(out) == pytest.approx(length(c), rel=4.0 / n)


def test_reparam_rejects_degenerate():
    with pytest.raises(DegenerateCurve):
        arclength_reparam(PolylineCurve(np.array([[1.0, 1.0], [1.0, 1.0]])), 4)
    with pytest.raises(InvalidArgument):
        arclength_reparam(segment((0, 0), (1, 0)), 1)


def test_metric_speed_unit_segment():
    c = segment((0.0, 0.0), (1.0, 0.0))
    assert metric_speed(c, 0.37) == pytest.approx(1.0)


def test_metric_speed_half_time_traversal():
    # unit segment traversed during [0, 1/2], then stationary
    c = PolylineCurve(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0 + 1e-15]]),
                      params=np.array([0.0, 0.5, 1.0]))
    assert metric_speed(c, 0.25) == pytest.approx(2.0)


def test_metric_speed_after_reparam_is_one():
    # smooth curve: chord/arc -> 1, so unit speed within tolerance
    out = arclength_reparam(circle(1.0, 4096), 64)
    L = length(out)
    for t in np.linspace(0.13, 0.87, 7) * L:
        assert metric_speed(out, t) == pytest.approx(1.0, rel=5e-3)
    # straight segment: exactly unit speed away from sample knots
    seg = arclength_reparam(segment((0.0, 0.0), (3.0, 0.0)), 16)
    assert metric_speed(seg, 1.7) == pytest.approx(1.0, rel=1e-12)


def test_metric_speed_vertex_rejected():
    c = PolylineCurve(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    with pytest.raises(UndefinedAtVertex):
        metric_speed(c, 0.5)


def test_simplicity():
    assert is_simple(circle(1.0, 128))
    fig8 = PolylineCurve(np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]),
                         closed=True)
    assert not is_simple(fig8)
    near_touch = PolylineCurve(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 1e-14]]))
    assert not is_simple(near_touch)


def test_closed_curve_invariant():
    with pytest.raises(InvalidArgument):
        PolylineCurve(np.array([[0.0, 0.0], [1.0, 0.0]]), closed=True)
