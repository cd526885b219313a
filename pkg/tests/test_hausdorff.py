import numpy as np
import pytest

from planebv import ClippedBall, InvalidArgument, Rect, WeightedPlane
from planebv.curves import circle, segment
from planebv.hausdorff import (ball_h, comparability_check, cover_contains_curve,
                               h1_cover_estimate, hh_cover_estimate)

WIN = Rect(-2.0, -2.0, 2.0, 2.0)
UNIFORM = WeightedPlane.uniform(1.0, WIN)


def brute_force_cover_oracle(L, delta, h_per_ball):
    # N balls marched along arc length, each contributing h(B_{delta/2})
    n = int(np.ceil(L / delta))
    return n * h_per_ball


def test_h1_segment():
    seg = segment((0.0, 0.0), (1.0, 0.0))
    for delta in (0.2, 0.05, 0.01):
        est = h1_cover_estimate(seg, delta)
        assert est.value == pytest.approx(np.ceil(1.0 / delta) * delta, rel=1e-12)
    assert h1_cover_estimate(seg, 0.01).value == pytest.approx(1.0, rel=0.05)


def test_h1_circle():
    c = circle(1.0, 4096)
    est = h1_cover_estimate(c, 0.01)
    assert est.value == pytest.approx(2 * np.pi, rel=0.05)


def test_h1_two_disjoint_segments():
    parts = [segment((0.0, 0.0), (1.0, 0.0)), segment((0.0, 1.0), (1.0, 1.0))]
    est = h1_cover_estimate(parts, 0.01)
    assert est.value == pytest.approx(2.0, rel=0.05)


def test_cover_structure():
    c = circle(0.5, 512)
    est = h1_cover_estimate(c, 0.05)
    assert all(r < est.delta for _, r in est.cover)
    assert est.normalization == pytest.approx(1.0)
    assert cover_contains_curve(est.cover, c)


def test_hh_segment_uniform():
    # oracle: h(B_r) = pi r^2 / r = pi r per ball
    seg = segment((-0.5, 0.0), (0.5, 0.0))
    delta = 0.01
    est = hh_cover_estimate(seg, UNIFORM, delta)
    oracle = brute_force_cover_oracle(1.0, delta, np.pi * delta / 2)
    assert est.value == pytest.approx(oracle, rel=1e-6)
    assert est.value == pytest.approx(np.pi / 2, rel=0.05)


def test_hh_circle_uniform():
    c = circle(1.0, 4096)
    delta = 0.02
    est = hh_cover_estimate(c, UNIFORM, delta)
    oracle = brute_force_cover_oracle(2 * np.pi * np.sinc(1 / 4096) ** 0, delta, np.pi * delta / 2)
    assert est.value == pytest.approx((np.pi / 2) * 2 * np.pi, rel=0.05)


def test_hh_linear_in_density_scale():
    seg = segment((-0.5, 0.1), (0.5, 0.1))
    a = hh_cover_estimate(seg, UNIFORM, 0.05).value
    b = hh_cover_estimate(seg, WeightedPlane.uniform(3.0, WIN), 0.05).value
    assert b == pytest.approx(3 * a, rel=1e-9)


def test_hh_clipped_ball_error():
    seg = segment((1.9, 0.0), (2.1, 0.0))
    with pytest.raises(ClippedBall):
        hh_cover_estimate(seg, UNIFORM, 0.2)


def test_ball_h_value():
    assert ball_h(UNIFORM, (0.3, 0.2), 0.1) == pytest.approx(np.pi * 0.1, rel=1e-6)


LADDER = (0.2, 0.1, 0.05, 0.02)


def test_comparability_segment_uniform():
    rep = comparability_check(segment((-0.5, 0.0), (0.5, 0.0)), UNIFORM, LADDER)
    assert rep.applicable and rep.passes
    assert rep.ratio_min == pytest.approx(np.pi / 2, rel=1e-6)
    assert rep.ratio_max == pytest.approx(np.pi / 2, rel=1e-6)


def test_comparability_circle_bounded_weight():
    plane = WeightedPlane.tabulated_from_function(
        lambda x, y: 1.25 + 0.7 * np.sin(2 * x + y), WIN, 256)
    rep = comparability_check(circle(0.5, 1024), plane, LADDER)
    assert rep.applicable
    assert rep.ratio_min >= np.pi / 4 / 1.05
    assert rep.ratio_max <= np.pi * 1.05


def test_comparability_singular_weight_not_applicable():
    plane = WeightedPlane.radial_power(-1.5, WIN)
    rep = comparability_check(segment((-0.5, 0.0), (0.5, 0.0)), plane, LADDER)
    assert not rep.applicable
    assert not rep.passes
    assert len(rep.ratios) == len(LADDER)   # still computed


def test_empty_ladder_rejected():
    with pytest.raises(InvalidArgument):
        comparability_check(segment((0, 0), (1, 0)), UNIFORM, ())
