import numpy as np
import pytest

from planebv import GridField, IndicatorSet, InvalidArgument, Rect, WeightedPlane
from planebv import fields
from planebv.bv_scalar import (coarea_check, crossing_defect, discrete_lip,
                               levelset_length_budget, perimeter,
                               submodularity_check, total_variation)

WIN = Rect(-2.0, -2.0, 2.0, 2.0)
UNIFORM = WeightedPlane.uniform(1.0, WIN)
SQUARE = Rect(0.0, 0.0, 1.0, 1.0)


def test_lip_linear_field():
    f = GridField.from_function(lambda x, y: x, SQUARE, 64)
    lip = discrete_lip(f).values
    assert np.allclose(lip, 1.0, atol=1e-12)


def test_lip_constant_field():
    f = GridField.from_function(lambda x, y: 0 * x + 3.7, SQUARE, 32)
    assert np.all(discrete_lip(f).values == 0.0)


def test_lip_quadratic_truncation():
    n = 128
    f = GridField.from_function(lambda x, y: x ** 2, SQUARE, n)
    lip = discrete_lip(f).values
    xx, _ = f.node_coords()
    interior = lip[2:-2, 2:-2]
    target = 2 * xx[2:-2, 2:-2]
    assert np.max(np.abs(interior - target)) <= 2.5 * f.spacing


def test_tv_ramp():
    f = GridField.from_function(lambda x, y: x, SQUARE, 128)
    rep = total_variation(f, UNIFORM)
    assert rep.value == pytest.approx(1.0, rel=1e-9)


def test_tv_linear_in_measure():
    f = GridField.from_function(lambda x, y: x, SQUARE, 128)
    rep = total_variation(f, WeightedPlane.uniform(2.0, WIN))
    assert rep.value == pytest.approx(2.0, rel=1e-9)


def test_tv_cone():
    f = fields.cone_field(256)
    rep = total_variation(f, UNIFORM)
    assert rep.value == pytest.approx(4.0, rel=0.05)


def test_tv_homogeneous_and_triangle():
    rng = np.random.RandomState(5)
    vals = rng.rand(40, 40)
    smooth = fields.mollified_disk_field(64).values[:40, :40]
    f = GridField(vals, (0.0, 0.0), 0.01)
    g = GridField(smooth, (0.0, 0.0), 0.01)
    plane = WeightedPlane.uniform(1.0, Rect(-1, -1, 2, 2))
    tv = lambda fld: total_variation(fld, plane).value
    assert tv(GridField(3 * vals, f.origin, f.spacing)) == pytest.approx(3 * tv(f), rel=1e-9)
    assert tv(GridField(vals + smooth, f.origin, f.spacing)) <= tv(f) + tv(g) + 1e-9


def test_tv_lipschitz_postcomposition():
    f = fields.cone_field(128)
    phi = lambda t: np.clip(0.5 * t, 0.0, 0.4)   # 0.5-Lipschitz
    g = GridField(phi(f.values), f.origin, f.spacing)
    assert total_variation(g, UNIFORM).value <= 0.5 * total_variation(f, UNIFORM).value + 1e-9


def test_tv_singular_node_excluded():
    plane = WeightedPlane.radial_power(-1.5, WIN)
    # odd node count puts a lattice node exactly at the origin
    xs = np.linspace(-0.5, 0.5, 65)
    xx, yy = np.meshgrid(xs, xs)
    f = GridField(xx + yy, (xs[0], xs[0]), xs[1] - xs[0])
    rep = total_variation(f, plane)
    assert rep.excluded_nodes == 1
    assert np.isfinite(rep.value)


def test_perimeter_disk():
    mask = fields.disk_mask(256)
    rep = perimeter(mask, UNIFORM)
    assert rep.value == pytest.approx(np.pi, rel=0.02)


def test_perimeter_square():
    mask = fields.square_mask(256)
    rep = perimeter(mask, UNIFORM)
    assert rep.value == pytest.approx(4.0, rel=0.02)


def test_perimeter_disk_radial_weight():
    mask = fields.disk_mask(256)
    rep = perimeter(mask, WeightedPlane.radial_power(1.0, WIN))
    assert rep.value == pytest.approx(np.pi / 2, rel=0.02)


def test_perimeter_degenerate_masks():
    full = IndicatorSet(np.ones((8, 8), bool), (0.0, 0.0), 0.1)
    empty = IndicatorSet(np.zeros((8, 8), bool), (0.0, 0.0), 0.1)
    for m in (full, empty):
        rep = perimeter(m, UNIFORM)
        assert rep.value == 0.0 and rep.degenerate


def test_perimeter_subwindow():
    mask = fields.disk_mask(256)
    rep = perimeter(mask, UNIFORM, subwindow=Rect(0.0, -1.0, 1.0, 1.0))
    assert rep.value == pytest.approx(np.pi / 2, rel=0.03)


def test_coarea_ramp():
    f = fields.ramp_field(256)
    lhs, rhs = coarea_check(f, UNIFORM)
    assert lhs == pytest.approx(1.0, rel=1e-6)
    assert rhs == pytest.approx(lhs, rel=0.05)


def test_coarea_cone():
    f = fields.cone_field(256)
    lhs, rhs = coarea_check(f, UNIFORM)
    # level-set oracle: total integral of contour lengths equals 4
    assert lhs == pytest.approx(4.0, rel=0.05)
    assert rhs == pytest.approx(lhs, rel=0.05)


def test_coarea_constant_field():
    f = GridField(np.full((16, 16), 2.5), (0.0, 0.0), 0.1)
    assert coarea_check(f, UNIFORM) == (0.0, 0.0)


def test_cone_level_lengths_match_formula():
    # independent oracle for the level-set lengths of the cone on the
    # square; the lattice represents the square of half-width 1 - h/2
    from planebv.bv_scalar import level_perimeter
    f = fields.cone_field(512)
    a = 1.0 - f.spacing / 2
    for r in (0.3, 0.7, 1.1, 1.3):
        if r <= a:
            expect = 2 * np.pi * r
        else:
            expect = 2 * np.pi * r - 8 * r * np.arccos(a / r)
        got = level_perimeter(f, UNIFORM, r)
        assert got == pytest.approx(expect, rel=5e-3)


def _edge_count_oracle(maskE, w=1.0, h=1.0):
    # brute-force edge counting, loop-based, independent of the module
    total = 0.0
    ny, nx = maskE.shape
    for i in range(ny):
        for j in range(nx):
            if j + 1 < nx and maskE[i, j] != maskE[i, j + 1]:
                total += w * h
            if i + 1 < ny and maskE[i, j] != maskE[i + 1, j]:
                total += w * h
    return total


PLANE1 = WeightedPlane.uniform(1.0, Rect(-1.0, -1.0, 64.0, 64.0))


def _ind(mask):
    return IndicatorSet(mask, (0.0, 0.0), 1.0)


def test_submodularity_matches_oracle():
    rng = np.random.RandomState(11)
    E = rng.rand(16, 16) > 0.5
    F = rng.rand(16, 16) > 0.5
    lhs, rhs = submodularity_check(_ind(E), _ind(F), PLANE1)
    assert lhs == _edge_count_oracle(E & F) + _edge_count_oracle(E | F)
    assert rhs == _edge_count_oracle(E) + _edge_count_oracle(F)


def test_submodularity_exact_for_overlapping_rectangles():
    def rect(n, x0, x1, y0, y1):
        m = np.zeros((n, n), bool)
        m[y0:y1, x0:x1] = True
        return m
    E = rect(32, 2, 20, 3, 25)
    F = rect(32, 10, 30, 10, 30)
    lhs, rhs = submodularity_check(_ind(E), _ind(F), PLANE1)
    assert lhs == rhs


def test_submodularity_nested_exact():
    E = np.zeros((32, 32), bool)
    E[8:20, 8:20] = True
    F = E.copy()
    F[5:28, 5:28] = True
    lhs, rhs = submodularity_check(_ind(E), _ind(F), PLANE1)
    assert lhs == rhs


def test_submodularity_defect_identity_random():
    # interleaving boundaries break equality by exactly twice the
    # crossing mass, for any masks
    rng = np.random.RandomState(23)
    for _ in range(50):
        E = rng.rand(32, 32) > 0.5
        F = rng.rand(32, 32) > 0.5
        lhs, rhs = submodularity_check(_ind(E), _ind(F), PLANE1)
        defect = crossing_defect(_ind(E), _ind(F), PLANE1)
        assert lhs + 2 * defect == rhs
        assert lhs <= rhs


def test_submodularity_lattice_mismatch():
    E = _ind(np.zeros((8, 8), bool))
    F = IndicatorSet(np.zeros((8, 8), bool), (0.5, 0.0), 1.0)
    with pytest.raises(InvalidArgument):
        submodularity_check(E, F, PLANE1)


def test_levelset_budget_ramp():
    f = fields.ramp_field(128)
    lhs, rhs = levelset_length_budget(f, UNIFORM)
    assert lhs == pytest.approx(1.0, rel=0.05)
    assert rhs == pytest.approx(1.0, rel=0.05)
    assert lhs / rhs == pytest.approx(1.0, rel=0.05)


def test_levelset_budget_cone_bounded():
    f = fields.cone_field(256)
    lhs, rhs = levelset_length_budget(f, UNIFORM)
    assert lhs / rhs <= 1.1


def test_levelset_budget_scale_invariant_ratio():
    f1 = fields.ramp_field(128)
    f2 = GridField(2 * f1.values, f1.origin, f1.spacing)
    l1, r1 = levelset_length_budget(f1, UNIFORM)
    l2, r2 = levelset_length_budget(f2, UNIFORM)
    assert l2 == pytest.approx(2 * l1, rel=0.02)
    assert r2 == pytest.approx(2 * r1, rel=1e-9)
    assert l2 / r2 == pytest.approx(l1 / r1, rel=0.02)


def test_field_window_must_fit_plane():
    small = WeightedPlane.uniform(1.0, Rect(0.0, 0.0, 0.5, 0.5))
    f = fields.ramp_field(32)
    with pytest.raises(InvalidArgument):
        total_variation(f, small)
