import numpy as np
import pytest
from scipy.integrate import quad

from planebv import InvalidArgument, Rect, WeightedPlane
from planebv.homeo_lab import (Domain, builtin_homeo, fit_growth,
                               perimeter_vs_sliceimage, two_sided_check,
                               variation_pair)
from planebv.reports import BOUNDED, LOGARITHMIC, POWER

WIN = Rect(-2.0, -2.0, 2.0, 2.0)
UNIT = WeightedPlane.uniform(1.0, WIN)


# -- built-in families and their Jacobians ---------------------------

def test_power_jacobian_entry_at_half():
    # d f_1 / d x_1 = 2 r cos^2(th) + r sin^2(th); r=1/2, th=0 -> 1
    spec = builtin_homeo("radial_power", {"exponent": 2.0})
    a, b, c, d = spec.jacobian_at(np.array([0.5]), np.array([0.0]))
    assert a[0] == pytest.approx(1.0, rel=1e-12)


def test_power_inverse_jacobian_entry_theta_zero():
    # d (f^{-1})_2 / d x_1 = -(1 / (2 sqrt(r))) sin(th) cos(th); zero at th=0
    spec = builtin_homeo("radial_power", {"exponent": 2.0}).inverted()
    _, _, c, _ = spec.jacobian_at(np.array([0.5]), np.array([0.0]))
    assert c[0] == pytest.approx(0.0, abs=1e-14)


def test_power_jacobian_entries_polar_form():
    spec = builtin_homeo("radial_power", {"exponent": 2.0})
    rng = np.random.RandomState(4)
    r = rng.uniform(0.2, 0.9, 16)
    th = rng.uniform(0, 2 * np.pi, 16)
    x, y = r * np.cos(th), r * np.sin(th)
    a, _, _, _ = spec.jacobian_at(x, y)
    assert np.allclose(a, 2 * r * np.cos(th) ** 2 + r * np.sin(th) ** 2, rtol=1e-12)
    inv = spec.inverted()
    _, _, ci, _ = inv.jacobian_at(x, y)
    assert np.allclose(ci, -np.sin(th) * np.cos(th) / (2 * np.sqrt(r)), rtol=1e-10, atol=1e-12)


def test_twist_jacobian_entries_polar_form():
    spec = builtin_homeo("radial_twist", {"amplitude": 1.0})
    rng = np.random.RandomState(9)
    r = rng.uniform(0.2, 0.9, 16)
    th = rng.uniform(0, 2 * np.pi, 16)
    x, y = r * np.cos(th), r * np.sin(th)
    a, _, _, _ = spec.jacobian_at(x, y)
    expect = (np.cos(th) * np.cos(th + 1 / r ** 2) + np.sin(th) * np.sin(th + 1 / r ** 2)
              + (2 / r ** 2) * np.cos(th) * np.sin(th + 1 / r ** 2))
    assert np.allclose(a, expect, rtol=1e-10)
    inv = spec.inverted()
    ai, _, _, _ = inv.jacobian_at(x, y)
    expect_i = (np.cos(th) * np.cos(th - 1 / r ** 2) + np.sin(th) * np.sin(th - 1 / r ** 2)
                - (2 / r ** 2) * np.cos(th) * np.sin(th - 1 / r ** 2))
    assert np.allclose(ai, expect_i, rtol=1e-10)


def test_identity_jacobian():
    spec = builtin_homeo("identity")
    a, b, c, d = spec.jacobian_at(np.array([0.3]), np.array([0.4]))
    assert (a[0], b[0], c[0], d[0]) == (1.0, 0.0, 0.0, 1.0)


@pytest.mark.parametrize("family,params", [
    ("identity", {}),
    ("linear", {"shear": 1.5}),
    ("linear", {"matrix": [[1.1, 0.3], [-0.2, 0.8]]}),
    ("radial_power", {"exponent": 2.0}),
    ("radial_power", {"exponent": 1.5}),
    ("radial_twist", {"amplitude": 1.0}),
])
def test_round_trip_and_fd_jacobians(family, params):
    spec = builtin_homeo(family, params)
    rng = np.random.RandomState(17)
    # sample inside the domain, away from the origin singularity
    r = rng.uniform(0.15, 0.85, 1000)
    th = rng.uniform(0, 2 * np.pi, 1000)
    if spec.domain.kind == "disk":
        x, y = r * np.cos(th), r * np.sin(th)
    else:
        x = rng.uniform(0.05, 0.95, 1000)
        y = rng.uniform(0.05, 0.95, 1000)
    u, v = spec.forward(x, y)
    xb, yb = spec.inverse(u, v)
    scale = np.max(np.abs(np.stack([x, y])))
    assert np.max(np.hypot(xb - x, yb - y)) < 1e-11 * max(scale, 1.0)
    # analytic Jacobian vs central differences
    eps = 1e-6
    a, b, c, d = spec.jacobian_at(x, y)
    u1, v1 = spec.forward(x + eps, y)
    u0, v0 = spec.forward(x - eps, y)
    assert np.allclose((u1 - u0) / (2 * eps), a, atol=5e-5, rtol=5e-5)
    assert np.allclose((v1 - v0) / (2 * eps), c, atol=5e-5, rtol=5e-5)
    u3, v3 = spec.forward(x, y + eps)
    u2, v2 = spec.forward(x, y - eps)
    assert np.allclose((u3 - u2) / (2 * eps), b, atol=5e-5, rtol=5e-5)
    assert np.allclose((v3 - v2) / (2 * eps), d, atol=5e-5, rtol=5e-5)


def test_unknown_family_rejected():
    with pytest.raises(InvalidArgument):
        builtin_homeo("moebius")


# -- growth classification -------------------------------------------

EPS = (1e-1, 1e-2, 1e-3, 1e-4)


def test_fit_growth_bounded():
    v = [4.0 - e ** 3 for e in EPS]
    fit = fit_growth(EPS, v)
    assert fit["class"] == BOUNDED
    assert fit["limit"] == pytest.approx(4.0, rel=1e-3)


def test_fit_growth_logarithmic():
    v = [3.0 + 2 * np.pi * np.log(1 / e) for e in EPS]
    fit = fit_growth(EPS, v)
    assert fit["class"] == LOGARITHMIC
    assert fit["slope"] == pytest.approx(2 * np.pi, rel=1e-9)
    assert fit["r2"] > 0.999


def test_fit_growth_power():
    v = [1.0 + 2.0 * e ** -0.25 for e in EPS]
    fit = fit_growth(EPS, v)
    assert fit["class"] == POWER
    assert fit["alpha"] == pytest.approx(0.25, rel=0.2)


# -- variation pairs on the counterexample families -------------------

SRC = WeightedPlane.uniform(1.0, WIN)


def test_variation_pair_power_forward_bounded():
    spec = builtin_homeo("radial_power", {"exponent": 2.0})
    tgt = WeightedPlane.radial_power(-1.5, WIN)
    fwd, _ = variation_pair(spec, SRC, tgt)
    assert fwd.growth_class == BOUNDED
    assert fwd.value == pytest.approx(4 * np.pi / 3, rel=0.02)


def test_variation_pair_power_inverse_log_slope():
    spec = builtin_homeo("radial_power", {"exponent": 2.0})
    tgt = WeightedPlane.radial_power(-1.5, WIN)
    _, inv = variation_pair(spec, SRC, tgt)
    assert inv.growth_class == LOGARITHMIC
    assert inv.growth_slope == pytest.approx(2 * np.pi, rel=0.05)
    assert inv.fit_quality > 0.99
    assert np.isinf(inv.value)
    vals = inv.per_epsilon_values
    assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))


def test_variation_pair_twist_asymmetry():
    spec = builtin_homeo("radial_twist", {"amplitude": 1.0})
    tgt = WeightedPlane.radial_power(1.0, WIN)
    fwd, inv = variation_pair(spec, SRC, tgt)
    assert fwd.growth_class == LOGARITHMIC
    # sigma_max(r) = sqrt(1 + 1/r^4) + 1/r^2: slope oracle by quadrature
    def annulus(eps):
        return quad(lambda r: 2 * np.pi * (np.sqrt(1 + r ** -4) + r ** -2) * r,
                    eps, 1, limit=200)[0]
    slope_oracle = (annulus(1e-4) - annulus(1e-3)) / np.log(10)
    assert fwd.growth_slope == pytest.approx(slope_oracle, rel=0.02)
    assert fwd.growth_slope == pytest.approx(4 * np.pi, rel=0.02)
    assert inv.growth_class == BOUNDED
    limit_oracle = 2 * np.pi * (quad(lambda r: np.sqrt(r ** 4 + 1), 0, 1)[0] + 1)
    assert inv.value == pytest.approx(limit_oracle, rel=0.01)


def test_variation_pair_power_divergence_class():
    # inverse of r^4 against |x|^{-3/2}: density r^{-5/4}, a power law
    spec = builtin_homeo("radial_power", {"exponent": 4.0})
    tgt = WeightedPlane.radial_power(-1.5, WIN)
    _, inv = variation_pair(spec, SRC, tgt)
    assert inv.growth_class == POWER
    assert inv.growth_exponent == pytest.approx(0.25, rel=0.25)


def test_variation_pair_resolution_stable_classes():
    spec = builtin_homeo("radial_twist", {"amplitude": 1.0})
    tgt = WeightedPlane.radial_power(1.0, WIN)
    classes = []
    for panels in (48, 96):
        fwd, inv = variation_pair(spec, SRC, tgt, resolution=panels)
        classes.append((fwd.growth_class, inv.growth_class))
    assert classes[0] == classes[1]


def test_variation_pair_bad_schedule():
    spec = builtin_homeo("identity")
    with pytest.raises(InvalidArgument):
        variation_pair(spec, SRC, SRC, eps_schedule=(1e-2, 1e-1))


# -- two-sided bound ---------------------------------------------------

def test_two_sided_identity_constant_weight():
    spec = builtin_homeo("identity")
    for c in (0.5, 2.0):
        rep = two_sided_check(spec, UNIT, WeightedPlane.uniform(c, WIN),
                              resolutions=(64, 128))
        assert rep.applicable and rep.cauchy_ok
        assert rep.ratio == pytest.approx(c, rel=0.02)


def test_two_sided_swap_reciprocal():
    spec = builtin_homeo("linear", {"shear": 1.0})
    w = WeightedPlane.uniform(1.3, Rect(-4, -4, 4, 4))
    u = WeightedPlane.uniform(1.0, Rect(-4, -4, 4, 4))
    fwd = two_sided_check(spec, u, w, resolutions=(64, 128))
    bwd = two_sided_check(spec.inverted(), w, u, resolutions=(64, 128))
    assert fwd.ratio == pytest.approx(1.0 / bwd.ratio, rel=0.02)


def test_two_sided_divergent_not_applicable():
    spec = builtin_homeo("radial_power", {"exponent": 2.0})
    tgt = WeightedPlane.radial_power(-1.5, WIN)
    rep = two_sided_check(spec, UNIT, tgt, resolutions=(64, 128))
    assert not rep.applicable


# -- perimeter vs slice image ------------------------------------------

def test_sliceimage_identity():
    spec = builtin_homeo("identity", {"window": Rect(-1.0, -1.0, 1.0, 1.0)})
    w = WeightedPlane.uniform(1.0, Rect(-1.5, -1.5, 1.5, 1.5))
    rep = perimeter_vs_sliceimage(spec, w, 0.0)
    assert rep.perimeter_value == pytest.approx(2.0, rel=0.02)
    assert rep.h1_value == pytest.approx(2.0, rel=0.02)
    assert rep.ok


def test_sliceimage_linear_stretch():
    spec = builtin_homeo("linear", {"diag": [2.0, 1.0], "window": Rect(-1.0, -1.0, 1.0, 1.0)})
    w = WeightedPlane.uniform(1.0, Rect(-3.0, -3.0, 3.0, 3.0))
    rep = perimeter_vs_sliceimage(spec, w, 0.0)
    # image of the slice {x=0} is the vertical segment of length 2
    assert rep.h1_value == pytest.approx(2.0, rel=0.02)
    assert rep.perimeter_value == pytest.approx(2.0, rel=0.02)
    assert rep.ok


def test_sliceimage_radial_power():
    spec = builtin_homeo("radial_power", {"exponent": 2.0})
    w = WeightedPlane.uniform(1.0, Rect(-1.5, -1.5, 1.5, 1.5))
    rep = perimeter_vs_sliceimage(spec, w, 0.3)
    assert rep.ok
    assert rep.ratio <= rep.constant
    # the slice image is the relative boundary, so the two lengths agree
    assert rep.perimeter_value == pytest.approx(rep.h1_value, rel=0.05)
