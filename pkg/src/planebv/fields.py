"""Built-in fields, masks and regions used by the CLI and test suites."""

from __future__ import annotations

import numpy as np

from . import curves
from .bv_scalar import GridField, IndicatorSet
from .errors import InvalidArgument
from .geometry import Rect

UNIT_SQUARE = Rect(0.0, 0.0, 1.0, 1.0)
CENTERED_SQUARE = Rect(-1.0, -1.0, 1.0, 1.0)


def ramp_field(n=256, window=UNIT_SQUARE):
    """f(x, y) = x."""
    return GridField.from_function(lambda x, y: x, window, n)


def cone_field(n=256, window=CENTERED_SQUARE):
    """f(x, y) = |x|: unit-slope distance cone."""
    return GridField.from_function(np.hypot, window, n)


def disk_mask(n=256, radius=0.5, window=CENTERED_SQUARE, center=(0.0, 0.0)):
    return IndicatorSet.from_function(
        lambda x, y: np.hypot(x - center[0], y - center[1]) < radius, window, n)


def square_mask(n=256, half_side=0.5, window=CENTERED_SQUARE):
    return IndicatorSet.from_function(
        lambda x, y: (np.abs(x) < half_side) & (np.abs(y) < half_side), window, n)


def ellipse_mask(n=256, a=0.5, b=0.25, window=CENTERED_SQUARE):
    return IndicatorSet.from_function(
        lambda x, y: (x / a) ** 2 + (y / b) ** 2 < 1.0, window, n)


def annulus_mask(n=256, r_outer=0.8, r_inner=0.4, window=CENTERED_SQUARE):
    return IndicatorSet.from_function(
        lambda x, y: (np.hypot(x, y) < r_outer) & (np.hypot(x, y) > r_inner),
        window, n)


def two_square_mask(n=256, half_side=0.3, gap=0.35, window=CENTERED_SQUARE):
    def pred(x, y):
        left = (np.abs(x + gap) < half_side) & (np.abs(y) < half_side)
        right = (np.abs(x - gap) < half_side) & (np.abs(y) < half_side)
        return left | right
    return IndicatorSet.from_function(pred, window, n)


def mollified_disk_field(n=256, radius=0.5, moll=0.15, window=CENTERED_SQUARE):
    """Disk indicator averaged over a disk of fixed physical radius
    (a resolution-independent Lipschitz field for coarea tests)."""
    from scipy.signal import fftconvolve

    mask = disk_mask(n, radius, window)
    h = mask.spacing
    rad = max(2, int(np.floor(moll / h)))
    yy, xx = np.mgrid[-rad:rad + 1, -rad:rad + 1]
    kernel = ((xx * h) ** 2 + (yy * h) ** 2 <= moll * moll).astype(float)
    u = fftconvolve(mask.mask.astype(float), kernel, mode="same") / kernel.sum()
    return GridField(np.clip(u, 0.0, 1.0), mask.origin, h)


FIELD_BUILDERS = {
    "ramp": ramp_field,
    "cone": cone_field,
    "mollified-disk": mollified_disk_field,
}


def build_field(name, n=256):
    if name not in FIELD_BUILDERS:
        raise InvalidArgument(f"unknown field {name!r}; choose from {sorted(FIELD_BUILDERS)}")
    return FIELD_BUILDERS[name](n)


def region_bundle(name, n=320, window=CENTERED_SQUARE):
    """(mask, boundary curve, inside marker, outside marker) for the
    Jordan pipeline demos."""
    if name == "disk":
        mask = disk_mask(n, 0.5, window)
        gamma = curves.circle(0.5, n=2048)
    elif name == "square":
        mask = square_mask(n, 0.5, window)
        s = 0.5
        pts = np.array([[-s, -s], [s, -s], [s, s], [-s, s], [-s, -s]])
        gamma = curves.refine(curves.PolylineCurve(pts, closed=True), 255)
    elif name == "ellipse":
        mask = ellipse_mask(n, 0.5, 0.25, window)
        gamma = curves.ellipse(0.5, 0.25, n=2048)
    else:
        raise InvalidArgument(f"unknown region {name!r}")
    p_in = (0.0, 0.0)
    q_out = (0.8, 0.8)
    return mask, gamma, p_in, q_out


def lattice_mask(name, n):
    """Whitney-demo masks at unit lattice spacing.

    With spacing 1 the radius cap min(1, dist/25) binds in the deep
    interior, so the boundary-band structure of the cover is identical
    across resolutions (in lattice units) and overlap maxima stabilize.
    """
    yy, xx = np.mgrid[0:n, 0:n].astype(float)
    c = (n - 1) / 2.0
    if name == "square":
        mask = (np.abs(xx - c) < 0.45 * n) & (np.abs(yy - c) < 0.45 * n)
    elif name == "annulus":
        r = np.hypot(xx - c, yy - c)
        mask = (r < 0.45 * n) & (r > 0.1 * n)
    elif name == "two-squares":
        half, off = 0.2 * n, 0.24 * n
        left = (np.abs(xx - c + off) < half) & (np.abs(yy - c) < half)
        right = (np.abs(xx - c - off) < half) & (np.abs(yy - c) < half)
        mask = left | right
    else:
        raise InvalidArgument(f"unknown lattice mask {name!r}")
    return IndicatorSet(mask, (0.0, 0.0), 1.0)


def framed_weight_table(window=CENTERED_SQUARE, n=256, lo=0.5, hi=2.0):
    """Smooth tabulated density framed in [lo, hi]."""
    mid = 0.5 * (lo + hi)
    amp = 0.5 * (hi - lo)

    def fn(x, y):
        return mid + amp * np.sin(np.pi * x) * np.sin(np.pi * y)

    from .weighted_plane import WeightedPlane
    return WeightedPlane.tabulated_from_function(fn, window, n)
