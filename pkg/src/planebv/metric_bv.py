"""Variation of planar-target maps via 1-Lipschitz post-composition.

The pointwise supremum over 1-Lipschitz test functions is realized by
the largest Jacobian singular value: |grad(phi o f)| = |Df^T grad(phi)|
<= sigma_max(Df), with equality approached by cone functions aligned
with the top singular direction.  The dictionary method cross-validates
that density from below with finitely many cones and half-planes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bv_scalar import GridField, discrete_lip
from .errors import InvalidArgument, SingularityError
from .reports import VariationReport

DEFAULT_RESOLUTION = 256
SLICE_TOL = 0.05


def sigma_max(j11, j12, j21, j22):
    """Largest singular value of 2x2 Jacobians (stable closed form)."""
    h1 = np.hypot(j11 + j22, j12 - j21)
    h2 = np.hypot(j11 - j22, j12 + j21)
    return 0.5 * (h1 + h2)


@dataclass(frozen=True)
class MapField:
    """Sampled planar map: two component GridFields on one lattice."""

    f1: GridField
    f2: GridField

    def __post_init__(self):
        same = (self.f1.shape == self.f2.shape
                and np.allclose(self.f1.origin, self.f2.origin)
                and np.isclose(self.f1.spacing, self.f2.spacing))
        if not same:
            raise InvalidArgument("component fields must share a lattice")

    @property
    def spacing(self):
        return self.f1.spacing

    @property
    def window(self):
        return self.f1.window

    @staticmethod
    def from_function(fn, window, n):
        f1 = GridField.from_function(lambda x, y: fn(x, y)[0], window, n)
        f2 = GridField.from_function(lambda x, y: fn(x, y)[1], window, n)
        return MapField(f1, f2)

    def jacobian(self):
        h = self.spacing
        dy1, dx1 = np.gradient(self.f1.values, h)
        dy2, dx2 = np.gradient(self.f2.values, h)
        return dx1, dy1, dx2, dy2


@dataclass(frozen=True)
class LipschitzDictionary:
    """Finite family of 1-Lipschitz test functions on the target plane:
    cone distances d(., p_i) plus signed half-plane coordinates."""

    anchors: tuple = ()
    halfplane_normals: tuple = ()

    def __post_init__(self):
        if len(self.anchors) == 0 and len(self.halfplane_normals) == 0:
            raise InvalidArgument("dictionary must be nonempty")

    def __len__(self):
        return len(self.anchors) + len(self.halfplane_normals)

    @staticmethod
    def cone_ring(center, radius, n, halfplanes=True):
        th = 2 * np.pi * (np.arange(n) + 0.5) / n
        anchors = tuple((center[0] + radius * np.cos(t),
                         center[1] + radius * np.sin(t)) for t in th)
        normals = ()
        if halfplanes:
            normals = ((1.0, 0.0), (0.0, 1.0),
                       (np.sqrt(0.5), np.sqrt(0.5)), (np.sqrt(0.5), -np.sqrt(0.5)))
        return LipschitzDictionary(anchors, normals)

    def validate_inside(self, window):
        for p in self.anchors:
            if not window.contains_point(p):
                raise InvalidArgument("dictionary anchor outside the target window")


def dictionary_variation(mapfield, plane, dictionary):
    """sup over dictionary entries of Tv(phi o f), taken cellwise.

    Monotone nondecreasing in the dictionary and a lower bound for
    exact_variation up to discretization.
    """
    if len(dictionary) == 0:
        raise InvalidArgument("dictionary must be nonempty")
    if not plane.window.contains_rect(mapfield.window, 1e-9):
        raise InvalidArgument("map lattice must sit inside the plane window")
    u = mapfield.f1.values
    v = mapfield.f2.values
    best = np.zeros_like(u)
    for (px, py) in dictionary.anchors:
        phi = GridField(np.hypot(u - px, v - py), mapfield.f1.origin, mapfield.spacing)
        np.maximum(best, discrete_lip(phi).values, best)
    for (nx_, ny_) in dictionary.halfplane_normals:
        phi = GridField(nx_ * u + ny_ * v, mapfield.f1.origin, mapfield.spacing)
        np.maximum(best, discrete_lip(phi).values, best)
    xx, yy = mapfield.f1.node_coords()
    w = plane.density_at(xx, yy)
    finite = np.isfinite(w)
    contrib = np.zeros_like(best)
    contrib[finite] = best[finite] * w[finite]
    value = float(np.sum(contrib) * mapfield.spacing ** 2)
    return VariationReport(value=value, resolution=mapfield.f1.shape,
                           excluded_nodes=int(np.sum(~finite)))


def _is_homeo_like(obj):
    return hasattr(obj, "jacobian_at") and hasattr(obj, "domain")


def _sigma_grid_for_spec(spec, window, n, singular_eps):
    h = window.width / n
    ny = max(2, int(round(window.height / h)))
    xs = window.x0 + (np.arange(n) + 0.5) * h
    ys = window.y0 + (np.arange(ny) + 0.5) * h
    xx, yy = np.meshgrid(xs, ys)
    j11, j12, j21, j22 = spec.jacobian_at(xx, yy)
    sig = sigma_max(np.asarray(j11, float), np.asarray(j12, float),
                    np.asarray(j21, float), np.asarray(j22, float))
    near_sing = np.zeros(sig.shape, dtype=bool)
    for (sx, sy) in spec.singular_points:
        near_sing |= np.hypot(xx - sx, yy - sy) <= singular_eps * h
    bad = ~np.isfinite(sig) & ~near_sing
    if np.any(bad):
        raise SingularityError("non-finite Jacobian away from declared singular points")
    sig = np.where(near_sing & ~np.isfinite(sig), 0.0, sig)
    return xx, yy, sig, near_sing, h


def exact_variation(map_or_spec, plane, resolution=None, window=None):
    """integral of sigma_max(Df) * w: the exact planar-target variation
    density under the 1-Lipschitz post-composition supremum."""
    if _is_homeo_like(map_or_spec):
        spec = map_or_spec
        win = window if window is not None else spec.domain.window
        n = resolution or DEFAULT_RESOLUTION
        xx, yy, sig, near_sing, h = _sigma_grid_for_spec(spec, win, n, 0.75)
        mask = spec.domain.contains(xx, yy) if window is None else np.ones_like(sig, bool)
        w = plane.density_at(xx, yy)
        good = mask & np.isfinite(w) & ~near_sing
        contrib = np.zeros_like(sig)
        contrib[good] = sig[good] * w[good]
        value = float(np.sum(contrib) * h * h)
        return VariationReport(value=value, resolution=n,
                               excluded_nodes=int(np.sum(mask & ~good)))
    mapfield = map_or_spec
    if not plane.window.contains_rect(mapfield.window, 1e-9):
        raise InvalidArgument("map lattice must sit inside the plane window")
    j11, j12, j21, j22 = mapfield.jacobian()
    sig = sigma_max(j11, j12, j21, j22)
    if not np.all(np.isfinite(sig)):
        raise SingularityError("non-finite Jacobian in sampled map")
    xx, yy = mapfield.f1.node_coords()
    w = plane.density_at(xx, yy)
    finite = np.isfinite(w)
    contrib = np.zeros_like(sig)
    contrib[finite] = sig[finite] * w[finite]
    value = float(np.sum(contrib) * mapfield.spacing ** 2)
    return VariationReport(value=value, resolution=mapfield.f1.shape,
                           excluded_nodes=int(np.sum(~finite)))


def _sample_map_on_grid(spec, window, n):
    h = window.width / n
    ny = max(2, int(round(window.height / h)))
    xs = window.x0 + (np.arange(n) + 0.5) * h
    ys = window.y0 + (np.arange(ny) + 0.5) * h
    xx, yy = np.meshgrid(xs, ys)
    u, v = spec.forward(xx, yy)
    return xs, ys, np.asarray(u, float), np.asarray(v, float), h


def slice_variation(map_or_spec, plane, axis="x", resolution=None):
    """(slice integral, full variation) for the slicing inequality.

    axis="x": slices are vertical lines {x = const}; the image polyline
    length of each slice is its variation, integrated over x.  The full
    variation integrates sigma_max over the same rectangular window.
    """
    if axis not in ("x", "y"):
        raise InvalidArgument("axis must be 'x' or 'y'")
    if _is_homeo_like(map_or_spec):
        spec = map_or_spec
        win = spec.domain.window
        n = resolution or DEFAULT_RESOLUTION
        xs, ys, u, v, h = _sample_map_on_grid(spec, win, n)
        xx, yy, sig, near_sing, _ = _sigma_grid_for_spec(spec, win, n, 0.75)
        w = plane.density_at(xx, yy)
        good = np.isfinite(w) & ~near_sing
        contrib = np.zeros_like(sig)
        contrib[good] = sig[good] * w[good]
        full = float(np.sum(contrib) * h * h)
    else:
        mapfield = map_or_spec
        u = mapfield.f1.values
        v = mapfield.f2.values
        h = mapfield.spacing
        full = exact_variation(mapfield, plane).value
    if axis == "x":
        seg = np.hypot(np.diff(u, axis=0), np.diff(v, axis=0))
        lengths = seg.sum(axis=0)
    else:
        seg = np.hypot(np.diff(u, axis=1), np.diff(v, axis=1))
        lengths = seg.sum(axis=1)
    slice_integral = float(np.sum(lengths) * h)
    return slice_integral, full
