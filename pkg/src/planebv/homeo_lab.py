"""Built-in homeomorphism families and variation comparisons.

The two counterexample families are radial: a power map r^k e^{i theta}
whose inverse variation diverges against the |x|^{-3/2} density, and a
twist map r e^{i(theta + 1/r^2)} whose forward variation diverges even
against area measure while the inverse is integrable against |x| area.
Divergence is never asserted directly: per-epsilon annulus values are
regressed against {1, log(1/eps), eps^-alpha} and classified by fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import metric_bv
from .errors import InvalidArgument, PreconditionViolated
from .geometry import Rect
from .reports import BOUNDED, LOGARITHMIC, POWER, VariationReport

DEFAULT_EPS_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4)
DEFAULT_RESOLUTIONS = (128, 256, 512)
RADIAL_PANELS = 64
_GAUSS_N = 10

BOUNDED_SPREAD_TOL = 0.02
BOUNDED_TAIL_TOL = 0.01
POWER_MARGIN = 5e-3
ALPHA_MIN = 0.1


@dataclass(frozen=True)
class Domain:
    """Open planar domain: a disk at the origin, an open rectangle, or a
    mapped region given by a membership predicate (e.g. f(G) for linear
    f, tested through the inverse)."""

    kind: str
    window: Rect
    radius: float = 1.0
    predicate: object = None

    def contains(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        if self.kind == "disk":
            return np.hypot(x, y) < self.radius
        if self.kind == "mapped":
            return self.predicate(x, y)
        return ((x > self.window.x0) & (x < self.window.x1)
                & (y > self.window.y0) & (y < self.window.y1))

    @staticmethod
    def disk(radius=1.0):
        return Domain("disk", Rect(-radius, -radius, radius, radius), radius)

    @staticmethod
    def rect(window):
        return Domain("rect", window)

    @staticmethod
    def mapped(window, predicate):
        return Domain("mapped", window, predicate=predicate)


@dataclass(frozen=True)
class HomeoSpec:
    """Analytic homeomorphism with forward/inverse maps and Jacobians."""

    name: str
    params: dict
    forward_fn: object
    inverse_fn: object
    jacobian_forward: object
    jacobian_inverse: object
    domain: Domain
    target_domain: Domain
    singular_points: tuple = ()
    radial_sigma_forward: object = None    # sigma_max profile sigma(r)
    radial_sigma_inverse: object = None

    def forward(self, x, y):
        return self.forward_fn(np.asarray(x, float), np.asarray(y, float))

    def inverse(self, x, y):
        return self.inverse_fn(np.asarray(x, float), np.asarray(y, float))

    def jacobian_at(self, x, y):
        return self.jacobian_forward(np.asarray(x, float), np.asarray(y, float))

    @property
    def is_radial(self):
        return self.radial_sigma_forward is not None

    def inverted(self):
        return HomeoSpec(
            name=self.name + "_inverse", params=self.params,
            forward_fn=self.inverse_fn, inverse_fn=self.forward_fn,
            jacobian_forward=self.jacobian_inverse,
            jacobian_inverse=self.jacobian_forward,
            domain=self.target_domain, target_domain=self.domain,
            singular_points=self.singular_points,
            radial_sigma_forward=self.radial_sigma_inverse,
            radial_sigma_inverse=self.radial_sigma_forward,
        )

    def as_mapfield(self, n, window=None):
        win = window if window is not None else self.domain.window
        return metric_bv.MapField.from_function(
            lambda x, y: self.forward(x, y), win, n)


def _linear_spec(matrix, name="linear", window=Rect(0.0, 0.0, 1.0, 1.0)):
    m = np.asarray(matrix, dtype=float)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < 1e-14:
        raise InvalidArgument("linear family needs an invertible matrix")
    mi = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det

    def fwd(x, y):
        return m[0, 0] * x + m[0, 1] * y, m[1, 0] * x + m[1, 1] * y

    def inv(x, y):
        return mi[0, 0] * x + mi[0, 1] * y, mi[1, 0] * x + mi[1, 1] * y

    def jac(mat):
        def f(x, y):
            shape = np.broadcast(x, y).shape
            return (np.full(shape, mat[0, 0]), np.full(shape, mat[0, 1]),
                    np.full(shape, mat[1, 0]), np.full(shape, mat[1, 1]))
        return f

    corners = np.array([fwd(x, y) for x, y in
                        [(window.x0, window.y0), (window.x0, window.y1),
                         (window.x1, window.y0), (window.x1, window.y1)]])
    bbox = Rect(corners[:, 0].min(), corners[:, 1].min(),
                corners[:, 0].max(), corners[:, 1].max())
    if np.allclose(m, np.diag(np.diag(m))):
        target = Domain.rect(bbox)
    else:
        # image of the rectangle is a parallelogram; test through the inverse
        def inside_image(u, v):
            x, y = inv(np.asarray(u, float), np.asarray(v, float))
            return ((x > window.x0) & (x < window.x1)
                    & (y > window.y0) & (y < window.y1))
        target = Domain.mapped(bbox, inside_image)
    return HomeoSpec(name, {"matrix": m.tolist()}, fwd, inv, jac(m), jac(mi),
                     Domain.rect(window), target)


def _radial_power_components(k):
    """f(x) = r^{k-1} x, i.e. r e^{i th} -> r^k e^{i th}; Df has polar
    singular values {k r^{k-1}, r^{k-1}}."""

    def fwd(x, y):
        r = np.hypot(x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(r > 0, r ** (k - 1.0), 0.0 if k > 1 else np.inf)
        s = np.where(r > 0, s, 0.0)
        return s * x, s * y

    def jac(x, y):
        # Df = r^{k-1} (I + (k-1) rhat rhat^T)
        r = np.hypot(x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(r > 0, r ** (k - 1.0), np.nan)
            cx = np.where(r > 0, x / r, 0.0)
            cy = np.where(r > 0, y / r, 0.0)
        a = s * (1 + (k - 1) * cx * cx)
        b = s * (k - 1) * cx * cy
        c = b
        d = s * (1 + (k - 1) * cy * cy)
        return a, b, c, d

    def sigma(r):
        r = np.asarray(r, float)
        with np.errstate(divide="ignore"):
            return np.maximum(k, 1.0) * r ** (k - 1.0)

    return fwd, jac, sigma


def _radial_twist_components(a):
    """f = rotation by a/r^2: Df = R(T) + (T'/r) R(T + pi/2) x x^T."""

    def fwd(x, y):
        r2 = x * x + y * y
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(r2 > 0, a / r2, 0.0)
        c, s = np.cos(t), np.sin(t)
        return c * x - s * y, s * x + c * y

    def jac(x, y):
        r2 = x * x + y * y
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(r2 > 0, a / r2, np.nan)
            g = np.where(r2 > 0, -2.0 * a / (r2 * r2), np.nan)  # T'(r)/r
        c, s = np.cos(t), np.sin(t)
        j11 = c + g * (-s * x * x - c * x * y)
        j12 = -s + g * (-s * x * y - c * y * y)
        j21 = s + g * (c * x * x - s * x * y)
        j22 = c + g * (c * x * y - s * y * y)
        return j11, j12, j21, j22

    def sigma(r):
        r = np.asarray(r, float)
        with np.errstate(divide="ignore"):
            q = np.abs(a) / r ** 2
        return np.sqrt(1 + q * q) + q

    return fwd, jac, sigma


def builtin_homeo(name, params=None):
    """Built-in families: identity, linear, radial_power, radial_twist,
    user_defined (a (forward, inverse) callable pair)."""
    params = dict(params or {})
    if name == "identity":
        return _linear_spec(np.eye(2), "identity",
                            params.get("window", Rect(0.0, 0.0, 1.0, 1.0)))
    if name == "linear":
        if "matrix" in params:
            m = params["matrix"]
        elif "shear" in params:
            m = [[1.0, params["shear"]], [0.0, 1.0]]
        elif "diag" in params:
            m = [[params["diag"][0], 0.0], [0.0, params["diag"][1]]]
        else:
            raise InvalidArgument("linear family needs matrix, shear or diag")
        return _linear_spec(m, "linear", params.get("window", Rect(0.0, 0.0, 1.0, 1.0)))
    if name == "radial_power":
        k = float(params.get("exponent", 2.0))
        if k <= 0:
            raise InvalidArgument("radial power exponent must be positive")
        fwd, jac, sig = _radial_power_components(k)
        ifwd, ijac, isig = _radial_power_components(1.0 / k)
        return HomeoSpec("radial_power", {"exponent": k}, fwd, ifwd, jac, ijac,
                         Domain.disk(1.0), Domain.disk(1.0),
                         singular_points=((0.0, 0.0),) if k != 1 else (),
                         radial_sigma_forward=sig, radial_sigma_inverse=isig)
    if name == "radial_twist":
        a = float(params.get("amplitude", 1.0))
        fwd, jac, sig = _radial_twist_components(a)
        ifwd, ijac, isig = _radial_twist_components(-a)
        return HomeoSpec("radial_twist", {"amplitude": a}, fwd, ifwd, jac, ijac,
                         Domain.disk(1.0), Domain.disk(1.0),
                         singular_points=((0.0, 0.0),),
                         radial_sigma_forward=sig, radial_sigma_inverse=isig)
    if name == "user_defined":
        fwd = params["forward"]
        inv = params["inverse"]
        dom = params.get("domain", Domain.rect(Rect(0.0, 0.0, 1.0, 1.0)))
        tgt = params.get("target_domain", dom)

        def fd_jac(fn):
            def jac(x, y, eps=1e-6):
                u1, v1 = fn(x + eps, y)
                u0, v0 = fn(x - eps, y)
                u3, v3 = fn(x, y + eps)
                u2, v2 = fn(x, y - eps)
                return ((u1 - u0) / (2 * eps), (u3 - u2) / (2 * eps),
                        (v1 - v0) / (2 * eps), (v3 - v2) / (2 * eps))
            return jac

        return HomeoSpec("user_defined", {}, fwd, inv, fd_jac(fwd), fd_jac(inv),
                         dom, tgt, singular_points=tuple(params.get("singular_points", ())))
    raise InvalidArgument(f"unknown homeomorphism family {name!r}")


# -- growth classification ------------------------------------------


def _linfit_r2(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    a, b = np.polyfit(x, y, 1)
    pred = a * x + b
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(a), float(b), r2


def fit_growth(eps, values):
    """Classify per-epsilon values as bounded / logarithmic / power.

    Deterministic model selection: near-constant tails are bounded;
    otherwise the log model competes against the best power exponent on
    a fixed alpha grid, with a margin favoring the log model (the power
    family degenerates to it as alpha -> 0).
    """
    eps = np.asarray(eps, float)
    v = np.asarray(values, float)
    if len(eps) < 3:
        raise InvalidArgument("growth classification needs >= 3 epsilon samples")
    vmax = float(np.max(np.abs(v))) or 1.0
    spread = (float(v.max()) - float(v.min())) / vmax
    tail = abs(float(v[-1]) - float(v[-2])) / vmax
    if spread <= BOUNDED_SPREAD_TOL or tail <= BOUNDED_TAIL_TOL:
        return {"class": BOUNDED, "limit": float(v[-1]),
                "r2": 1.0 - min(tail, spread), "slope": 0.0, "alpha": None}
    x = np.log(1.0 / eps)
    slope, _, r2_log = _linfit_r2(x, v)
    best_alpha, best_r2 = None, -np.inf
    for alpha in np.geomspace(0.05, 3.0, 40):
        _, _, r2 = _linfit_r2(eps ** -alpha, v)
        if r2 > best_r2:
            best_alpha, best_r2 = float(alpha), r2
    if best_r2 > r2_log + POWER_MARGIN and best_alpha >= ALPHA_MIN:
        return {"class": POWER, "limit": math.inf, "r2": best_r2,
                "slope": None, "alpha": best_alpha}
    return {"class": LOGARITHMIC, "limit": math.inf, "r2": r2_log,
            "slope": slope, "alpha": None}


# -- annulus integration --------------------------------------------


def _radial_weight_profile(plane):
    if not plane.is_radial:
        return None
    return plane.radial_profile


def _annulus_value_radial(sigma, wprof, eps, outer=1.0, panels=RADIAL_PANELS):
    xg, wg = np.polynomial.legendre.leggauss(_GAUSS_N)
    edges = np.geomspace(eps, outer, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    vals = 2 * np.pi * sigma(pts) * wprof(pts) * pts
    return float(np.sum((half[:, None] * wg[None, :]).ravel() * vals))


def _annulus_value_grid(spec, plane, eps, resolution):
    win = spec.domain.window
    h = win.width / resolution
    if eps < 4 * h:
        raise PreconditionViolated(
            "epsilon below grid resolution; use a radial family or refine")
    xs = win.x0 + (np.arange(resolution) + 0.5) * h
    ys = win.y0 + (np.arange(resolution) + 0.5) * h
    xx, yy = np.meshgrid(xs, ys)
    rr = np.hypot(xx, yy)
    j = spec.jacobian_at(xx, yy)
    sig = metric_bv.sigma_max(*[np.asarray(c, float) for c in j])
    w = plane.density_at(xx, yy)
    good = (rr > eps) & spec.domain.contains(xx, yy) & np.isfinite(w) & np.isfinite(sig)
    contrib = np.zeros_like(sig)
    contrib[good] = sig[good] * w[good]
    return float(np.sum(contrib) * h * h)


def _direction_report(spec, plane, eps_schedule, resolution):
    sigma = spec.radial_sigma_forward
    wprof = _radial_weight_profile(plane)
    values = []
    for eps in eps_schedule:
        if sigma is not None and wprof is not None:
            outer = spec.domain.radius if spec.domain.kind == "disk" else 1.0
            values.append(_annulus_value_radial(sigma, wprof, eps, outer,
                                                panels=resolution))
        else:
            values.append(_annulus_value_grid(spec, plane, eps, resolution))
    fit = fit_growth(eps_schedule, values)
    value = fit["limit"] if fit["class"] == BOUNDED else math.inf
    return VariationReport(
        value=value, resolution=resolution,
        epsilon_schedule=tuple(eps_schedule), per_epsilon_values=tuple(values),
        growth_class=fit["class"], growth_exponent=fit["alpha"],
        growth_slope=fit["slope"], fit_quality=fit["r2"])


def variation_pair(homeo, source, target, eps_schedule=DEFAULT_EPS_SCHEDULE,
                   resolution=RADIAL_PANELS):
    """Annular variation of the map (against the source weight) and of
    its inverse (against the target weight), with growth classification.

    For radial families with radial weights the annuli are integrated in
    polar coordinates, so the schedule may descend far below any grid
    scale.  resolution = radial panel count (or grid size otherwise).
    """
    eps = tuple(float(e) for e in eps_schedule)
    if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])) or not eps:
        raise InvalidArgument("eps schedule must be strictly decreasing")
    if any(not 0 < e < 1 for e in eps):
        raise InvalidArgument("eps schedule must lie in (0, 1)")
    fwd = _direction_report(homeo, source, eps, resolution)
    inv = _direction_report(homeo.inverted(), target, eps, resolution)
    return fwd, inv


# -- the two-sided bound harness -------------------------------------


@dataclass(frozen=True)
class TwoSidedReport:
    ratios: tuple                 # (resolution, ratio) pairs
    ratio: float                  # finest-resolution ratio
    cauchy_ok: bool
    applicable: bool
    forward_values: tuple
    inverse_values: tuple


def two_sided_check(homeo, source, target, resolutions=DEFAULT_RESOLUTIONS,
                    cauchy_tol=0.05):
    """Ratio |Df^{-1}|(Omega) / |Df|(G) across grid resolutions.

    Requires both directions bounded (checked by a quick growth probe
    for singular radial families); the ratio must be Cauchy across the
    two finest resolutions.
    """
    resolutions = tuple(sorted(int(r) for r in resolutions))
    if len(resolutions) < 2:
        raise InvalidArgument("need at least two resolutions")
    applicable = True
    if homeo.is_radial and source.is_radial and target.is_radial:
        fwd, inv = variation_pair(homeo, source, target)
        applicable = fwd.growth_class == BOUNDED and inv.growth_class == BOUNDED
    fvals, ivals, ratios = [], [], []
    for n in resolutions:
        vf = metric_bv.exact_variation(homeo, source, resolution=n).value
        vi = metric_bv.exact_variation(homeo.inverted(), target, resolution=n).value
        fvals.append(vf)
        ivals.append(vi)
        ratios.append(vi / vf if vf > 0 else math.inf)
    r1, r2 = ratios[-2], ratios[-1]
    cauchy = abs(r1 - r2) <= cauchy_tol * max(abs(r2), 1e-300)
    return TwoSidedReport(tuple(zip(resolutions, ratios)), ratios[-1],
                          cauchy, applicable, tuple(fvals), tuple(ivals))


# -- perimeter of half-space preimages vs slice images ----------------


@dataclass(frozen=True)
class SliceImageReport:
    perimeter_value: float
    h1_value: float
    ratio: float
    ok: bool
    constant: float


def perimeter_vs_sliceimage(homeo, target, x0, resolution=256,
                            slice_samples=4096, constant=2.0):
    """Weighted perimeter of {g1 > x0} in Omega against the weighted
    length of the slice image f({x0} x G_{x0}).

    g1 is the first inverse component; the slice image is exactly the
    relative boundary of the superlevel set, so the perimeter is bounded
    by a constant multiple of the slice-image length.
    """
    from . import bv_scalar

    dom = homeo.domain
    tdom = homeo.target_domain
    win = tdom.window
    n = resolution
    h = win.width / n
    xs = win.x0 + (np.arange(n) + 0.5) * h
    ys = win.y0 + (np.arange(int(round(win.height / h))) + 0.5) * h
    xx, yy = np.meshgrid(xs, ys)
    gx, gy = homeo.inverse(xx, yy)
    omega = tdom.contains(xx, yy)
    mask = (gx > x0) & omega
    indicator = bv_scalar.IndicatorSet(mask, (xs[0], ys[0]), h)

    if tdom.kind == "rect":
        # boundary along the open rectangle edge never enters the contour
        keep = None
    else:
        # drop contour pieces hugging the curved boundary of Omega
        e = 2.5 * h

        def keep(px, py):
            inside = tdom.contains(px, py)
            for dx, dy in ((e, 0), (-e, 0), (0, e), (0, -e)):
                inside = inside & tdom.contains(px + dx, py + dy)
            return inside

    per = bv_scalar.perimeter(indicator, target, keep_midpoint=keep).value

    if dom.kind == "disk":
        if abs(x0) >= dom.radius:
            raise InvalidArgument("slice does not cross the domain")
        ylim = math.sqrt(dom.radius ** 2 - x0 ** 2)
        ys_line = np.linspace(-ylim, ylim, slice_samples)
    else:
        if not (dom.window.x0 < x0 < dom.window.x1):
            raise InvalidArgument("slice does not cross the domain")
        ys_line = np.linspace(dom.window.y0, dom.window.y1, slice_samples)
    u, v = homeo.forward(np.full_like(ys_line, x0), ys_line)
    du = np.diff(u)
    dv = np.diff(v)
    seg = np.hypot(du, dv)
    wmid = target.density_at(0.5 * (u[1:] + u[:-1]), 0.5 * (v[1:] + v[:-1]))
    finite = np.isfinite(wmid)
    h1 = float(np.sum(seg[finite] * wmid[finite]))
    if not np.all(np.isfinite(seg)):
        raise PreconditionViolated("slice image has non-finite length at this resolution")
    ratio = per / h1 if h1 > 0 else math.inf
    return SliceImageReport(per, h1, ratio, per <= constant * h1, constant)
