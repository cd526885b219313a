"""Whitney-type ball covers with verified disjointness and overlap.

Every mask node x carries the radius r_x = min(1, dist(x, complement)/25).
A maximal pairwise-disjoint subfamily is extracted greedily by
decreasing radius (deterministic lexicographic tie-breaking); its
5-dilates cover the mask, while all dilates up to factor 24 stay inside
it because the radii are a twenty-fifth of the boundary distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import InvalidArgument

RADIUS_CAP = 1.0
RADIUS_DIVISOR = 25.0
COVER_DILATION = 5.0
# triangle inequality on the radius formula: touching 20-dilates have
# radius ratio at least 1/9
COMPARABLE_RADIUS_LOWER = 1.0 / 9.0


@dataclass(frozen=True)
class BallCover:
    """Cover balls (the 5-dilates) plus the disjoint Vitali family."""

    centers: np.ndarray          # ball centers, shared by both families
    radii: np.ndarray            # cover radii (= 5 * Vitali radii)
    vitali_radii: np.ndarray
    parent_mask: np.ndarray
    origin: tuple
    spacing: float

    def __len__(self):
        return len(self.radii)


def _node_radii(mask, spacing):
    """r_x per mask node from the exact Euclidean distance transform.

    The mask is padded with complement so the window edge counts as
    complement; distances are to the nearest complement node.
    """
    padded = np.pad(mask, 1, mode="constant", constant_values=False)
    dist = ndimage.distance_transform_edt(padded)[1:-1, 1:-1] * spacing
    return np.minimum(RADIUS_CAP, dist / RADIUS_DIVISOR)


def build_cover(region):
    """Greedy Vitali selection over all mask nodes, then 5-dilation."""
    mask = region.mask
    if not mask.any():
        raise InvalidArgument("cover needs a nonempty mask")
    h = region.spacing
    x0, y0 = region.origin
    rgrid = _node_radii(mask, h)
    ii, jj = np.nonzero(mask)
    rr = rgrid[ii, jj]
    # decreasing radius, then lexicographic (row, column)
    order = np.lexsort((jj, ii, -rr))
    ii, jj, rr = ii[order], jj[order], rr[order]

    ny, nx = mask.shape
    blocked = np.zeros(mask.shape, dtype=bool)
    rnode = np.zeros(mask.shape)
    rnode[mask] = rgrid[mask]
    sel_i, sel_j, sel_r = [], [], []
    ii_l, jj_l, rr_l = ii.tolist(), jj.tolist(), rr.tolist()
    dist_cache = {}
    for i, j, r in zip(ii_l, jj_l, rr_l):
        if blocked[i, j]:
            continue
        sel_i.append(i)
        sel_j.append(j)
        sel_r.append(r)
        # block every node y whose own ball overlaps this one:
        # |y - x| < r_y + r, and r_y <= r for all later candidates
        span = int(np.ceil(2 * r / h)) + 1
        if span not in dist_cache:
            off = np.arange(-span, span + 1)
            dist_cache[span] = np.hypot(off[:, None] * h, off[None, :] * h)
        d = dist_cache[span]
        i0, i1 = max(0, i - span), min(ny, i + span + 1)
        j0, j1 = max(0, j - span), min(nx, j + span + 1)
        dsub = d[i0 - (i - span):i1 - (i - span), j0 - (j - span):j1 - (j - span)]
        blocked[i0:i1, j0:j1] |= dsub < rnode[i0:i1, j0:j1] + r
    centers = np.stack([x0 + np.asarray(sel_j, float) * h,
                        y0 + np.asarray(sel_i, float) * h], axis=1)
    vit = np.asarray(sel_r, float)
    return BallCover(centers, COVER_DILATION * vit, vit, mask.copy(),
                     region.origin, h)


def _multiplicity_grid(cover, radii):
    """Node-wise count of balls of the given radii containing each node.

    Balls are grouped by identical radius so each group accumulates with
    one vectorized scatter over a shared stencil.  All dilates up to 24x
    the Vitali radii stay inside the mask, hence inside the grid, but
    stencils are clipped defensively anyway.
    """
    ny, nx = cover.parent_mask.shape
    h = cover.spacing
    x0, y0 = cover.origin
    acc = np.zeros((ny, nx), dtype=np.int32)
    ci = np.rint((cover.centers[:, 1] - y0) / h).astype(int)
    cj = np.rint((cover.centers[:, 0] - x0) / h).astype(int)
    rad = np.asarray(radii, float)
    for r in np.unique(rad):
        sel = np.nonzero(rad == r)[0]
        span = int(np.ceil(r / h))
        off = np.arange(-span, span + 1)
        di, dj = np.meshgrid(off, off, indexing="ij")
        keep = (di * h) ** 2 + (dj * h) ** 2 < r * r
        di, dj = di[keep], dj[keep]
        chunk = max(1, 4_000_000 // max(1, len(di)))
        for k in range(0, len(sel), chunk):
            sub = sel[k:k + chunk]
            ti = ci[sub][:, None] + di[None, :]
            tj = cj[sub][:, None] + dj[None, :]
            ok = (ti >= 0) & (ti < ny) & (tj >= 0) & (tj < nx)
            np.add.at(acc, (ti[ok], tj[ok]), 1)
    return acc


def coverage_multiplicity(cover):
    """(min, max) cover-ball multiplicity over the mask nodes.

    The greedy construction guarantees min >= 1: every rejected node's
    ball met a selected ball of larger radius, so the node lies inside
    that ball's 5-dilate.
    """
    acc = _multiplicity_grid(cover, cover.radii)
    vals = acc[cover.parent_mask]
    return int(vals.min()), int(vals.max())


@dataclass(frozen=True)
class OverlapReport:
    dilation: float
    max_multiplicity: int
    min_radius_ratio: float      # over pairs whose 20-dilates meet
    comparable_ok: bool


def _pairs_within(centers, radii, factor, skip_equal_radius_pairs=False):
    """Index pairs with |c_i - c_j| < factor * (r_i + r_j).

    Dyadic radius buckets keep the search near-linear even when tiny
    boundary balls dominate the family.  skip_equal_radius_pairs drops
    same-class pairs inside classes of one repeated radius (their radius
    ratio is 1, so min-ratio searches never need them).
    """
    n = len(radii)
    if n < 2:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    rmax = float(radii.max())
    cls = np.clip(np.floor(np.log2(np.maximum(radii, 1e-300) / rmax)).astype(int), -48, 0)
    groups = {int(e): np.nonzero(cls == e)[0] for e in np.unique(cls)}
    trees = {e: cKDTree(centers[idx]) for e, idx in groups.items()}
    levels = sorted(groups, reverse=True)
    out_i, out_j = [], []
    for a, e1 in enumerate(levels):
        idx1 = groups[e1]
        cap1 = 2.0 ** (e1 + 1) * rmax
        constant_class = float(np.ptp(radii[idx1])) == 0.0
        if not (skip_equal_radius_pairs and constant_class):
            prs = trees[e1].query_pairs(factor * 2 * cap1, output_type="ndarray")
            if len(prs):
                out_i.append(idx1[prs[:, 0]])
                out_j.append(idx1[prs[:, 1]])
        for e2 in levels[a + 1:]:
            idx2 = groups[e2]
            cap2 = 2.0 ** (e2 + 1) * rmax
            hits = trees[e1].query_ball_tree(trees[e2], factor * (cap1 + cap2))
            pi = [idx1[k] for k, lst in enumerate(hits) for _ in lst]
            pj = [idx2[b] for lst in hits for b in lst]
            if pi:
                out_i.append(np.asarray(pi))
                out_j.append(np.asarray(pj))
    if not out_i:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    pi = np.concatenate(out_i)
    pj = np.concatenate(out_j)
    d = np.hypot(*(centers[pi] - centers[pj]).T)
    keep = d < factor * (radii[pi] + radii[pj])
    return pi[keep], pj[keep]


def _meeting_pairs_min_ratio(cover, factor=20.0):
    """min r_i/r_j (<=1) over Vitali pairs whose factor-dilates meet."""
    r = cover.vitali_radii
    pi, pj = _pairs_within(cover.centers, r, factor, skip_equal_radius_pairs=True)
    if len(pi) == 0:
        return 1.0
    ri, rj = r[pi], r[pj]
    return float(np.min(np.minimum(ri, rj) / np.maximum(ri, rj)))


def overlap_bound(cover, dilation):
    """Max multiplicity of the dilation-scaled Vitali balls over the mask.

    dilation 1 is the disjoint family itself; 4 stays inside the mask;
    20 is the bounded-overlap family.  Also reports the comparable-radius
    ratio over meeting 20-dilates, which the radius formula bounds below
    by 1/9.
    """
    if dilation not in (1, 4, 20):
        raise InvalidArgument("dilation must be one of 1, 4, 20")
    acc = _multiplicity_grid(cover, dilation * cover.vitali_radii)
    max_mult = int(acc[cover.parent_mask].max()) if cover.parent_mask.any() else 0
    ratio = _meeting_pairs_min_ratio(cover, float(dilation))
    return OverlapReport(float(dilation), max_mult, ratio,
                         ratio >= COMPARABLE_RADIUS_LOWER * (1 - 1e-9))


def verify_disjoint(cover, slack=1e-9):
    """Exact pairwise disjointness of the undilated Vitali family."""
    r = cover.vitali_radii
    if len(r) < 2:
        return True
    pi, pj = _pairs_within(cover.centers, r, 1.0)
    if len(pi) == 0:
        return True
    d = np.hypot(*(cover.centers[pi] - cover.centers[pj]).T)
    return bool(np.all(d >= r[pi] + r[pj] - slack))


def dilate_inside_mask(cover, factor=4.0):
    """Whether every factor-dilate of a cover ball stays inside the mask.

    Holds by construction for factors below RADIUS_DIVISOR / dilation
    since radii are dist/25; verified on the node lattice.
    """
    ny, nx = cover.parent_mask.shape
    h = cover.spacing
    x0, y0 = cover.origin
    for (cx, cy), r in zip(cover.centers, factor * cover.radii):
        j0 = max(0, int(np.ceil((cx - r - x0) / h)))
        j1 = min(nx - 1, int(np.floor((cx + r - x0) / h)))
        i0 = max(0, int(np.ceil((cy - r - y0) / h)))
        i1 = min(ny - 1, int(np.floor((cy + r - y0) / h)))
        xs = x0 + np.arange(j0, j1 + 1) * h
        ys = y0 + np.arange(i0, i1 + 1) * h
        inside = ((xs[None, :] - cx) ** 2 + (ys[:, None] - cy) ** 2) < (r - 1e-12) ** 2
        if np.any(inside & ~cover.parent_mask[i0:i1 + 1, j0:j1 + 1]):
            return False
    return True
