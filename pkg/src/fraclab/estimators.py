"""Frostman (ball-mass) and box-counting dimension estimators.

Both estimators walk a geometric ladder of scales and fit a log-log slope.
Ball masses are exact: for every candidate center we sum the weights of
all atoms within Euclidean distance r, using prefix sums in dimension 1
and a cell-binned scan in dimension 2 (whole cells strictly inside the
ball are added from a precomputed table, only boundary cells are tested
atom by atom). Candidate centers are the atoms themselves plus a coarse
grid; atoms dominate the maximizers of the Frostman supremum, the grid
guards against maxima between atoms.

Every scale window is validated against the atomization scale of the
measure: radii below 4x the finest atom spacing say nothing about the
continuous target and are refused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .errors import PreconditionError
from .fitting import DimensionEstimate, clamp, loglog_fit
from .measures import DiscreteMeasure

MIN_SCALES = 6
ATOMIZATION_FACTOR = 4.0
MAX_GRID_CELLS_PER_AXIS = 2048


@dataclass(frozen=True)
class BallMassProfile:
    """Per-scale maxima of mu(B(x, r)) over the center set."""

    scales: np.ndarray
    max_mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scales", np.asarray(self.scales, dtype=np.float64))
        object.__setattr__(self, "max_mass", np.asarray(self.max_mass, dtype=np.float64))


def geometric_scales(r_min: float, r_max: float, base: float = 2.0) -> np.ndarray:
    """Descending ladder r_max, r_max/base, ... down to r_min (inclusive
    up to rounding)."""
    if not (0 < r_min < r_max):
        raise PreconditionError(f"need 0 < r_min < r_max, got ({r_min}, {r_max})")
    if base <= 1:
        raise PreconditionError("scale base must exceed 1")
    scales = []
    r = float(r_max)
    while r >= r_min * (1.0 - 1e-9):
        scales.append(r)
        r /= base
    return np.array(scales)


def _check_window(mu: DiscreteMeasure, scales: np.ndarray) -> None:
    r_min, r_max = float(scales.min()), float(scales.max())
    finest = mu.finest_spacing()
    floor = ATOMIZATION_FACTOR * finest
    if finest > 0 and r_min < floor * (1.0 - 1e-9):
        raise PreconditionError(
            f"r_min={r_min:g} is below the atomization scale; admissible "
            f"window is [{floor:g}, {mu.diameter():g}]")
    diam = mu.diameter()
    if diam > 0 and r_max > diam * (1.0 + 1e-9):
        raise PreconditionError(
            f"r_max={r_max:g} exceeds the bounding-box diameter {diam:g}")
    if scales.size < MIN_SCALES:
        raise PreconditionError(
            f"only {scales.size} usable scales, need at least {MIN_SCALES}")


def _center_grid(mu: DiscreteMeasure, spacing: float) -> np.ndarray:
    lo = mu.bbox[:, 0]
    hi = mu.bbox[:, 1]
    axes = []
    for k in range(mu.dim):
        span = hi[k] - lo[k]
        n = int(np.floor(span / spacing)) + 1 if span > 0 else 1
        n = min(n, 129)
        axes.append(lo[k] + (np.arange(n) + 0.5) * (span / n if n else 1.0))
    if mu.dim == 1:
        return axes[0][:, None]
    gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def _ball_masses_1d(xs_sorted, prefix, centers, r):
    hi = np.searchsorted(xs_sorted, centers + r, side="right")
    lo = np.searchsorted(xs_sorted, centers - r, side="left")
    return prefix[hi] - prefix[lo]


def _dedup_centers(centers: np.ndarray, resolution: float) -> np.ndarray:
    """First center in every resolution-cell, in deterministic order."""
    if resolution <= 0:
        return centers
    cells = np.floor(centers / resolution).astype(np.int64)
    key = cells[:, 0] * (2 ** 32) + cells[:, 1]
    _, first = np.unique(key, return_index=True)
    return centers[np.sort(first)]


@njit(parallel=True, cache=True)
def _ball_masses_2d(px, py, w, order, cell_start, cell_mass,
                    nx, ny, x0, y0, h, cx, cy, r, out):
    r2 = r * r
    for i in prange(cx.size):
        X = cx[i]
        Y = cy[i]
        a_lo = int(np.floor((X - r - x0) / h))
        a_hi = int(np.floor((X + r - x0) / h))
        b_lo = int(np.floor((Y - r - y0) / h))
        b_hi = int(np.floor((Y + r - y0) / h))
        if a_lo < 0:
            a_lo = 0
        if b_lo < 0:
            b_lo = 0
        if a_hi > nx - 1:
            a_hi = nx - 1
        if b_hi > ny - 1:
            b_hi = ny - 1
        acc = 0.0
        for a in range(a_lo, a_hi + 1):
            cxlo = x0 + a * h
            cxhi = cxlo + h
            dx_near = 0.0
            if X < cxlo:
                dx_near = cxlo - X
            elif X > cxhi:
                dx_near = X - cxhi
            dx_far = cxhi - X if (cxhi - X) > (X - cxlo) else (X - cxlo)
            for b in range(b_lo, b_hi + 1):
                cylo = y0 + b * h
                cyhi = cylo + h
                dy_near = 0.0
                if Y < cylo:
                    dy_near = cylo - Y
                elif Y > cyhi:
                    dy_near = Y - cyhi
                dy_far = cyhi - Y if (cyhi - Y) > (Y - cylo) else (Y - cylo)
                if dx_near * dx_near + dy_near * dy_near > r2:
                    continue
                cid = b * nx + a
                if dx_far * dx_far + dy_far * dy_far <= r2:
                    acc += cell_mass[cid]
                    continue
                for k in range(cell_start[cid], cell_start[cid + 1]):
                    j = order[k]
                    dx = px[j] - X
                    dy = py[j] - Y
                    if dx * dx + dy * dy <= r2:
                        acc += w[j]
        out[i] = acc


def _bin_2d(mu: DiscreteMeasure, h_target: float):
    lo = mu.bbox[:, 0]
    hi = mu.bbox[:, 1]
    span = max(float(hi[0] - lo[0]), float(hi[1] - lo[1]), 1e-300)
    h = max(h_target, span / MAX_GRID_CELLS_PER_AXIS)
    nx = int(np.floor((hi[0] - lo[0]) / h)) + 1
    ny = int(np.floor((hi[1] - lo[1]) / h)) + 1
    ix = np.clip(np.floor((mu.points[:, 0] - lo[0]) / h).astype(np.int64), 0, nx - 1)
    iy = np.clip(np.floor((mu.points[:, 1] - lo[1]) / h).astype(np.int64), 0, ny - 1)
    ids = iy * nx + ix
    order = np.argsort(ids, kind="stable").astype(np.int64)
    counts = np.bincount(ids, minlength=nx * ny)
    cell_start = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    cell_mass = np.bincount(ids, weights=mu.weights, minlength=nx * ny)
    return order, cell_start, cell_mass, nx, ny, float(lo[0]), float(lo[1]), h


def ball_mass_profile(mu: DiscreteMeasure, scales, grid_spacing=None,
                      validate_window: bool = True) -> BallMassProfile:
    """Maximum ball mass over atoms + coarse grid centers at each scale."""
    scales = np.asarray(scales, dtype=np.float64)
    if validate_window:
        _check_window(mu, scales)
    if grid_spacing is None:
        side = float(np.max(mu.bbox[:, 1] - mu.bbox[:, 0]))
        grid_spacing = side / 64.0 if side > 0 else 1.0
    grid = _center_grid(mu, grid_spacing)
    centers = np.vstack([mu.points, grid])
    maxima = np.empty(scales.size)
    if mu.dim == 1:
        xs = mu.points[:, 0]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        prefix = np.concatenate([[0.0], np.cumsum(mu.weights[order])])
        c = centers[:, 0]
        for k, r in enumerate(scales):
            maxima[k] = float(np.max(_ball_masses_1d(xs_sorted, prefix, c, r)))
    else:
        px = np.ascontiguousarray(mu.points[:, 0])
        py = np.ascontiguousarray(mu.points[:, 1])
        w = np.ascontiguousarray(mu.weights)
        for k, r in enumerate(scales):
            # centers within r/16 of each other are redundant at radius r;
            # keep one representative per r/16-cell so coarse scales do not
            # pay for the full atom count
            cs = _dedup_centers(centers, float(r) / 16.0)
            order, cell_start, cell_mass, nx, ny, x0, y0, h = _bin_2d(mu, r / 8.0)
            out = np.empty(cs.shape[0])
            _ball_masses_2d(px, py, w, order, cell_start, cell_mass,
                            nx, ny, x0, y0, h,
                            np.ascontiguousarray(cs[:, 0]),
                            np.ascontiguousarray(cs[:, 1]), float(r), out)
            maxima[k] = float(np.max(out))
    return BallMassProfile(scales, maxima)


def frostman_exponent(mu: DiscreteMeasure, scale_range, grid_spacing=None,
                      base: float = 2.0) -> DimensionEstimate:
    """Empirical Frostman exponent: slope of log max ball mass vs log r.

    The slope is clamped to [0, ambient_dim] as the Hausdorff-dimension
    proxy. Requires at least 6 scales inside the admissible window.
    """
    r_min, r_max = scale_range
    scales = geometric_scales(r_min, r_max, base)
    profile = ball_mass_profile(mu, scales, grid_spacing)
    slope, _, rms = loglog_fit(profile.scales, profile.max_mass)
    dim = clamp(slope, 0.0, float(mu.dim))
    return DimensionEstimate(slope=slope, dim_value=dim, residual=rms,
                             scale_window=(float(scales.min()), float(scales.max())),
                             kind="frostman", ambient_dim=mu.dim,
                             extras={"max_mass": profile.max_mass.tolist()})


def box_counts(mu: DiscreteMeasure, scales) -> np.ndarray:
    """Number of grid cells of side delta meeting the support, per scale."""
    scales = np.asarray(scales, dtype=np.float64)
    lo = mu.bbox[:, 0]
    counts = np.empty(scales.size, dtype=np.int64)
    for k, d in enumerate(scales):
        idx = np.floor((mu.points - lo) / d).astype(np.int64)
        if mu.dim == 1:
            counts[k] = np.unique(idx[:, 0]).size
        else:
            key = idx[:, 0] * (2 ** 32) + idx[:, 1]
            counts[k] = np.unique(key).size
    return counts


def box_counting(mu: DiscreteMeasure, scale_range, base: float = 2.0,
                 window: int = 4) -> DimensionEstimate:
    """Box-counting dimension of the support via grid cells.

    Fits log N_delta against log(1/delta) over the scale ladder. Sliding
    sub-windows give minimum and maximum local slopes as proxies for the
    lower/upper box dimensions; the headline dim_value is the full-window
    slope.
    """
    r_min, r_max = scale_range
    scales = geometric_scales(r_min, r_max, base)
    _check_window(mu, scales)
    counts = box_counts(mu, scales)
    inv = 1.0 / scales
    slope, _, rms = loglog_fit(inv, counts.astype(np.float64))
    win_slopes = []
    w = min(window, scales.size)
    for i in range(scales.size - w + 1):
        s, _, _ = loglog_fit(inv[i:i + w], counts[i:i + w].astype(np.float64))
        win_slopes.append(s)
    dim = clamp(slope, 0.0, float(mu.dim))
    return DimensionEstimate(slope=slope, dim_value=dim, residual=rms,
                             scale_window=(float(scales.min()), float(scales.max())),
                             kind="box", ambient_dim=mu.dim,
                             extras={"lower_proxy": clamp(min(win_slopes), 0.0, float(mu.dim)),
                                     "upper_proxy": clamp(max(win_slopes), 0.0, float(mu.dim)),
                                     "counts": counts.tolist()})
