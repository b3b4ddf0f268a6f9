"""Geometric constructions: radial and product Kakeya-type measures,
weighted line families with fiber measures, and Brownian-image Salem
measures.

The assembly primitive is the same everywhere: a family of segments, each
carrying a unit-mass 1-D fiber measure, glued by a weight measure on the
family. Atoms of the result are base + r * direction with the product
weights, which realizes the double integral
int int f(a_e + r e) dnu_e(r) dmu(e) exactly on atoms.

Fiber profiles come in four kinds. "uniform" puts equal weights on the
segment (the Lebesgue fiber; its transform decays like 1/|xi| with a slow
harmonic tail). "smooth" weights the same atoms by a flat-at-the-ends
bump, trading nothing in support for superpolynomial fiber decay, which
is what a full-interval fiber must contribute when the surrounding
construction is supposed to exhibit its best possible Fourier decay.
"cantor" gives a self-similar fiber of prescribed dimension, reproducible
with no randomness. "brownian" gives a random Salem fiber of prescribed
Fourier dimension via a 1-D Brownian image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PreconditionError
from .ifs import ifs_measure, rescale, two_branch_spec
from .measures import (PRODUCT_ATOM_CAP, DiscreteMeasure, measure_from_points,
                       product_measure, uniform_interval_measure)

MAX_LINE_OFFSET = 8.0
FIBER_RANGE = (-2.0, 2.0)


# ---------------------------------------------------------------------------
# direction measures on [0, pi)

def arc_directions(n: int, span=(0.0, math.pi / 2), taper: str = "none") -> DiscreteMeasure:
    """n directions spread uniformly over an angular arc.

    taper="smooth" reweights by a bump vanishing flatly at the arc ends,
    which removes the arc-endpoint diffraction spikes from assembled
    transforms; taper="none" keeps equal weights.
    """
    lo, hi = span
    if not (0 <= lo < hi <= math.pi):
        raise ConfigError("arc must be a nondegenerate subinterval of [0, pi]")
    mu = uniform_interval_measure(lo, hi, n)
    if taper == "none":
        return mu
    if taper != "smooth":
        raise ConfigError(f"unknown taper {taper!r}")
    u = (mu.points[:, 0] - lo) / (hi - lo)
    w, pts = _positive_part(bump_weights(u), mu.points)
    return measure_from_points(w / w.sum(), pts, bbox=mu.bbox)


def cantor_directions(dimension: float, levels: int,
                      span=(0.0, math.pi / 2)) -> DiscreteMeasure:
    """Self-similar direction set of prescribed Hausdorff dimension,
    scaled onto an angular arc."""
    base = ifs_measure(two_branch_spec(dimension, levels))
    return rescale(base, span[0], span[1])


def full_circle_directions(n: int) -> DiscreteMeasure:
    """n equally weighted directions covering [0, 2 pi)."""
    k = np.arange(n, dtype=np.float64)
    pts = (k + 0.5) * (2.0 * math.pi / n)
    return measure_from_points(np.full(n, 1.0 / n), pts[:, None],
                               bbox=np.array([[0.0, 2.0 * math.pi]]))


def circle_map(thetas: np.ndarray) -> np.ndarray:
    """Angle-to-unit-circle embedding, usable with pushforward."""
    t = thetas[:, 0] if thetas.ndim == 2 else thetas
    return np.column_stack([np.cos(t), np.sin(t)])


# ---------------------------------------------------------------------------
# fiber measures on a parameter interval

def bump_weights(u: np.ndarray) -> np.ndarray:
    """Weights of a C-infinity bump exp(-4 + 1/4 - 1/(u(1-u))) shape at
    points u in (0,1), normalized to total mass 1. Flat-zero approach at
    both ends; entries that underflow to exact zero must be dropped by
    the caller (they carry no mass)."""
    u = np.clip(u, 0.0, 1.0)
    inner = u * (1.0 - u)
    w = np.zeros_like(u)
    pos = inner > 0
    w[pos] = np.exp(4.0 - 1.0 / inner[pos])
    # weights this far into the flat tails carry no numerical mass and
    # would underflow to zero inside product constructions
    w[w < 1e-18 * w.max()] = 0.0
    s = w.sum()
    if s <= 0:
        raise ConfigError("bump weights vanished; need interior points")
    return w / s


def _positive_part(weights: np.ndarray, points: np.ndarray):
    keep = weights > 0.0
    return weights[keep], points[keep]


@dataclass(frozen=True)
class FiberRule:
    """Recipe for the per-segment 1-D measure.

    kind      : "uniform" | "smooth" | "cantor" | "brownian"
    atoms     : atom budget of the fiber
    dimension : target dimension for cantor (Hausdorff/similarity) and
                brownian (Fourier) fibers
    levels    : cylinder depth for cantor/brownian input sets (0 = pick
                from the atom budget)
    seed      : base seed for brownian fibers
    span      : parameter interval carrying the fiber, inside [-2, 2]
    per_direction_seeds : give every direction its own Brownian fiber
                (seed xor direction index) instead of one shared fiber
    """

    kind: str = "uniform"
    atoms: int = 1024
    dimension: float = 1.0
    levels: int = 0
    seed: int = 0
    span: tuple = (0.0, 1.0)
    per_direction_seeds: bool = False

    def __post_init__(self):
        if self.kind not in ("uniform", "smooth", "cantor", "brownian"):
            raise ConfigError(f"unknown fiber kind {self.kind!r}")
        if self.atoms < 1:
            raise ConfigError("fiber needs at least one atom")
        lo, hi = self.span
        if not (FIBER_RANGE[0] <= lo < hi <= FIBER_RANGE[1]):
            raise ConfigError(f"fiber span must sit inside {FIBER_RANGE}")

    def build(self, seed_offset: int = 0) -> DiscreteMeasure:
        lo, hi = self.span
        if self.kind == "uniform":
            return uniform_interval_measure(lo, hi, self.atoms)
        if self.kind == "smooth":
            base = uniform_interval_measure(lo, hi, self.atoms)
            u = (base.points[:, 0] - lo) / (hi - lo)
            w, pts = _positive_part(bump_weights(u), base.points)
            return measure_from_points(w / w.sum(), pts, bbox=base.bbox)
        if self.kind == "cantor":
            levels = self.levels or max(1, round(math.log2(self.atoms)))
            mu = ifs_measure(two_branch_spec(self.dimension, levels))
            return rescale(mu, lo, hi)
        # brownian Salem fiber of Fourier dimension `dimension`
        levels = self.levels or default_brownian_levels(self.dimension)
        fill = max(1, self.atoms // 2 ** levels)
        seed_material = self.seed ^ seed_offset if self.per_direction_seeds else self.seed
        img = brownian_image_1d(
            ifs_measure(two_branch_spec(self.dimension / 2.0, levels), fill=fill),
            self.dimension, seed_material)
        return rescale(img, lo, hi)


# ---------------------------------------------------------------------------
# Brownian paths and Salem images

BROWNIAN_STEPS = 1 << 20
MIN_BROWNIAN_STEPS = 1 << 14


def default_brownian_levels(target_dim: float) -> int:
    """Deepest cylinder level of the input set whose scale stays above the
    resolution a sampled Brownian path can honestly render."""
    spec = two_branch_spec(target_dim / 2.0, 1)
    per_level = math.log(1.0 / spec.ratio)
    budget = math.log(BROWNIAN_STEPS) * 0.8
    return max(1, int(budget / per_level))


def brownian_path(steps: int, seed, dim: int) -> np.ndarray:
    """Sampled Wiener path on [0, 1]: (steps + 1, dim) positions starting
    at the origin, Gaussian increments of variance 1/steps per step."""
    if steps < MIN_BROWNIAN_STEPS:
        raise PreconditionError(
            f"path resolution {steps} is below the minimum {MIN_BROWNIAN_STEPS}")
    rng = np.random.default_rng(seed)
    inc = rng.normal(0.0, math.sqrt(1.0 / steps), size=(steps, dim))
    w = np.vstack([np.zeros((1, dim)), np.cumsum(inc, axis=0)])
    return w


def _interp_path(path: np.ndarray, params: np.ndarray) -> np.ndarray:
    steps = path.shape[0] - 1
    t = np.clip(params, 0.0, 1.0) * steps
    return np.column_stack([
        np.interp(t, np.arange(steps + 1, dtype=np.float64), path[:, k])
        for k in range(path.shape[1])
    ])


def brownian_image(A: DiscreteMeasure, target_dim: float, seed,
                   steps: int = BROWNIAN_STEPS) -> DiscreteMeasure:
    """Planar Brownian image of a 1-D set: almost surely a Salem measure
    of Fourier = Hausdorff = box dimension equal to target_dim when A has
    dimension target_dim / 2.

    A must be supported in [0, 1]; atoms are pushed through a linearly
    interpolated sampled path, weights preserved.
    """
    if A.dim != 1:
        raise ConfigError("brownian_image expects a 1-D input measure")
    if not (0.0 < target_dim <= 2.0):
        raise ConfigError("target dimension must lie in (0, 2]")
    path = brownian_path(steps, seed, 2)
    pts = _interp_path(path, A.points[:, 0])
    return measure_from_points(A.weights.copy(), pts)


def brownian_image_1d(A: DiscreteMeasure, target_dim: float, seed,
                      steps: int = BROWNIAN_STEPS) -> DiscreteMeasure:
    """1-D Brownian image of A, affinely rescaled into [0, 1]; the Salem
    fiber generator (target Fourier dimension = target_dim needs A of
    dimension target_dim / 2)."""
    if A.dim != 1:
        raise ConfigError("brownian_image_1d expects a 1-D input measure")
    if not (0.0 < target_dim <= 1.0):
        raise ConfigError("target dimension must lie in (0, 1]")
    path = brownian_path(steps, seed, 1)
    pts = _interp_path(path, A.points[:, 0])
    img = measure_from_points(A.weights.copy(), pts)
    return rescale(img, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Kakeya-type assemblies

@dataclass(frozen=True)
class KakeyaSpec:
    """Direction measure + fiber rule + base-point rule.

    base_rule is None for the shared-origin (radial) configuration, or a
    callable mapping the (n_dir,) angle array to (n_dir, 2) base points.
    """

    directions: DiscreteMeasure
    fiber: FiberRule = field(default_factory=FiberRule)
    base_rule: object = None

    def __post_init__(self):
        if self.directions.dim != 1:
            raise ConfigError("directions must be a 1-D angle measure")
        if not np.isclose(self.directions.total_mass, 1.0, rtol=1e-9):
            raise ConfigError("direction measure must have mass 1")


def kakeya_measure(spec: KakeyaSpec) -> DiscreteMeasure:
    """Assemble the weighted union of fibers over the direction set.

    Atom (i, j) sits at base_i + r_j * (cos theta_i, sin theta_i) with
    weight w_dir_i * w_fib_j; total mass is the direction mass times the
    fiber mass. Atoms carry provenance tags (direction index, fiber
    parameter) so support membership can be audited.
    """
    thetas = spec.directions.points[:, 0]
    wd = spec.directions.weights
    n_dir = thetas.size
    per_dir = spec.fiber.per_direction_seeds and spec.fiber.kind == "brownian"
    fibers = [spec.fiber.build(i) for i in range(n_dir)] if per_dir \
        else [spec.fiber.build()] * n_dir
    n_fib = fibers[0].n_atoms
    if n_dir * n_fib > PRODUCT_ATOM_CAP:
        raise PreconditionError(
            f"assembly would have {n_dir * n_fib} atoms, cap is {PRODUCT_ATOM_CAP}")
    if spec.base_rule is None:
        bases = np.zeros((n_dir, 2))
    else:
        bases = np.asarray(spec.base_rule(thetas), dtype=np.float64)
        if bases.shape != (n_dir, 2):
            raise ConfigError("base_rule must return one planar point per direction")
    e = np.column_stack([np.cos(thetas), np.sin(thetas)])
    r = np.stack([f.points[:, 0] for f in fibers])          # (n_dir, n_fib)
    wf = np.stack([f.weights for f in fibers])
    pts = bases[:, None, :] + r[:, :, None] * e[:, None, :]
    w = (wd[:, None] * wf).ravel()
    tags = {
        "direction_index": np.repeat(np.arange(n_dir), n_fib),
        "theta": np.repeat(thetas, n_fib),
        "fiber_r": r.ravel(),
        "base": bases,
    }
    if not per_dir:
        tags["segments"] = {"bases": bases, "dirs": e, "dir_weights": wd.copy(),
                            "fiber_r": fibers[0].points[:, 0].copy(),
                            "fiber_w": fibers[0].weights.copy()}
    return measure_from_points(w, pts.reshape(-1, 2), tags=tags)


def radial_kakeya(directions: DiscreteMeasure, fiber_atoms: int,
                  fiber_profile: str = "uniform") -> DiscreteMeasure:
    """Shared-origin configuration: every segment starts at 0 and runs to
    radius 1 in its direction. fiber_profile picks "uniform" or "smooth"
    weights on the full [0, 1] fiber."""
    if fiber_profile not in ("uniform", "smooth"):
        raise ConfigError("radial fibers are full intervals: uniform or smooth")
    return kakeya_measure(KakeyaSpec(
        directions=directions,
        fiber=FiberRule(kind=fiber_profile, atoms=fiber_atoms)))


def product_kakeya(X1: DiscreteMeasure, vertical_atoms: int = 1024,
                   predicted_dim: float = None) -> DiscreteMeasure:
    """X1 x uniform[0, 1]: vertical segments over a 1-D set. The measured
    decay dimension of the product equals that of X1 (the vertical factor
    contributes no decay along the horizontal frequency axis); pass the
    factor's known or measured decay dimension to record it on the tags."""
    if X1.dim != 1:
        raise ConfigError("product_kakeya expects a 1-D factor")
    if not np.isclose(X1.total_mass, 1.0, rtol=1e-9):
        raise ConfigError("factor must have mass 1")
    mu = product_measure(X1, uniform_interval_measure(0.0, 1.0, vertical_atoms))
    if predicted_dim is not None:
        mu.tags["predicted_fourier_dim"] = float(predicted_dim)
    return mu


# ---------------------------------------------------------------------------
# line families and Furstenberg assemblies

@dataclass(frozen=True)
class LineFamily:
    """Weighted lines (theta, a): the line {x : x . (-sin t, cos t) = a}
    with direction (cos t, sin t) and perpendicular foot a * (-sin t, cos t)."""

    thetas: np.ndarray
    offsets: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(np.asarray(self.thetas, dtype=np.float64))
        a = np.ascontiguousarray(np.asarray(self.offsets, dtype=np.float64))
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        if not (t.shape == a.shape == w.shape) or t.ndim != 1 or t.size == 0:
            raise ConfigError("thetas, offsets, weights must be equal-length 1-D arrays")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(a)) and np.all(np.isfinite(w))):
            raise ConfigError("non-finite line parameter")
        if np.any(w <= 0):
            raise ConfigError("line weights must be positive")
        if np.any((t < 0) | (t >= math.pi)):
            raise ConfigError("line angles must lie in [0, pi)")
        if np.any(np.abs(a) > MAX_LINE_OFFSET):
            raise ConfigError(f"line offsets must satisfy |a| <= {MAX_LINE_OFFSET}")
        object.__setattr__(self, "thetas", t)
        object.__setattr__(self, "offsets", a)
        object.__setattr__(self, "weights", w)

    @property
    def n_lines(self) -> int:
        return self.thetas.size

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def directions(self) -> np.ndarray:
        return np.column_stack([np.cos(self.thetas), np.sin(self.thetas)])

    def base_points(self) -> np.ndarray:
        return self.offsets[:, None] * np.column_stack(
            [-np.sin(self.thetas), np.cos(self.thetas)])

    def as_parameter_measure(self) -> DiscreteMeasure:
        """The family as a planar measure on (theta, a) parameter space."""
        return measure_from_points(self.weights.copy(),
                                   np.column_stack([self.thetas, self.offsets]))


def line_family_from_measure(mu: DiscreteMeasure) -> LineFamily:
    """Interpret a planar measure's atoms as (theta, a) line parameters."""
    if mu.dim != 2:
        raise ConfigError("need a planar parameter measure")
    return LineFamily(mu.points[:, 0], mu.points[:, 1], mu.weights.copy())


def furstenberg_measure(family: LineFamily, fiber: FiberRule) -> DiscreteMeasure:
    """Weighted union of fiber measures along the family's lines.

    Fibers are normalized to unit mass before gluing, so the total mass
    equals the family mass exactly. Atoms sit at a_l + r e_l.
    """
    if family.n_lines == 0:
        raise ConfigError("empty line family")
    nu = fiber.build()
    nu_w = nu.weights / nu.total_mass
    n = family.n_lines * nu.n_atoms
    if n > PRODUCT_ATOM_CAP:
        raise PreconditionError(f"assembly would have {n} atoms, cap is {PRODUCT_ATOM_CAP}")
    e = family.directions()
    bases = family.base_points()
    r = nu.points[:, 0]
    pts = bases[:, None, :] + r[None, :, None] * e[:, None, :]
    w = (family.weights[:, None] * nu_w[None, :]).ravel()
    tags = {"line_index": np.repeat(np.arange(family.n_lines), nu.n_atoms),
            "fiber_r": np.tile(r, family.n_lines),
            "segments": {"bases": bases, "dirs": e,
                         "dir_weights": family.weights.copy(),
                         "fiber_r": r.copy(), "fiber_w": nu_w.copy()}}
    return measure_from_points(w, pts.reshape(-1, 2), tags=tags)


def strip_mass(family: LineFamily, xi, alpha: float) -> float:
    """Mass of the lines whose direction is nearly orthogonal to xi:
    sum of weights over {l : |e_l . xi| < alpha |xi|}."""
    xi = np.asarray(xi, dtype=np.float64)
    norm = float(np.sqrt(np.sum(xi ** 2)))
    if norm == 0.0:
        raise ConfigError("zero frequency has no strip")
    if not (0.0 < alpha < 1.0):
        raise ConfigError("alpha must lie in (0, 1)")
    dots = np.abs(family.directions() @ xi)
    return float(family.weights[dots < alpha * norm].sum())
