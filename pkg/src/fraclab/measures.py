"""Finite weighted atom sets in dimension 1 or 2.

Every measure this package manipulates (fiber measures, direction measures,
the assembled planar sets, random Salem measures) is represented the same
way: a list of positive weights attached to points inside a declared
bounding box. Constructions are exact on atoms -- pushforwards move points
and keep weights, products form the Cartesian product and multiply weights
-- so total mass is conserved to the last bit wherever the math says it
should be.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PreconditionError

# Hard ceiling on atoms produced by product-type constructions.
PRODUCT_ATOM_CAP = 4_000_000

# Declared bounding boxes may not exceed this side length.
MAX_BOX_SIDE = 16.0


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite positive measure given by weighted atoms.

    weights : (n,) positive floats
    points  : (n, dim) coordinates, dim in {1, 2}
    bbox    : (dim, 2) per-axis [lo, hi] bounds containing every atom
    tags    : optional provenance arrays (e.g. direction index and fiber
              parameter for assembled Kakeya measures); never serialized
    """

    weights: np.ndarray
    points: np.ndarray
    bbox: np.ndarray
    tags: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        p = np.asarray(self.points, dtype=np.float64)
        if p.ndim == 1:
            p = p[:, None]
        p = np.ascontiguousarray(p)
        if p.ndim != 2 or p.shape[1] not in (1, 2):
            raise ConfigError(f"points must be (n, 1) or (n, 2), got {p.shape}")
        if w.shape != (p.shape[0],):
            raise ConfigError("weights and points disagree on atom count")
        if w.size == 0:
            raise ConfigError("a measure needs at least one atom")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(p)):
            raise ConfigError("non-finite weight or coordinate")
        if np.any(w <= 0):
            raise ConfigError("weights must be strictly positive")
        b = np.asarray(self.bbox, dtype=np.float64)
        if b.shape != (p.shape[1], 2):
            raise ConfigError(f"bbox must be ({p.shape[1]}, 2), got {b.shape}")
        sides = b[:, 1] - b[:, 0]
        if np.any(sides < 0) or np.any(sides > MAX_BOX_SIDE):
            raise ConfigError(f"bounding box sides must lie in [0, {MAX_BOX_SIDE}]")
        eps = 1e-12 * max(1.0, float(np.max(np.abs(b))))
        if np.any(p < b[:, 0] - eps) or np.any(p > b[:, 1] + eps):
            raise ConfigError("atoms outside the declared bounding box")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "bbox", b)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.points.shape[0]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def coords(self, axis: int = 0) -> np.ndarray:
        return self.points[:, axis]

    def diameter(self) -> float:
        """Diameter of the declared bounding box."""
        return float(np.sqrt(np.sum((self.bbox[:, 1] - self.bbox[:, 0]) ** 2)))

    def finest_spacing(self) -> float:
        """Smallest positive nearest-neighbour distance between atoms.

        This is the atomization scale: below roughly 4x this distance the
        atom set stops imitating its continuous target and every estimator
        in the package refuses to look. Returns 0.0 for a single atom or
        when atoms coincide.
        """
        if self.n_atoms < 2:
            return 0.0
        if self.dim == 1:
            xs = np.sort(self.points[:, 0])
            gaps = np.diff(xs)
            gaps = gaps[gaps > 0]
            return float(gaps.min()) if gaps.size else 0.0
        from scipy.spatial import cKDTree

        tree = cKDTree(self.points)
        d, _ = tree.query(self.points, k=2)
        nn = d[:, 1]
        nn = nn[nn > 0]
        return float(nn.min()) if nn.size else 0.0


def tight_bbox(points: np.ndarray, pad: float = 0.0) -> np.ndarray:
    p = np.asarray(points, dtype=np.float64)
    if p.ndim == 1:
        p = p[:, None]
    if p.shape[0] == 0:
        raise ConfigError("a measure needs at least one atom")
    lo = p.min(axis=0) - pad
    hi = p.max(axis=0) + pad
    return np.stack([lo, hi], axis=1)


def measure_from_points(weights, points, bbox=None, tags=None) -> DiscreteMeasure:
    """Assemble a measure, inferring a tight bounding box when none is given."""
    if bbox is None:
        bbox = tight_bbox(points)
    return DiscreteMeasure(np.asarray(weights, dtype=np.float64),
                           np.asarray(points, dtype=np.float64),
                           np.asarray(bbox, dtype=np.float64), tags)


def uniform_interval_measure(a: float, b: float, n: int) -> DiscreteMeasure:
    """Unit-mass discretization of Lebesgue measure on [a, b].

    n equal atoms sit at the midpoints of an n-part partition, so the k-th
    atom is at a + (k + 1/2)(b - a)/n with weight 1/n.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ConfigError("interval endpoints must be finite")
    if not a < b:
        raise ConfigError(f"need a < b, got [{a}, {b}]")
    if n < 1:
        raise ConfigError("need at least one atom")
    k = np.arange(n, dtype=np.float64)
    pts = a + (k + 0.5) * (b - a) / n
    w = np.full(n, 1.0 / n)
    return measure_from_points(w, pts[:, None], bbox=np.array([[a, b]]))


def dirac(point) -> DiscreteMeasure:
    """Unit point mass."""
    p = np.atleast_1d(np.asarray(point, dtype=np.float64))
    return measure_from_points(np.array([1.0]), p[None, :])


def pushforward(mu: DiscreteMeasure, f, bbox=None) -> DiscreteMeasure:
    """Image measure under a pointwise map.

    f receives the (n, dim) point array and must return (n,), (n, 1) or
    (n, 2) image coordinates, finite at every atom. Weights are untouched,
    so total mass is preserved exactly.
    """
    img = np.asarray(f(mu.points), dtype=np.float64)
    if img.ndim == 1:
        img = img[:, None]
    if img.shape[0] != mu.n_atoms:
        raise ConfigError("map must return one image point per atom")
    if not np.all(np.isfinite(img)):
        raise ConfigError("map produced a non-finite image point")
    return measure_from_points(mu.weights.copy(), img, bbox=bbox, tags=mu.tags)


def product_measure(mu1: DiscreteMeasure, mu2: DiscreteMeasure) -> DiscreteMeasure:
    """Product of two 1-D measures as a planar measure.

    Atoms are the Cartesian product of the factors' atoms and weights
    multiply, so the total mass is the product of the factor masses. The
    factors are remembered in the tags so transform evaluation can use
    the exact factorization mu_hat(xi) = mu1_hat(xi_1) * mu2_hat(xi_2).
    """
    if mu1.dim != 1 or mu2.dim != 1:
        raise ConfigError("product_measure expects two 1-dimensional measures")
    n = mu1.n_atoms * mu2.n_atoms
    if n > PRODUCT_ATOM_CAP:
        raise PreconditionError(
            f"product would have {n} atoms, cap is {PRODUCT_ATOM_CAP}")
    x = np.repeat(mu1.points[:, 0], mu2.n_atoms)
    y = np.tile(mu2.points[:, 0], mu1.n_atoms)
    w = np.repeat(mu1.weights, mu2.n_atoms) * np.tile(mu2.weights, mu1.n_atoms)
    bbox = np.array([[mu1.bbox[0, 0], mu1.bbox[0, 1]],
                     [mu2.bbox[0, 0], mu2.bbox[0, 1]]])
    return DiscreteMeasure(w, np.column_stack([x, y]), bbox,
                           tags={"product_factors": (mu1, mu2)})


# ---------------------------------------------------------------------------
# measure file format: header "dim=<1|2> mass=<m> n=<count>", then one atom
# per line "weight x [y]" with 17 significant digits.

def save_measure(mu: DiscreteMeasure, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"dim={mu.dim} mass={mu.total_mass:.17g} n={mu.n_atoms}\n")
        cols = [mu.weights] + [mu.points[:, k] for k in range(mu.dim)]
        np.savetxt(fh, np.column_stack(cols), fmt="%.17g")


def load_measure(path) -> DiscreteMeasure:
    with open(path) as fh:
        header = fh.readline().strip()
        body = fh.read()
    fields = {}
    for tok in header.split():
        if "=" not in tok:
            raise ConfigError(f"bad measure header token {tok!r}")
        k, v = tok.split("=", 1)
        fields[k] = v
    try:
        dim = int(fields["dim"])
        mass = float(fields["mass"])
        n = int(fields["n"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad measure header {header!r}: {exc}") from exc
    if dim not in (1, 2):
        raise ConfigError(f"unsupported dimension {dim}")
    data = np.loadtxt(io.StringIO(body), dtype=np.float64, ndmin=2)
    if data.shape != (n, 1 + dim):
        raise ConfigError(
            f"expected {n} rows of {1 + dim} columns, got {data.shape}")
    mu = measure_from_points(data[:, 0], data[:, 1:])
    if not np.isclose(mu.total_mass, mass, rtol=1e-12, atol=0):
        raise ConfigError("measure file mass does not match atom weights")
    return mu
