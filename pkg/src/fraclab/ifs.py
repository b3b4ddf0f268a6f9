"""Self-similar (Cantor-type) measures from equicontractive IFSs.

An IfsSpec describes m branches of common ratio r with translations chosen
so the children of [0, 1] are pairwise disjoint (open set condition). The
level-L measure puts one atom at the midpoint of every level-L cylinder,
weighted by the product of branch probabilities along its address. With
equal probabilities this is the natural self-similar measure, whose
similarity dimension log m / log(1/r) equals its Hausdorff dimension.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .measures import DiscreteMeasure, measure_from_points

PROB_TOL = 1e-12


@dataclass(frozen=True)
class IfsSpec:
    branch_count: int
    ratio: float
    translations: tuple
    probabilities: tuple
    levels: int

    def __post_init__(self):
        m = self.branch_count
        r = self.ratio
        if m < 2:
            raise ConfigError("need at least two branches")
        if not (0.0 < r < 1.0):
            raise ConfigError("contraction ratio must lie in (0, 1)")
        if m * r > 1.0 + 1e-15:
            raise ConfigError("m * r must not exceed 1 (children cannot fit)")
        t = np.asarray(self.translations, dtype=np.float64)
        p = np.asarray(self.probabilities, dtype=np.float64)
        if t.shape != (m,) or p.shape != (m,):
            raise ConfigError("need one translation and one probability per branch")
        if np.any(p <= 0):
            raise ConfigError("branch probabilities must be positive")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ConfigError(f"probabilities sum to {p.sum()!r}, not 1")
        if np.any(t < -1e-15) or np.any(t + r > 1.0 + 1e-15):
            raise ConfigError("children must lie inside [0, 1]")
        order = np.argsort(t)
        ts = t[order]
        if np.any(ts[1:] - (ts[:-1] + r) < -1e-15):
            raise ConfigError("children overlap; open set condition fails")
        if self.levels < 1:
            raise ConfigError("need at least one level")
        s = self.similarity_dimension
        if not (0.0 < s <= 1.0 + 1e-12):
            raise ConfigError(f"similarity dimension {s} outside (0, 1]")
        object.__setattr__(self, "translations", tuple(float(x) for x in t))
        object.__setattr__(self, "probabilities", tuple(float(x) for x in p))

    @property
    def similarity_dimension(self) -> float:
        return math.log(self.branch_count) / math.log(1.0 / self.ratio)

    def to_json(self) -> str:
        return json.dumps({
            "branch_count": self.branch_count,
            "ratio": self.ratio,
            "translations": list(self.translations),
            "probabilities": list(self.probabilities),
            "levels": self.levels,
        })

    @staticmethod
    def from_dict(d: dict) -> "IfsSpec":
        try:
            return IfsSpec(
                branch_count=int(d["branch_count"]),
                ratio=float(d["ratio"]),
                translations=tuple(d["translations"]),
                probabilities=tuple(d["probabilities"]),
                levels=int(d["levels"]),
            )
        except KeyError as exc:
            raise ConfigError(f"IFS spec missing field {exc}") from exc


def middle_third_spec(levels: int) -> IfsSpec:
    """The classical two-branch ratio-1/3 system with children {0, 2/3}."""
    return IfsSpec(2, 1.0 / 3.0, (0.0, 2.0 / 3.0), (0.5, 0.5), levels)


def two_branch_spec(dimension: float, levels: int) -> IfsSpec:
    """Two equal branches at the interval ends with prescribed similarity
    dimension: ratio 2^(-1/dimension), translations {0, 1 - r}."""
    if not (0.0 < dimension <= 1.0):
        raise ConfigError("dimension must lie in (0, 1]")
    r = 2.0 ** (-1.0 / dimension)
    if 2 * r > 1.0:
        # dimension 1 gives r = 1/2 exactly; anything above is impossible
        r = 0.5
    return IfsSpec(2, r, (0.0, 1.0 - r), (0.5, 0.5), levels)


def ifs_measure(spec: IfsSpec, fill: int = 1) -> DiscreteMeasure:
    """Level-L cylinder-midpoint measure of a self-similar system.

    With fill=1 (the default) the result has m^L atoms, one at each
    level-L cylinder midpoint, carrying the product of branch
    probabilities along its address. fill > 1 subdivides every cylinder
    into that many equal uniform sub-atoms; the measure agrees with the
    fill=1 one above the cylinder scale but has a lower atomization floor.
    Total mass is exactly 1.
    """
    if fill < 1:
        raise ConfigError("fill must be >= 1")
    r, L = spec.ratio, spec.levels
    t = np.asarray(spec.translations)
    p = np.asarray(spec.probabilities)
    lefts = np.array([0.0])
    weights = np.array([1.0])
    scale = 1.0
    for _ in range(L):
        lefts = (lefts[:, None] + scale * t[None, :]).ravel()
        weights = (weights[:, None] * p[None, :]).ravel()
        scale *= r
    width = r ** L
    if fill == 1:
        pts = lefts + 0.5 * width
        w = weights
    else:
        sub = (np.arange(fill) + 0.5) * (width / fill)
        pts = (lefts[:, None] + sub[None, :]).ravel()
        w = np.repeat(weights / fill, fill)
    order = np.argsort(pts, kind="stable")
    return measure_from_points(w[order], pts[order][:, None],
                               bbox=np.array([[0.0, 1.0]]))


def rescale(mu: DiscreteMeasure, lo: float, hi: float) -> DiscreteMeasure:
    """Affinely map a 1-D measure's bounding box onto [lo, hi]."""
    if mu.dim != 1:
        raise ConfigError("rescale expects a 1-D measure")
    a, b = mu.bbox[0]
    span = b - a
    if span <= 0:
        pts = np.full_like(mu.points, 0.5 * (lo + hi))
    else:
        pts = lo + (mu.points - a) * (hi - lo) / span
    return measure_from_points(mu.weights.copy(), pts,
                               bbox=np.array([[lo, hi]]), tags=mu.tags)
