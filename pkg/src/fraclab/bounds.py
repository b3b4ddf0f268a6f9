"""Closed-form dimension thresholds for the three configuration regimes,
plus published comparison curves and table generation for plots.

Regimes: "kakeya" (direction set measured by Hausdorff dimension, fibers
by Fourier dimension), "ff" (line family and fibers both by Fourier
dimension), "fh" (line family by Hausdorff, fibers by Fourier; the
threshold is exactly 0 for family dimension at most 1 and jumps at 1).
All formulas are rational in (s, t) and evaluated directly in double
precision; parameter domains are enforced strictly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

REGIMES = ("kakeya", "ff", "fh")


@dataclass(frozen=True)
class ThresholdPoint:
    s: float
    t: float
    lower: float
    upper: float
    regime: str

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 2.0):
            raise ConfigError(
                f"bounds out of order at ({self.s}, {self.t}): "
                f"{self.lower} > {self.upper}")


def _check_s(s: float) -> None:
    if not (0.0 < s <= 1.0):
        raise ConfigError(f"s={s} outside (0, 1]")


def _check_t(t: float, hi: float) -> None:
    if not (0.0 < t <= hi):
        raise ConfigError(f"t={t} outside (0, {hi}]")


def kakeya_bounds(s: float, t: float) -> tuple:
    """Threshold bounds for (s, t) radial/segment configurations:
    lower 2st/(s+2t), upper min(s, 2t); s, t in (0, 1]."""
    _check_s(s)
    _check_t(t, 1.0)
    return 2.0 * s * t / (s + 2.0 * t), min(s, 2.0 * t)


def ff_bounds(s: float, t: float) -> tuple:
    """Pure-Fourier line-family bounds: lower st/(s+t), upper min(s, 2t);
    s in (0, 1], t in (0, 2]."""
    _check_s(s)
    _check_t(t, 2.0)
    return s * t / (s + t), min(s, 2.0 * t)


def fh_bounds(s: float, t: float) -> tuple:
    """Mixed Fourier/Hausdorff line-family bounds: exactly (0, 0) for
    t <= 1; lower 2s(t-1)/(s+2(t-1)), upper s for 1 < t <= 2."""
    _check_s(s)
    _check_t(t, 2.0)
    if t <= 1.0:
        return 0.0, 0.0
    u = t - 1.0
    return 2.0 * s * u / (s + 2.0 * u), s


_BOUNDS = {"kakeya": kakeya_bounds, "ff": ff_bounds, "fh": fh_bounds}


def threshold_point(regime: str, s: float, t: float) -> ThresholdPoint:
    if regime not in _BOUNDS:
        raise ConfigError(f"unknown regime {regime!r}; pick one of {REGIMES}")
    lo, hi = _BOUNDS[regime](s, t)
    return ThresholdPoint(s=s, t=t, lower=lo, upper=hi, regime=regime)


def reference_curves(s: float, t: float) -> dict:
    """Published comparison values for plot overlays: the sharp Hausdorff
    threshold min(s+t, (3s+t)/2, s+1) and the sharp box/packing
    thresholds max(s, t-1) and max(s, t/2)."""
    _check_s(s)
    _check_t(t, 2.0)
    return {
        "ren_wang": min(s + t, (3.0 * s + t) / 2.0, s + 1.0),
        "fraser_box": max(s, t - 1.0),
        "fraser_packing": max(s, t / 2.0),
    }


def t_domain_max(regime: str) -> float:
    return 1.0 if regime == "kakeya" else 2.0


def bound_table(regime: str, s_grid, t_grid) -> list:
    """Rows (s, t, lower, upper) over the grid, with inline consistency
    checks: lower <= upper everywhere and lower bounds non-decreasing in
    both parameters along the grid."""
    s_grid = [float(v) for v in s_grid]
    t_grid = [float(v) for v in t_grid]
    if not s_grid or not t_grid:
        raise ConfigError("empty parameter grid")
    rows = []
    for s in s_grid:
        for t in t_grid:
            p = threshold_point(regime, s, t)
            rows.append((p.s, p.t, p.lower, p.upper))
    # monotone consistency along each axis
    by_s = {}
    for s, t, lo, hi in rows:
        by_s.setdefault(s, []).append((t, lo))
    for s, seq in by_s.items():
        seq.sort()
        for (t0, l0), (t1, l1) in zip(seq, seq[1:]):
            if l1 < l0 - 1e-12:
                raise ConfigError(f"lower bound decreased in t at s={s}: "
                                  f"{l0} -> {l1}")
    by_t = {}
    for s, t, lo, hi in rows:
        by_t.setdefault(t, []).append((s, lo))
    for t, seq in by_t.items():
        seq.sort()
        for (s0, l0), (s1, l1) in zip(seq, seq[1:]):
            if l1 < l0 - 1e-12:
                raise ConfigError(f"lower bound decreased in s at t={t}: "
                                  f"{l0} -> {l1}")
    return rows


def table_to_csv(rows) -> str:
    lines = ["s,t,lower,upper"]
    for s, t, lo, hi in rows:
        lines.append(f"{s:.17g},{t:.17g},{lo:.17g},{hi:.17g}")
    return "\n".join(lines) + "\n"
