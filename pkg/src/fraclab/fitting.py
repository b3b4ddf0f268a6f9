"""Log-log slope fitting shared by every dimension estimator."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DimensionEstimate:
    """Fitted power-law exponent together with its dimension reading.

    slope      : least-squares slope of the log-log pairs fed to the fit
    dim_value  : the dimension implied by the slope, clamped to
                 [0, ambient_dim] (the clamping rule depends on the
                 estimator: Fourier dims use -2 * slope, Frostman and box
                 dims use the slope itself)
    residual   : root-mean-square residual of the log fit
    scale_window : (low, high) range of scales or radii actually used
    kind       : "fourier" | "frostman" | "box"
    ambient_dim : dimension of the ambient space
    extras     : estimator-specific numbers (e.g. sliding-window box slopes)
    """

    slope: float
    dim_value: float
    residual: float
    scale_window: tuple
    kind: str
    ambient_dim: int
    extras: dict = None

    def summary_line(self) -> str:
        lo, hi = self.scale_window
        return (f"{self.kind},{self.dim_value:.17g},{self.slope:.17g},"
                f"{self.residual:.17g},{lo:.17g},{hi:.17g}")

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "dim_value": self.dim_value,
            "slope": self.slope,
            "residual": self.residual,
            "scale_window": [self.scale_window[0], self.scale_window[1]],
            "ambient_dim": self.ambient_dim,
        }
        if self.extras:
            d["extras"] = {k: v for k, v in sorted(self.extras.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def loglog_fit(x: np.ndarray, y: np.ndarray):
    """Ordinary least squares of log(y) against log(x).

    Returns (slope, intercept, rms_residual). Inputs must be positive.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs strictly positive data")
    lx = np.log(x)
    ly = np.log(y)
    if lx.size < 2:
        raise ValueError("need at least two points to fit a slope")
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    res = ly - (slope * lx + intercept)
    rms = float(np.sqrt(np.mean(res ** 2)))
    return slope, intercept, rms


def clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)
