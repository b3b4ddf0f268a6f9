"""Orchestrated experiments: build a construction, estimate its dimensions,
compare against predicted values and threshold bounds, and emit verdicts.

Every experiment is a declarative ExperimentConfig naming a registered
construction, the estimator plans to run, and a list of checks. Stochastic
constructions run once per seed and checks apply to the seed-median, which
is the honest finite-sample reading of almost-sure dimension statements.
Deterministic constructions run once.

Reports state explicitly that Fourier readings are measure-decay
dimensions: the decay of the one measure we built, hence a lower bound for
the Fourier dimension of its support, over the finite window the atom
budget supports. Whether a better measure lives on the same support is not
empirically decidable.

Verdict JSON is canonical (sorted keys, repr floats, no timing fields), so
identical configs and seeds reproduce identical bytes at any thread count.
Wall-clock times are reported separately.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bounds import threshold_point
from .constructions import (FiberRule, KakeyaSpec, LineFamily, arc_directions,
                            brownian_image, brownian_image_1d, cantor_directions,
                            default_brownian_levels, furstenberg_measure,
                            kakeya_measure, product_kakeya, radial_kakeya,
                            strip_mass)
from .errors import ConfigError, FraclabError
from .estimators import box_counting, frostman_exponent
from .fitting import loglog_fit
from .fourier import FrequencyPlan, estimate_fourier_dim, verify_frostman_from_decay
from .ifs import ifs_measure, middle_third_spec, two_branch_spec
from .measures import dirac, uniform_interval_measure

MEASURE_DECAY_NOTE = ("fourier readings are measure-decay dimensions: lower "
                      "bounds for the support's Fourier dimension over the "
                      "finite frequency window")

# Fitted-slope slack allowed between a construction's measured decay
# dimension and the regime's theoretical lower bound (absorbs
# discretization and envelope-sampling error).
SANDWICH_SLACK = 0.25


# ---------------------------------------------------------------------------
# construction registry

def _build_uniform(params, seed):
    return uniform_interval_measure(0.0, 1.0, int(params.get("atoms", 10_000)))


def _build_cantor(params, seed):
    return ifs_measure(middle_third_spec(int(params.get("levels", 12))))


def _build_dirac(params, seed):
    return dirac(params.get("point", [0.0]))


def _build_radial_arc(params, seed):
    dirs = arc_directions(int(params.get("directions", 512)),
                          taper=params.get("taper", "none"))
    return radial_kakeya(dirs, int(params.get("fiber_atoms", 1024)),
                         fiber_profile=params.get("fiber_profile", "uniform"))


def _build_radial_cantor(params, seed):
    dirs = cantor_directions(float(params["t"]), int(params["levels"]))
    return kakeya_measure(KakeyaSpec(
        directions=dirs,
        fiber=FiberRule(kind=params.get("fiber_profile", "smooth"),
                        atoms=int(params.get("fiber_atoms", 1024)))))


def _build_product_salem(params, seed):
    s = float(params["s"])
    levels = int(params.get("levels", 0)) or default_brownian_levels(s)
    fill = max(1, int(params.get("factor_atoms", 4096)) // 2 ** levels)
    A = ifs_measure(two_branch_spec(s / 2.0, levels), fill=fill)
    X1 = brownian_image_1d(A, s, seed)
    return product_kakeya(X1, vertical_atoms=int(params.get("vertical_atoms", 515)))


def _build_fh_zero(params, seed):
    offsets = ifs_measure(middle_third_spec(int(params.get("levels", 10))))
    fam = LineFamily(np.zeros(offsets.n_atoms), offsets.points[:, 0],
                     offsets.weights.copy())
    return furstenberg_measure(
        fam, FiberRule(kind="uniform", atoms=int(params.get("fiber_atoms", 1024))))


def _build_brownian_planar(params, seed):
    t = float(params["t"])
    levels = int(params.get("levels", 0)) or default_brownian_levels(t)
    fill = max(1, int(params.get("factor_atoms", 4096)) // 2 ** levels)
    A = ifs_measure(two_branch_spec(t / 2.0, levels), fill=fill)
    return brownian_image(A, t, seed)


def _build_cantor_line_family(params, seed):
    levels = int(params.get("levels", 7))
    th = ifs_measure(middle_third_spec(levels))
    off = ifs_measure(middle_third_spec(levels))
    thetas = np.repeat(th.points[:, 0], off.n_atoms) * math.pi * (1.0 - 1e-12)
    offs = np.tile(off.points[:, 0], th.n_atoms)
    w = np.repeat(th.weights, off.n_atoms) * np.tile(off.weights, th.n_atoms)
    return LineFamily(thetas, offs, w)


CONSTRUCTIONS = {
    "uniform-interval": _build_uniform,
    "middle-third-cantor": _build_cantor,
    "dirac": _build_dirac,
    "radial-arc": _build_radial_arc,
    "radial-cantor": _build_radial_cantor,
    "product-salem": _build_product_salem,
    "fh-zero": _build_fh_zero,
    "brownian-planar": _build_brownian_planar,
    "cantor-line-family": _build_cantor_line_family,
}

STOCHASTIC = {"product-salem", "brownian-planar"}


# ---------------------------------------------------------------------------
# experiment configuration

@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a construction, estimator settings, and checks.

    checks: list of dicts, each one of
      {"estimator": "fourier"|"frostman"|"box", "type": "within",
       "target": x, "tol": d}
      {"estimator": ..., "type": "at_least"|"at_most", "target": x}
      {"type": "sandwich", "regime": r, "s": s, "t": t}
      {"type": "ball_ratio_stable"|"ball_ratio_unstable", "alpha": a,
       "scale_range": [lo, hi]}
      {"type": "strip_slope_at_least", "target": x, "alpha_range": [k_lo, k_hi],
       "xi": [x, y]}
    """

    experiment_id: str
    construction: str
    params: dict = field(default_factory=dict)
    plan: dict = None
    frostman: dict = None
    box: dict = None
    checks: tuple = ()
    seeds: tuple = ()
    expect_fail: bool = False

    def __post_init__(self):
        if self.construction not in CONSTRUCTIONS:
            raise ConfigError(f"unknown construction {self.construction!r}")
        if self.construction in STOCHASTIC and not self.seeds:
            raise ConfigError(
                f"{self.construction} is stochastic and needs explicit seeds")
        object.__setattr__(self, "checks", tuple(dict(c) for c in self.checks))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def to_dict(self) -> dict:
        d = {"experiment_id": self.experiment_id,
             "construction": self.construction,
             "params": self.params, "checks": list(self.checks),
             "seeds": list(self.seeds), "expect_fail": self.expect_fail}
        for k in ("plan", "frostman", "box"):
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        return d

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        try:
            return ExperimentConfig(
                experiment_id=str(d["experiment_id"]),
                construction=str(d["construction"]),
                params=dict(d.get("params", {})),
                plan=d.get("plan"), frostman=d.get("frostman"),
                box=d.get("box"), checks=tuple(d.get("checks", ())),
                seeds=tuple(d.get("seeds", ())),
                expect_fail=bool(d.get("expect_fail", False)))
        except KeyError as exc:
            raise ConfigError(f"experiment config missing field {exc}") from exc


@dataclass
class Verdict:
    experiment_id: str
    construction: str
    estimates: dict           # estimator -> {"median": x, "per_seed": [...], "residuals": [...]}
    checks: list              # check dict + {"passed": bool, "observed": x}
    passed: bool
    note: str
    wall_time: float

    def to_dict(self, canonical: bool = True) -> dict:
        d = {"experiment_id": self.experiment_id,
             "construction": self.construction,
             "estimates": self.estimates,
             "checks": self.checks,
             "passed": self.passed,
             "note": self.note}
        if not canonical:
            d["wall_time_s"] = round(self.wall_time, 3)
        return d

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(canonical=True), sort_keys=True)


def _median(vals):
    return float(np.median(np.asarray(vals, dtype=np.float64)))


def run_experiment(config: ExperimentConfig, threads=None) -> Verdict:
    """Build, estimate, check. Deterministic given config and seeds."""
    t_start = time.perf_counter()
    builder = CONSTRUCTIONS[config.construction]
    seeds = config.seeds or (None,)
    estimates = {}

    needs_measure = config.plan or config.frostman or config.box or any(
        c.get("type", "").startswith("ball_ratio") for c in config.checks)
    needs_family = any(c.get("type") == "strip_slope_at_least" for c in config.checks)

    built = [builder(config.params, seed) for seed in seeds] \
        if (needs_measure or needs_family) else []

    if config.plan is not None:
        vals, resid = [], []
        for obj in built:
            est = estimate_fourier_dim(obj, FrequencyPlan(**config.plan),
                                       threads=threads)
            vals.append(est.dim_value)
            resid.append(est.residual)
        estimates["fourier"] = {"median": _median(vals), "per_seed": vals,
                                "residuals": resid}
    for name, cfg, runner in (("frostman", config.frostman, frostman_exponent),
                              ("box", config.box, box_counting)):
        if cfg is not None:
            vals, resid = [], []
            for obj in built:
                est = runner(obj, tuple(cfg["scale_range"]),
                             base=float(cfg.get("base", 2.0)))
                vals.append(est.dim_value)
                resid.append(est.residual)
            estimates[name] = {"median": _median(vals), "per_seed": vals,
                               "residuals": resid}

    checks_out = []
    overall = True
    for check in config.checks:
        ctype = check.get("type")
        entry = dict(check)
        if ctype in ("within", "at_least", "at_most"):
            observed = estimates[check["estimator"]]["median"]
            if ctype == "within":
                ok = abs(observed - float(check["target"])) <= float(check["tol"])
            elif ctype == "at_least":
                ok = observed >= float(check["target"])
            else:
                ok = observed <= float(check["target"])
        elif ctype == "sandwich":
            point = threshold_point(check["regime"], float(check["s"]), float(check["t"]))
            observed = estimates["fourier"]["median"]
            ok = observed >= point.lower - SANDWICH_SLACK
            entry["bound_lower"] = point.lower
            entry["bound_upper"] = point.upper
        elif ctype in ("ball_ratio_stable", "ball_ratio_unstable"):
            res = [verify_frostman_from_decay(obj, float(check["alpha"]),
                                              tuple(check["scale_range"]))
                   for obj in built]
            spreads = [r.spread for r in res]
            observed = _median(spreads)
            stable = all(r.passed for r in res)
            ok = stable if ctype == "ball_ratio_stable" else not stable
        elif ctype == "strip_slope_at_least":
            k_lo, k_hi = check["alpha_range"]
            alphas = 2.0 ** -np.arange(int(k_lo), int(k_hi) + 1)
            slopes = []
            for fam in built:
                masses = np.array([strip_mass(fam, np.asarray(check["xi"], dtype=float), a)
                                   for a in alphas])
                slope, _, _ = loglog_fit(alphas, masses)
                slopes.append(slope)
            observed = _median(slopes)
            ok = observed >= float(check["target"])
        else:
            raise ConfigError(f"unknown check type {ctype!r}")
        entry["observed"] = observed
        entry["passed"] = bool(ok)
        checks_out.append(entry)
        overall = overall and ok

    return Verdict(experiment_id=config.experiment_id,
                   construction=config.construction,
                   estimates=estimates, checks=checks_out, passed=overall,
                   note=MEASURE_DECAY_NOTE,
                   wall_time=time.perf_counter() - t_start)


@dataclass
class SuiteReport:
    verdicts: list
    expected: list            # per-entry expect_fail flags
    wall_times: list

    @property
    def entries_ok(self) -> list:
        return [v.passed != e for v, e in zip(self.verdicts, self.expected)]

    @property
    def all_ok(self) -> bool:
        return all(self.entries_ok)

    def canonical_json(self) -> str:
        return json.dumps({
            "verdicts": [v.to_dict(canonical=True) for v in self.verdicts],
            "expect_fail": list(self.expected),
            "entries_ok": self.entries_ok,
            "all_ok": self.all_ok,
        }, sort_keys=True)

    def text_summary(self) -> str:
        lines = []
        for v, e, ok in zip(self.verdicts, self.expected, self.entries_ok):
            status = "PASS" if v.passed else "FAIL"
            suffix = " (expected failure)" if e else ""
            lines.append(f"[{'ok' if ok else 'BAD':>3}] {v.experiment_id}: {status}{suffix} "
                         f"({v.wall_time:.1f}s)")
            for c in v.checks:
                if c.get("type") == "error":
                    lines.append(f"      aborted: {c.get('message', 'unknown error')}")
                    continue
                label = c.get("estimator", c["type"])
                lines.append(f"      {label} {c['type']}: "
                             f"observed {c['observed']:.4f} -> "
                             f"{'pass' if c['passed'] else 'fail'}")
        lines.append(f"suite: {sum(self.entries_ok)}/{len(self.entries_ok)} entries behaved; "
                     f"{'OK' if self.all_ok else 'FAILURES PRESENT'}")
        lines.append(f"note: {MEASURE_DECAY_NOTE}")
        return "\n".join(lines) + "\n"


def suite(manifest, threads=None) -> SuiteReport:
    """Run every experiment; a config error aborts only its entry."""
    configs = list(manifest)
    if not configs:
        raise ConfigError("empty manifest")
    verdicts, expected, times = [], [], []
    for cfg in configs:
        if not isinstance(cfg, ExperimentConfig):
            cfg = ExperimentConfig.from_dict(cfg)
        try:
            v = run_experiment(cfg, threads=threads)
        except FraclabError as exc:
            v = Verdict(experiment_id=cfg.experiment_id,
                        construction=cfg.construction, estimates={},
                        checks=[{"type": "error", "observed": float("nan"),
                                 "passed": False, "message": str(exc)}],
                        passed=False, note=MEASURE_DECAY_NOTE, wall_time=0.0)
        verdicts.append(v)
        expected.append(bool(cfg.expect_fail))
        times.append(v.wall_time)
    return SuiteReport(verdicts=verdicts, expected=expected, wall_times=times)


# ---------------------------------------------------------------------------
# the default suite: desk-scale reproduction of the example constructions'
# dimension values plus the property checks, with a negative control

REFERENCE_SEEDS = tuple(range(101, 110))


def default_manifest() -> list:
    return [
        ExperimentConfig(
            experiment_id="calibration-uniform",
            construction="uniform-interval", params={"atoms": 10_000},
            plan={"dim": 1, "r0": 4.0, "annuli": 9, "samples": 64, "seed": 0},
            checks=({"estimator": "fourier", "type": "within", "target": 1.0,
                     "tol": 0.1},)),
        ExperimentConfig(
            experiment_id="calibration-cantor",
            construction="middle-third-cantor", params={"levels": 12},
            plan={"dim": 1, "r0": 1.0, "annuli": 7, "samples": 64, "seed": 0,
                  "base": 3.0},
            frostman={"scale_range": [3.0 ** -7, 1.0 / 3.0], "base": 3.0},
            box={"scale_range": [3.0 ** -7, 1.0 / 3.0], "base": 3.0},
            checks=({"estimator": "fourier", "type": "at_most", "target": 0.15},
                    {"estimator": "frostman", "type": "within",
                     "target": 0.6309297535714574, "tol": 0.05},
                    {"estimator": "box", "type": "within",
                     "target": 0.6309297535714574, "tol": 0.05})),
        ExperimentConfig(
            experiment_id="radial-arc",
            construction="radial-arc",
            params={"directions": 512, "fiber_atoms": 1024,
                    "fiber_profile": "smooth", "taper": "none"},
            plan={"dim": 2, "r0": 2.0, "annuli": 7, "samples": 1024, "seed": 3},
            checks=({"estimator": "fourier", "type": "at_least", "target": 1.8},
                    {"type": "sandwich", "regime": "kakeya", "s": 1.0, "t": 1.0})),
        ExperimentConfig(
            experiment_id="radial-cantor-t05",
            construction="radial-cantor",
            params={"t": 0.5, "levels": 8, "fiber_atoms": 1024,
                    "fiber_profile": "smooth"},
            plan={"dim": 2, "r0": 4.0, "annuli": 7, "samples": 1024, "seed": 3},
            frostman={"scale_range": [2.0 ** -8, 2.0 ** -2]},
            checks=({"estimator": "fourier", "type": "within", "target": 1.0,
                     "tol": 0.25},
                    {"estimator": "frostman", "type": "at_least", "target": 1.35},
                    {"type": "sandwich", "regime": "kakeya", "s": 1.0, "t": 0.5})),
        ExperimentConfig(
            experiment_id="radial-cantor-t025",
            construction="radial-cantor",
            params={"t": 0.25, "levels": 5, "fiber_atoms": 1024,
                    "fiber_profile": "smooth"},
            plan={"dim": 2, "r0": 4.0, "annuli": 7, "samples": 1024, "seed": 3},
            frostman={"scale_range": [2.0 ** -8, 2.0 ** -2]},
            checks=({"estimator": "fourier", "type": "within", "target": 0.5,
                     "tol": 0.25},
                    {"estimator": "frostman", "type": "at_least", "target": 1.1},
                    {"type": "sandwich", "regime": "kakeya", "s": 1.0, "t": 0.25})),
        ExperimentConfig(
            experiment_id="product-salem-s05",
            construction="product-salem",
            params={"s": 0.5, "factor_atoms": 4096, "vertical_atoms": 515},
            plan={"dim": 2, "r0": 4.0, "annuli": 8, "samples": 2048, "seed": 7},
            seeds=REFERENCE_SEEDS,
            checks=({"estimator": "fourier", "type": "within", "target": 0.5,
                     "tol": 0.2},
                    {"type": "sandwich", "regime": "ff", "s": 0.5, "t": 2.0})),
        ExperimentConfig(
            experiment_id="product-salem-s10",
            construction="product-salem",
            params={"s": 1.0, "factor_atoms": 4096, "vertical_atoms": 515},
            plan={"dim": 2, "r0": 4.0, "annuli": 7, "samples": 2048, "seed": 7},
            seeds=REFERENCE_SEEDS,
            checks=({"estimator": "fourier", "type": "within", "target": 1.0,
                     "tol": 0.2},
                    {"type": "sandwich", "regime": "ff", "s": 1.0, "t": 2.0})),
        ExperimentConfig(
            experiment_id="fh-zero",
            construction="fh-zero", params={"levels": 10, "fiber_atoms": 1024},
            plan={"dim": 2, "r0": 1.0, "annuli": 7, "samples": 512, "seed": 5,
                  "base": 3.0},
            checks=({"estimator": "fourier", "type": "at_most", "target": 0.15},)),
        ExperimentConfig(
            experiment_id="brownian-salem-t10",
            construction="brownian-planar",
            params={"t": 1.0, "factor_atoms": 4096},
            plan={"dim": 2, "r0": 2.0, "annuli": 7, "samples": 512, "seed": 7},
            frostman={"scale_range": [2.0 ** -7, 2.0 ** -1]},
            box={"scale_range": [2.0 ** -7, 2.0 ** -1]},
            seeds=REFERENCE_SEEDS,
            checks=({"estimator": "fourier", "type": "within", "target": 1.0,
                     "tol": 0.25},
                    {"estimator": "frostman", "type": "within", "target": 1.0,
                     "tol": 0.25},
                    {"estimator": "box", "type": "within", "target": 1.0,
                     "tol": 0.25})),
        ExperimentConfig(
            experiment_id="brownian-salem-t05",
            construction="brownian-planar",
            params={"t": 0.5, "factor_atoms": 4096},
            plan={"dim": 2, "r0": 2.0, "annuli": 7, "samples": 512, "seed": 7},
            frostman={"scale_range": [2.0 ** -7, 2.0 ** -1]},
            box={"scale_range": [2.0 ** -7, 2.0 ** -1]},
            seeds=REFERENCE_SEEDS,
            checks=({"estimator": "fourier", "type": "within", "target": 0.5,
                     "tol": 0.25},
                    {"estimator": "frostman", "type": "within", "target": 0.5,
                     "tol": 0.25},
                    {"estimator": "box", "type": "within", "target": 0.5,
                     "tol": 0.25})),
        ExperimentConfig(
            experiment_id="ball-ratio-uniform",
            construction="uniform-interval", params={"atoms": 10_000},
            checks=({"type": "ball_ratio_stable", "alpha": 0.9,
                     "scale_range": [2.0 ** -9, 2.0 ** -1]},)),
        ExperimentConfig(
            experiment_id="ball-ratio-radial-arc",
            construction="radial-arc",
            params={"directions": 512, "fiber_atoms": 1024,
                    "fiber_profile": "uniform", "taper": "none"},
            checks=({"type": "ball_ratio_stable", "alpha": 0.8,
                     "scale_range": [2.0 ** -8, 2.0 ** -1]},)),
        ExperimentConfig(
            experiment_id="ball-ratio-dirac-control",
            construction="dirac", params={"point": [0.0]},
            checks=({"type": "ball_ratio_unstable", "alpha": 0.5,
                     "scale_range": [2.0 ** -9, 2.0 ** -1]},)),
        ExperimentConfig(
            experiment_id="strip-scaling",
            construction="cantor-line-family", params={"levels": 7},
            checks=({"type": "strip_slope_at_least",
                     "target": 1.2618595071429148 - 1.0 - 0.15,
                     "alpha_range": [2, 8], "xi": [0.0, 1.0]},)),
        ExperimentConfig(
            experiment_id="negative-control-cantor",
            construction="middle-third-cantor", params={"levels": 12},
            plan={"dim": 1, "r0": 1.0, "annuli": 7, "samples": 64, "seed": 0,
                  "base": 3.0},
            checks=({"estimator": "fourier", "type": "within", "target": 0.9,
                     "tol": 0.1},),
            expect_fail=True),
    ]


def manifest_to_json(manifest) -> str:
    return json.dumps([c.to_dict() for c in manifest], indent=2, sort_keys=True)


def manifest_from_json(text: str) -> list:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ConfigError("manifest must be a JSON list of experiments")
    return [ExperimentConfig.from_dict(d) for d in data]
