"""Command-line interface: construct measures, estimate dimensions,
evaluate threshold bounds, run the verification suite, and plot curves.

Exit codes: 0 success, 2 malformed configuration or out-of-domain
parameters, 3 violated numerical preconditions (scale windows, atomization
limits), 4 verification suite reported unexpected failures.

All randomness funnels through --seed; stochastic constructions refuse to
run without it rather than pulling silent entropy.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bounds import REGIMES, bound_table, t_domain_max, table_to_csv, threshold_point
from .constructions import (FiberRule, KakeyaSpec, LineFamily, arc_directions,
                            brownian_image, brownian_image_1d, cantor_directions,
                            default_brownian_levels, full_circle_directions,
                            furstenberg_measure, kakeya_measure)
from .errors import ConfigError, FraclabError, PreconditionError
from .estimators import ATOMIZATION_FACTOR, box_counting, frostman_exponent
from .fourier import FrequencyPlan, decay_profile, estimate_fourier_dim
from .ifs import IfsSpec, ifs_measure, two_branch_spec
from .measures import (DiscreteMeasure, load_measure, product_measure,
                       save_measure, uniform_interval_measure)
from .verify import default_manifest, manifest_from_json, suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_VERIFY_FAIL = 4


# ---------------------------------------------------------------------------
# construct

def _direction_measure(spec: dict) -> DiscreteMeasure:
    kind = spec.get("type")
    if kind == "arc":
        lo = float(spec.get("lo", 0.0))
        hi = float(spec.get("hi", math.pi / 2))
        return arc_directions(int(spec.get("atoms", 512)), span=(lo, hi),
                              taper=spec.get("taper", "none"))
    if kind == "cantor":
        return cantor_directions(float(spec["dimension"]),
                                 int(spec.get("levels", 8)))
    if kind == "full-circle":
        return full_circle_directions(int(spec.get("atoms", 512)))
    raise ConfigError(f"direction spec field 'type' must be arc|cantor|full-circle, got {kind!r}")


def _fiber_rule(spec: dict, seed) -> FiberRule:
    kind = spec.get("kind", "uniform")
    if kind == "brownian" and seed is None:
        raise ConfigError("field 'fiber.kind'=brownian is stochastic: --seed is required")
    return FiberRule(kind=kind, atoms=int(spec.get("atoms", 1024)),
                     dimension=float(spec.get("dimension", 1.0)),
                     levels=int(spec.get("levels", 0)),
                     seed=int(seed or 0),
                     span=tuple(spec.get("span", (0.0, 1.0))),
                     per_direction_seeds=bool(spec.get("per_direction_seeds", False)))


def _build_1d(spec: dict, seed) -> DiscreteMeasure:
    kind = spec.get("kind")
    if kind == "uniform":
        return uniform_interval_measure(float(spec.get("a", 0.0)),
                                        float(spec.get("b", 1.0)),
                                        int(spec.get("atoms", 1024)))
    if kind == "ifs":
        return ifs_measure(IfsSpec.from_dict(spec), fill=int(spec.get("fill", 1)))
    if kind == "brownian1d":
        if seed is None:
            raise ConfigError("field 'kind'=brownian1d is stochastic: --seed is required")
        s = float(spec["s"])
        levels = int(spec.get("levels", 0)) or default_brownian_levels(s)
        fill = max(1, int(spec.get("atoms", 1024)) // 2 ** levels)
        A = ifs_measure(two_branch_spec(s / 2.0, levels), fill=fill)
        return brownian_image_1d(A, s, int(seed))
    raise ConfigError(f"unknown 1-D measure kind {kind!r}")


def build_from_spec(spec: dict, seed=None) -> tuple:
    """Construct a measure from a JSON spec; returns (measure, metadata)."""
    if not isinstance(spec, dict):
        raise ConfigError("spec must be a JSON object")
    kind = spec.get("kind")
    meta = {"kind": kind, "seed": seed}
    if kind in ("uniform", "ifs", "brownian1d"):
        mu = _build_1d(spec, seed)
        if kind == "ifs":
            meta["similarity_dimension"] = IfsSpec.from_dict(spec).similarity_dimension
        if kind == "brownian1d":
            meta["predicted_fourier_dimension"] = float(spec["s"])
        if kind == "uniform":
            meta["predicted_fourier_dimension"] = 1.0
        return mu, meta
    if kind == "product":
        x, _ = build_from_spec(spec["x"], seed)
        y, _ = build_from_spec(spec["y"], seed)
        return product_measure(x, y), meta
    if kind == "kakeya":
        dirs = _direction_measure(spec.get("directions", {}))
        fiber = _fiber_rule(spec.get("fiber", {}), seed)
        mu = kakeya_measure(KakeyaSpec(directions=dirs, fiber=fiber))
        dspec = spec.get("directions", {})
        if dspec.get("type") == "cantor":
            meta["predicted_fourier_dimension"] = 2.0 * float(dspec["dimension"])
        elif dspec.get("type") in ("arc", "full-circle"):
            meta["predicted_fourier_dimension"] = 2.0
        return mu, meta
    if kind == "brownian":
        if seed is None:
            raise ConfigError("field 'kind'=brownian is stochastic: --seed is required")
        t = float(spec["t"])
        levels = int(spec.get("levels", 0)) or default_brownian_levels(t)
        fill = max(1, int(spec.get("atoms", 4096)) // 2 ** levels)
        A = ifs_measure(two_branch_spec(t / 2.0, levels), fill=fill)
        mu = brownian_image(A, t, int(seed))
        meta["predicted_fourier_dimension"] = t
        return mu, meta
    if kind == "furstenberg":
        fam_spec = spec.get("family")
        if not isinstance(fam_spec, dict):
            raise ConfigError("field 'family' must be an object")
        if "thetas" in fam_spec:
            fam = LineFamily(np.asarray(fam_spec["thetas"], dtype=float),
                             np.asarray(fam_spec["offsets"], dtype=float),
                             np.asarray(fam_spec["weights"], dtype=float))
        else:
            raise ConfigError("field 'family' needs explicit thetas/offsets/weights")
        fiber = _fiber_rule(spec.get("fiber", {}), seed)
        return furstenberg_measure(fam, fiber), meta
    raise ConfigError(f"unknown construction field 'kind': {kind!r}")


def cmd_construct(args) -> int:
    try:
        spec = json.loads(Path(args.spec).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {args.spec}: line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    mu, meta = build_from_spec(spec, args.seed)
    save_measure(mu, args.out)
    meta.update({"atoms": mu.n_atoms, "mass": mu.total_mass, "dim": mu.dim})
    Path(str(args.out) + ".meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n")
    print(f"wrote {mu.n_atoms} atoms (dim {mu.dim}, mass {mu.total_mass:.12g}) "
          f"to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# estimate

def cmd_estimate(args) -> int:
    mu = load_measure(args.measure)
    annuli = args.annuli
    limit = mu.n_atoms / 4.0
    max_annuli = int(math.floor(math.log(limit / args.r0, args.base))) + 1
    if annuli == 0:
        annuli = min(9, max_annuli)
    if max_annuli < 7:
        raise PreconditionError(
            f"{mu.n_atoms} atoms support frequencies only up to {limit:g}; "
            f"r0={args.r0:g} base={args.base:g} leaves {max_annuli} annuli "
            f"but a fit needs 7 (use more atoms or a smaller r0)")
    if annuli > max_annuli or annuli < 7:
        raise PreconditionError(
            f"with {mu.n_atoms} atoms and r0={args.r0:g} the admissible "
            f"annulus count is [7, {max_annuli}]")
    plan = FrequencyPlan(dim=mu.dim, r0=args.r0, annuli=annuli,
                         samples=args.samples, seed=args.seed, base=args.base)
    fest = estimate_fourier_dim(mu, plan, threads=args.threads)
    side = float(np.max(mu.bbox[:, 1] - mu.bbox[:, 0]))
    r_min = args.scale_min
    r_max = args.scale_max
    if r_min == 0.0:
        r_min = max(ATOMIZATION_FACTOR * mu.finest_spacing(), side / 512.0)
    if r_max == 0.0:
        r_max = side / 2.0
    out = {"fourier": fest.to_dict()}
    lines = [f"fourier   dim {fest.dim_value:8.4f}  slope {fest.slope:8.4f}  "
             f"residual {fest.residual:.4f}  window [{fest.scale_window[0]:g}, "
             f"{fest.scale_window[1]:g}]"]
    for name, runner in (("frostman", frostman_exponent), ("box", box_counting)):
        est = runner(mu, (r_min, r_max), base=args.base)
        out[name] = est.to_dict()
        lines.append(f"{name:9s} dim {est.dim_value:8.4f}  slope {est.slope:8.4f}  "
                     f"residual {est.residual:.4f}  window [{est.scale_window[0]:g}, "
                     f"{est.scale_window[1]:g}]")
    print("\n".join(lines))
    if args.profile_csv:
        prof = decay_profile(mu, plan, threads=args.threads)
        Path(args.profile_csv).write_text(prof.to_csv())
        print(f"decay profile written to {args.profile_csv}")
    if args.json:
        Path(args.json).write_text(json.dumps(out, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds

def _grid(text: str) -> list:
    lo, hi, n = text.split(":")
    lo, hi, n = float(lo), float(hi), int(n)
    if n < 1:
        raise ConfigError("grid needs at least one point")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def cmd_bounds(args) -> int:
    if args.s is not None and args.t is not None:
        p = threshold_point(args.regime, args.s, args.t)
        print(f"{args.regime}(s={p.s:g}, t={p.t:g}): lower {p.lower:.12g} "
              f"upper {p.upper:.12g}")
        return EXIT_OK
    if args.s_grid and args.t_grid:
        rows = bound_table(args.regime, _grid(args.s_grid), _grid(args.t_grid))
        csv = table_to_csv(rows)
        if args.csv:
            Path(args.csv).write_text(csv)
            print(f"{len(rows)} rows written to {args.csv}")
        else:
            sys.stdout.write(csv)
        return EXIT_OK
    raise ConfigError("bounds needs either --s and --t, or --s-grid and --t-grid")


# ---------------------------------------------------------------------------
# plot

SVG_W, SVG_H = 640, 440
MARGIN = 56


def _svg_polyline(xs, ys, x_range, y_range, color: str) -> str:
    x0, x1 = x_range
    y0, y1 = y_range
    pts = []
    for x, y in zip(xs, ys):
        px = MARGIN + (x - x0) / (x1 - x0) * (SVG_W - 2 * MARGIN)
        py = SVG_H - MARGIN - (y - y0) / (y1 - y0) * (SVG_H - 2 * MARGIN)
        pts.append(f"{px:.2f},{py:.2f}")
    return (f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{" ".join(pts)}"/>')


def render_bound_svg(regime: str, fixed: str, fixed_value: float,
                     xs, lowers, uppers) -> str:
    y_max = max(max(uppers), 1e-9) * 1.08
    x_range = (xs[0], xs[-1])
    y_range = (0.0, y_max)
    free = "t" if fixed == "s" else "s"
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" '
        f'viewBox="0 0 {SVG_W} {SVG_H}">',
        f'<rect width="{SVG_W}" height="{SVG_H}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{SVG_H - MARGIN}" x2="{SVG_W - MARGIN}" '
        f'y2="{SVG_H - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{SVG_H - MARGIN}" '
        f'stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = x_range[0] + frac * (x_range[1] - x_range[0])
        px = MARGIN + frac * (SVG_W - 2 * MARGIN)
        parts.append(f'<line x1="{px:.1f}" y1="{SVG_H - MARGIN}" x2="{px:.1f}" '
                     f'y2="{SVG_H - MARGIN + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.1f}" y="{SVG_H - MARGIN + 20}" '
                     f'font-size="12" text-anchor="middle">{xv:.2g}</text>')
        yv = frac * y_max
        py = SVG_H - MARGIN - frac * (SVG_H - 2 * MARGIN)
        parts.append(f'<line x1="{MARGIN - 5}" y1="{py:.1f}" x2="{MARGIN}" '
                     f'y2="{py:.1f}" stroke="black"/>')
        parts.append(f'<text x="{MARGIN - 9}" y="{py + 4:.1f}" font-size="12" '
                     f'text-anchor="end">{yv:.2g}</text>')
    parts.append(_svg_polyline(xs, lowers, x_range, y_range, "#1f5fbf"))
    parts.append(_svg_polyline(xs, uppers, x_range, y_range, "#bf3f1f"))
    parts.append(f'<text x="{SVG_W / 2}" y="{SVG_H - 12}" font-size="13" '
                 f'text-anchor="middle">{free} (fixed {fixed} = {fixed_value:g})</text>')
    parts.append(f'<text x="{MARGIN}" y="{MARGIN - 14}" font-size="13">'
                 f'{regime}: lower (blue) and upper (red) threshold bounds</text>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def cmd_plot(args) -> int:
    regime = args.regime
    n = args.samples
    if n < 2 or n > 512:
        raise ConfigError("plot needs between 2 and 512 samples")
    if (args.fixed_s is None) == (args.fixed_t is None):
        raise ConfigError("plot needs exactly one of --fixed-s / --fixed-t")
    if args.fixed_s is not None:
        fixed, fixed_value = "s", args.fixed_s
        hi = t_domain_max(regime)
        xs = [hi * (k + 1) / n for k in range(n)]
        rows = bound_table(regime, [fixed_value], xs)
    else:
        fixed, fixed_value = "t", args.fixed_t
        xs = [(k + 1) / n for k in range(n)]
        rows = bound_table(regime, xs, [fixed_value])
    free_vals = [r[1] if fixed == "s" else r[0] for r in rows]
    lowers = [r[2] for r in rows]
    uppers = [r[3] for r in rows]
    svg = render_bound_svg(regime, fixed, fixed_value, free_vals, lowers, uppers)
    Path(args.out).write_text(svg)
    print(f"svg written to {args.out}")
    if args.csv:
        Path(args.csv).write_text(table_to_csv(rows))
        print(f"curve data written to {args.csv}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    if args.manifest:
        manifest = manifest_from_json(Path(args.manifest).read_text())
    else:
        manifest = default_manifest()
    report = suite(manifest, threads=args.threads)
    sys.stdout.write(report.text_summary())
    if args.out:
        Path(args.out).write_text(report.canonical_json() + "\n")
        print(f"verdicts written to {args.out}")
    return EXIT_OK if report.all_ok else EXIT_VERIFY_FAIL


def cmd_export_manifest(args) -> int:
    from .verify import manifest_to_json
    text = manifest_to_json(default_manifest())
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"default manifest written to {args.out}")
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fraclab",
        description="fractal-measure laboratory: construct, estimate, verify")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a measure from a JSON spec")
    c.add_argument("--spec", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--seed", type=int, default=None)
    c.set_defaults(func=cmd_construct)

    e = sub.add_parser("estimate", help="estimate dimensions of a measure file")
    e.add_argument("--measure", required=True)
    e.add_argument("--r0", type=float, default=4.0)
    e.add_argument("--annuli", type=int, default=0,
                   help="0 picks the deepest admissible ladder (max 9)")
    e.add_argument("--samples", type=int, default=0,
                   help="0 uses the dimension default (64 / 512)")
    e.add_argument("--base", type=float, default=2.0)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--threads", type=int, default=0)
    e.add_argument("--scale-min", type=float, default=0.0)
    e.add_argument("--scale-max", type=float, default=0.0)
    e.add_argument("--profile-csv", default=None)
    e.add_argument("--json", default=None)
    e.set_defaults(func=cmd_estimate)

    b = sub.add_parser("bounds", help="evaluate threshold bounds")
    b.add_argument("--regime", required=True, choices=REGIMES)
    b.add_argument("--s", type=float, default=None)
    b.add_argument("--t", type=float, default=None)
    b.add_argument("--s-grid", default=None, help="lo:hi:n")
    b.add_argument("--t-grid", default=None, help="lo:hi:n")
    b.add_argument("--csv", default=None)
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="run the experiment suite")
    v.add_argument("--manifest", default=None,
                   help="JSON manifest; omitted = built-in default suite")
    v.add_argument("--out", default=None, help="write canonical verdict JSON")
    v.add_argument("--threads", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("export-manifest", help="print the default suite as JSON")
    m.add_argument("--out", default=None)
    m.set_defaults(func=cmd_export_manifest)

    g = sub.add_parser("plot", help="render threshold-bound curves (SVG + CSV)")
    g.add_argument("--regime", required=True, choices=REGIMES)
    g.add_argument("--fixed-s", type=float, default=None)
    g.add_argument("--fixed-t", type=float, default=None)
    g.add_argument("--samples", type=int, default=256)
    g.add_argument("--out", required=True)
    g.add_argument("--csv", default=None)
    g.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FraclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
