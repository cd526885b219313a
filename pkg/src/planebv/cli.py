"""Command-line driver: configuration in, JSON/CSV reports out.

One command per process; identical configurations produce byte-identical
reports (no timestamps, sorted keys, deterministic numerics).  Exit
status 0 when every asserted inequality passes, 2 on configuration
errors, 3 when a computational precondition fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bv_scalar, fields, fileio, homeo_lab, jordan_pipeline, metric_bv
from . import weighted_plane as wp
from . import whitney_cover
from .errors import PlaneBVError
from .geometry import Rect
from .reports import SIGMA_MAX_CONVENTION

DEFAULT_WINDOW = (-2.0, -2.0, 2.0, 2.0)
EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3


class ConfigError(Exception):
    pass


def parse_weight(spec, window):
    """Weight specs: "uniform:2.0", "radial_power:-1.5", "tabulated:FILE",
    or "framed" (the built-in smooth [1/2, 2] table)."""
    if isinstance(spec, dict):
        return wp.WeightedPlane.from_config(spec, window)
    name, _, arg = str(spec).partition(":")
    if name == "uniform":
        return wp.WeightedPlane.uniform(float(arg or 1.0), window)
    if name == "radial_power":
        if not arg:
            raise ConfigError("radial_power weight needs an exponent, e.g. radial_power:-1.5")
        return wp.WeightedPlane.radial_power(float(arg), window)
    if name == "tabulated":
        table = np.loadtxt(arg, delimiter=",", ndmin=2)
        return wp.WeightedPlane.tabulated(table, (window.x0, window.y0),
                                          window.width / table.shape[1], window)
    if name == "framed":
        return fields.framed_weight_table(window)
    raise ConfigError(f"unknown weight spec {spec!r}")


def parse_homeo(family, args_dict):
    params = {}
    if family == "radial_power":
        params["exponent"] = float(args_dict.get("exponent") or 2.0)
    elif family == "radial_twist":
        params["amplitude"] = float(args_dict.get("amplitude") or 1.0)
    elif family == "linear":
        if args_dict.get("shear") is not None:
            params["shear"] = float(args_dict["shear"])
        elif args_dict.get("diag"):
            params["diag"] = [float(v) for v in str(args_dict["diag"]).split(",")]
        elif args_dict.get("matrix"):
            vals = [float(v) for v in str(args_dict["matrix"]).split(",")]
            params["matrix"] = [vals[:2], vals[2:]]
    if family in ("identity", "linear") and args_dict.get("domain_window"):
        params["window"] = Rect(*[float(v) for v in str(args_dict["domain_window"]).split(",")])
    return homeo_lab.builtin_homeo(family, params)


def _floats(text):
    return tuple(float(v) for v in str(text).split(","))


def _merged(args, config, key, default):
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    for k in (key, key.replace("-", "_")):
        if k in config:
            return config[k]
    return default


def _homeo_params(args, config):
    merged = dict(config)
    merged.update({k: v for k, v in vars(args).items() if v is not None})
    return merged


def _outdir(args, config):
    out = getattr(args, "out", None) or os.environ.get("PLANEBV_OUTDIR") \
        or config.get("out") or "reports"
    os.makedirs(out, exist_ok=True)
    return out


def _emit(outdir, name, cfg, results, passed):
    report = {
        "config": cfg,
        "config_hash": fileio.config_hash(cfg),
        "convention": SIGMA_MAX_CONVENTION,
        "results": results,
        "pass": bool(passed),
    }
    fileio.write_json(os.path.join(outdir, name), report)
    return report


def cmd_analyze_example(args, config):
    outdir = _outdir(args, config)
    family = _merged(args, config, "family", "radial_power")
    window = Rect(*_floats(_merged(args, config, "window", ",".join(map(str, DEFAULT_WINDOW)))))
    source = parse_weight(_merged(args, config, "source-weight", "uniform:1.0"), window)
    target = parse_weight(_merged(args, config, "target-weight", "uniform:1.0"), window)
    eps = _floats(_merged(args, config, "eps", "1e-1,1e-2,1e-3,1e-4"))
    resolution = int(_merged(args, config, "resolution", homeo_lab.RADIAL_PANELS))
    homeo = parse_homeo(family, _homeo_params(args, config))
    cfg = {"command": "analyze-example", "family": family, "params": homeo.params,
           "window": list(window.as_tuple()), "eps": list(eps), "resolution": resolution,
           "source_weight": str(_merged(args, config, "source-weight", "uniform:1.0")),
           "target_weight": str(_merged(args, config, "target-weight", "uniform:1.0"))}
    fwd, inv = homeo_lab.variation_pair(homeo, source, target, eps, resolution)
    results = {"forward": fwd.to_dict(), "inverse": inv.to_dict()}
    fileio.write_csv(os.path.join(outdir, "analyze_example_eps.csv"),
                     ("eps", "forward", "inverse"),
                     list(zip(eps, fwd.per_epsilon_values, inv.per_epsilon_values)))
    _emit(outdir, "analyze_example.json", cfg, results, True)
    print(f"forward: {fwd.growth_class}  inverse: {inv.growth_class}")
    return EXIT_OK


def cmd_verify_theorem(args, config):
    outdir = _outdir(args, config)
    family = _merged(args, config, "family", "identity")
    window = Rect(*_floats(_merged(args, config, "window", ",".join(map(str, DEFAULT_WINDOW)))))
    source = parse_weight(_merged(args, config, "source-weight", "uniform:1.0"), window)
    target = parse_weight(_merged(args, config, "target-weight", "uniform:1.0"), window)
    resolutions = tuple(int(v) for v in _floats(_merged(args, config, "resolutions", "128,256,512")))
    bounds = _floats(_merged(args, config, "ratio-bounds", "0.125,8.0"))
    homeo = parse_homeo(family, _homeo_params(args, config))
    cfg = {"command": "verify-theorem", "family": family, "params": homeo.params,
           "window": list(window.as_tuple()), "resolutions": list(resolutions),
           "ratio_bounds": list(bounds),
           "source_weight": str(_merged(args, config, "source-weight", "uniform:1.0")),
           "target_weight": str(_merged(args, config, "target-weight", "uniform:1.0"))}
    rep = homeo_lab.two_sided_check(homeo, source, target, resolutions)
    if not rep.applicable:
        _emit(outdir, "verify_theorem.json", cfg,
              {"applicable": False, "ratios": [list(p) for p in rep.ratios]}, False)
        print("not-applicable: a variation direction is classified divergent", file=sys.stderr)
        return EXIT_PRECONDITION
    in_bounds = bounds[0] <= rep.ratio <= bounds[1]
    passed = rep.cauchy_ok and in_bounds
    results = {"applicable": True, "ratio": rep.ratio, "cauchy_ok": rep.cauchy_ok,
               "in_bounds": in_bounds,
               "ratios": [list(p) for p in rep.ratios],
               "forward_values": list(rep.forward_values),
               "inverse_values": list(rep.inverse_values)}
    fileio.write_csv(os.path.join(outdir, "verify_theorem_ratios.csv"),
                     ("resolution", "ratio"), rep.ratios)
    _emit(outdir, "verify_theorem.json", cfg, results, passed)
    print(f"ratio: {rep.ratio:.6f}  cauchy: {rep.cauchy_ok}  in_bounds: {in_bounds}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_coarea_check(args, config):
    outdir = _outdir(args, config)
    name = _merged(args, config, "field", "ramp")
    resolution = int(_merged(args, config, "resolution", 256))
    levels = int(_merged(args, config, "levels", 64))
    tol = float(_merged(args, config, "tol", 0.05))
    window = Rect(*_floats(_merged(args, config, "window", ",".join(map(str, DEFAULT_WINDOW)))))
    weight = parse_weight(_merged(args, config, "weight", "uniform:1.0"), window)
    field = fields.build_field(name, resolution)
    cfg = {"command": "coarea-check", "field": name, "resolution": resolution,
           "levels": levels, "tol": tol,
           "weight": str(_merged(args, config, "weight", "uniform:1.0"))}
    lhs, rhs = bv_scalar.coarea_check(field, weight, levels)
    rel = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    passed = rel <= tol
    _emit(outdir, "coarea_check.json", cfg,
          {"lhs": lhs, "rhs": rhs, "rel_gap": rel}, passed)
    print(f"lhs: {lhs:.6f}  rhs: {rhs:.6f}  rel gap: {rel:.4f}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_slice_check(args, config):
    outdir = _outdir(args, config)
    family = _merged(args, config, "family", "identity")
    resolution = int(_merged(args, config, "resolution", 256))
    tol = float(_merged(args, config, "tol", 0.05))
    window = Rect(*_floats(_merged(args, config, "window", ",".join(map(str, DEFAULT_WINDOW)))))
    weight = parse_weight(_merged(args, config, "weight", "uniform:1.0"), window)
    homeo = parse_homeo(family, _homeo_params(args, config))
    cfg = {"command": "slice-check", "family": family, "params": homeo.params,
           "resolution": resolution, "tol": tol,
           "weight": str(_merged(args, config, "weight", "uniform:1.0"))}
    results = {}
    passed = True
    for axis in ("x", "y"):
        s, full = metric_bv.slice_variation(homeo, weight, axis, resolution)
        ok = s <= full * (1 + tol)
        results[axis] = {"slice_integral": s, "full_variation": full, "ok": ok}
        passed = passed and ok
        print(f"axis {axis}: slice {s:.6f} <= full {full:.6f} * (1+tol): {ok}")
    _emit(outdir, "slice_check.json", cfg, results, passed)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_jordan_demo(args, config):
    outdir = _outdir(args, config)
    region = _merged(args, config, "region", "disk")
    resolution = int(_merged(args, config, "resolution", 320))
    margin = float(_merged(args, config, "margin", 0.3))
    c_config = float(_merged(args, config, "length-budget", jordan_pipeline.LENGTH_BUDGET_C))
    window = Rect(*_floats(_merged(args, config, "window", "-1.2,-1.2,1.2,1.2")))
    weight = parse_weight(_merged(args, config, "weight", "framed"), window)
    mask, gamma, p_in, q_out = fields.region_bundle(region, n=resolution)
    h = mask.spacing
    radii_cfg = _merged(args, config, "radii", None)
    radii = _floats(radii_cfg) if radii_cfg else (3 * h, 2.5 * h, 2 * h)
    cfg = {"command": "jordan-demo", "region": region, "resolution": resolution,
           "margin": margin, "radii": list(radii), "length_budget": c_config,
           "weight": str(_merged(args, config, "weight", "framed"))}
    run = jordan_pipeline.run_pipeline(mask, gamma, weight, radii,
                                       (p_in, q_out), margin=margin)
    rep = jordan_pipeline.golab_check(run, weight, c_config=c_config)
    for k, stage in enumerate(run.stages):
        fileio.save_curve(os.path.join(outdir, f"jordan_{region}_stage{k}.csv"),
                          stage.component)
    results = {
        "hausdorff": list(rep.hausdorff), "spacing": rep.spacing,
        "gamma_h1": rep.gamma_h1, "min_component_h1": rep.min_component_h1,
        "levels": list(run.levels), "radii": list(run.moll_radii),
        "perimeter_weighted": run.perimeter_weighted,
        "budgets_ok": rep.budgets_ok, "sandwich_ok": rep.sandwich_ok,
        "semicontinuity_ok": rep.semicontinuity_ok,
    }
    _emit(outdir, f"jordan_{region}.json", cfg, results, rep.ok)
    print(f"{region}: sandwich {rep.sandwich_ok}  semicontinuity {rep.semicontinuity_ok}  "
          f"budgets {rep.budgets_ok}")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_whitney_demo(args, config):
    outdir = _outdir(args, config)
    mask_name = _merged(args, config, "mask", "square")
    size = int(_merged(args, config, "size", 160))
    cfg = {"command": "whitney-demo", "mask": mask_name, "size": size}
    mask = fields.lattice_mask(mask_name, size)
    cover = whitney_cover.build_cover(mask)
    disjoint = whitney_cover.verify_disjoint(cover)
    cmin, cmax = whitney_cover.coverage_multiplicity(cover)
    overlaps = {d: whitney_cover.overlap_bound(cover, d) for d in (1, 4, 20)}
    fileio.save_cover(os.path.join(outdir, f"whitney_{mask_name}.csv"), cover)
    passed = disjoint and cmin >= 1 and all(o.comparable_ok for o in overlaps.values())
    results = {
        "balls": len(cover), "disjoint": disjoint,
        "coverage_min": cmin, "coverage_max": cmax,
        "overlap_max": {str(d): o.max_multiplicity for d, o in overlaps.items()},
        "min_radius_ratio_20": overlaps[20].min_radius_ratio,
    }
    _emit(outdir, f"whitney_{mask_name}.json", cfg, results, passed)
    print(f"{mask_name}: balls {len(cover)}  disjoint {disjoint}  coverage >= 1: {cmin >= 1}  "
          f"overlap(1,4,20) = {[overlaps[d].max_multiplicity for d in (1, 4, 20)]}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_ahlfors_fit(args, config):
    outdir = _outdir(args, config)
    window = Rect(*_floats(_merged(args, config, "window", ",".join(map(str, DEFAULT_WINDOW)))))
    weight = parse_weight(_merged(args, config, "weight", "uniform:1.0"), window)
    target = float(_merged(args, config, "target", 2.0))
    center = _floats(_merged(args, config, "center", "0,0"))
    r_min = float(_merged(args, config, "r-min", 1e-4))
    r_max = float(_merged(args, config, "r-max", 0.3))
    count = int(_merged(args, config, "count", 12))
    cfg = {"command": "ahlfors-fit", "weight": str(_merged(args, config, "weight", "uniform:1.0")),
           "window": list(window.as_tuple()), "target": target,
           "center": list(center), "r_min": r_min, "r_max": r_max, "count": count}
    ladder = wp.geometric_ladder(r_min, r_max, count)
    rep = wp.ahlfors_fit(weight, wp.SampleConfig((tuple(center),), ladder), target)
    results = {"nu_hat": rep.nu_hat, "c_lower": rep.c_lower, "c_upper": rep.c_upper,
               "regular_2": rep.regular_2,
               "samples": [[list(c), r, m] for c, r, m in rep.samples]}
    _emit(outdir, "ahlfors_fit.json", cfg, results, True)
    print(f"nu_hat: {rep.nu_hat:.4f}  frame: [{rep.c_lower:.4g}, {rep.c_upper:.4g}]  "
          f"regular_2: {rep.regular_2}")
    return EXIT_OK


COMMANDS = {
    "analyze-example": cmd_analyze_example,
    "verify-theorem": cmd_verify_theorem,
    "coarea-check": cmd_coarea_check,
    "slice-check": cmd_slice_check,
    "jordan-demo": cmd_jordan_demo,
    "whitney-demo": cmd_whitney_demo,
    "ahlfors-fit": cmd_ahlfors_fit,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="planebv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = dict(default=None)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file; flags override it")
        p.add_argument("--out", default=None, help="output directory (or PLANEBV_OUTDIR)")
        p.add_argument("--window", **common)
        p.add_argument("--resolution", **common)
        p.add_argument("--tol", **common)
        p.add_argument("--weight", **common)
        if name in ("analyze-example", "verify-theorem", "slice-check"):
            p.add_argument("--family", **common)
            p.add_argument("--exponent", **common)
            p.add_argument("--amplitude", **common)
            p.add_argument("--shear", **common)
            p.add_argument("--diag", **common)
            p.add_argument("--matrix", **common)
            p.add_argument("--domain-window", **common)
            p.add_argument("--source-weight", dest="source_weight", **common)
            p.add_argument("--target-weight", dest="target_weight", **common)
        if name == "analyze-example":
            p.add_argument("--eps", **common)
        if name == "verify-theorem":
            p.add_argument("--resolutions", **common)
            p.add_argument("--ratio-bounds", dest="ratio_bounds", **common)
        if name == "coarea-check":
            p.add_argument("--field", **common)
            p.add_argument("--levels", **common)
        if name == "jordan-demo":
            p.add_argument("--region", **common)
            p.add_argument("--margin", **common)
            p.add_argument("--radii", **common)
            p.add_argument("--length-budget", dest="length_budget", **common)
        if name == "whitney-demo":
            p.add_argument("--mask", **common)
            p.add_argument("--size", **common)
        if name == "ahlfors-fit":
            p.add_argument("--target", **common)
            p.add_argument("--center", **common)
            p.add_argument("--r-min", dest="r_min", **common)
            p.add_argument("--r-max", dest="r_max", **common)
            p.add_argument("--count", **common)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        try:
            with open(args.config) as f:
                config = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if not isinstance(config, dict):
            print("config error: config file must hold a JSON object", file=sys.stderr)
            return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args, config)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PlaneBVError as exc:
        print(f"precondition failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
