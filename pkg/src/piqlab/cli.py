"""Command-line orchestration: one experiment per invocation.

Usage:  piqlab [COMMAND] --config cfg.json [--out report.json]
                [--jobs K] [--seed N]

The config is a JSON document whose "command" field (or the positional
COMMAND, which must agree when both are given) selects the experiment:

    piq-run, gpiq-run, lattes-build, lattes-witness, modp-report,
    linearize, boettcher, gauss-norm, ord-scan, period-bound,
    cyclo-split, descend-sym2

Reports are JSON documents with a stable field order (schema_version "1")
written atomically; identical configs produce byte-identical reports, so
wall-clock timing goes to stderr only.  Exit codes: 0 success, 2 config
error, 3 InvarianceViolated, 4 ExtensionRequired, 5 PrecisionLoss,
6 SearchExhausted, 1 any other failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .errors import (
    ExtensionRequired,
    InvarianceViolated,
    PiqLabError,
    PrecisionLoss,
    SearchExhausted,
)
from .numeric import GaussianRational, PadicNumber, padic_from_rational
from .poly import BiHomPoly, UniPoly
from .padic_series import PolydiscSeries, Radius, staircase_set
from .padic_series import gauss_norm as series_gauss_norm
from .padic_series import ord as series_ord
from .dynamics_p1 import ProjPoint, parse_affine_map, symmetric_square_descent
from .uniformize import Germ, boettcher_coordinate, koenigs_linearize
from .dynamics_p1 import local_germ
from .piq_engine import (
    ProductSystem,
    Subscheme,
    check_invariant,
    empirical_s0,
    generalized_tail_set,
    modp_piq_report,
    tail_set,
)
from .lattes import build_lattes_pair, verify_recipe, witness_points
from .linalg_uniform import RationalMatrix, minpoly_cyclotomic_split, period_bound

COMMANDS = (
    "piq-run",
    "gpiq-run",
    "lattes-build",
    "lattes-witness",
    "modp-report",
    "linearize",
    "boettcher",
    "gauss-norm",
    "ord-scan",
    "period-bound",
    "cyclo-split",
    "descend-sym2",
)

EXIT_CONFIG = 2
EXIT_INVARIANCE = 3
EXIT_EXTENSION = 4
EXIT_PRECISION = 5
EXIT_SEARCH = 6


class ConfigError(Exception):
    pass


def _require(config, field, kind=None):
    if field not in config:
        raise ConfigError(f"missing config field {field!r}")
    value = config[field]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"config field {field!r} has the wrong type")
    return value


def _jsonable(x):
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, (GaussianRational, ProjPoint, PadicNumber, UniPoly)):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = list(x)
        if isinstance(x, (set, frozenset)):
            items = sorted(items, key=str)
        return [_jsonable(v) for v in items]
    return str(x)


def _parse_subscheme(spec) -> Subscheme:
    kind = _require(spec, "kind", str)
    if kind == "diagonal":
        return Subscheme.diagonal()
    if kind == "infinity-lines":
        return Subscheme.infinity_lines()
    if kind == "point":
        return Subscheme.product_point(
            _parse_point(_require(spec, "p")), _parse_point(_require(spec, "q"))
        )
    if kind == "curve":
        a, b = _require(spec, "bidegree", list)
        coeffs = {}
        for i, j, value in _require(spec, "coeffs", list):
            coeffs[(int(i), int(j))] = _parse_scalar(value)
        return Subscheme.curve(BiHomPoly((int(a), int(b)), coeffs))
    raise ConfigError(f"unknown subscheme kind {kind!r}")


def _parse_point(text) -> ProjPoint:
    text = str(text)
    if text in ("inf", "infinity"):
        return ProjPoint(1, 0)
    if "i" in text:
        return ProjPoint.from_affine(GaussianRational.parse(text))
    return ProjPoint.from_affine(Fraction(text))


def _parse_scalar(value):
    text = str(value)
    if "i" in text:
        return GaussianRational.parse(text)
    return Fraction(text)


def _parse_map(config, field) -> "RationalMap":
    spec = _require(config, field)
    if isinstance(spec, str):
        return parse_affine_map(spec)
    if isinstance(spec, dict) and "numerator" in spec:
        num = UniPoly([_parse_scalar(c) for c in spec["numerator"]])
        den = UniPoly([_parse_scalar(c) for c in spec.get("denominator", [1])])
        from .dynamics_p1 import RationalMap

        return RationalMap.from_affine(num, den)
    raise ConfigError(f"cannot parse map in field {field!r}")


def _parse_series(config) -> tuple:
    p = _require(config, "p", int)
    prec = config.get("precision", 24)
    trunc = config.get("truncation")
    coeffs = {}
    for entry in _require(config, "coefficients", list):
        *idx, value = entry
        coeffs[tuple(int(k) for k in idx)] = Fraction(str(value))
    series = PolydiscSeries.from_rational_coeffs(coeffs, p, prec, trunc=trunc)
    radius = Radius(tuple(Fraction(str(m)) for m in _require(config, "radius", list)))
    return series, radius


def _parse_germ(config) -> Germ:
    p = _require(config, "p", int)
    prec = config.get("precision", 24)
    trunc = config.get("truncation", 10)
    if "map" in config:
        f = _parse_map(config, "map")
        xi = _require(config, "xi", int)
        return local_germ(f, xi, p, trunc, prec)
    coeffs = [Fraction(str(c)) for c in _require(config, "coefficients", list)]
    return Germ(p, coeffs, prec)


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------


def _run_piq(config, generalized: bool) -> dict:
    system = ProductSystem(_parse_map(config, "f"), _parse_map(config, "g"))
    sub = _parse_subscheme(_require(config, "subscheme", dict))
    height = _require(config, "height", int)
    s_max = _require(config, "s_max", int)
    results = {"subscheme": sub.describe()}
    invariant = check_invariant(system, sub)
    results["invariant"] = invariant
    tails = {}
    for s in range(s_max + 1):
        pairs = (
            generalized_tail_set(system, sub, s, height)
            if generalized
            else tail_set(system, sub, s, height)
        )
        tails[str(s)] = [[str(p), str(q)] for p, q in pairs[:20]]
        tails[str(s) + "_count"] = len(pairs)
    results["tails"] = tails
    if not generalized:
        s0 = empirical_s0(system, sub, height, s_max)
        results["s0"] = s0 if s0 is not None else "not-stabilized"
        results["bounds"] = {"height": height, "s_max": s_max}
    return results


def _run_lattes_build(config) -> dict:
    pair = build_lattes_pair()
    report = verify_recipe(pair)
    return {
        "F": _serialize_map(pair.F),
        "G": _serialize_map(pair.G),
        "five_map_degree": pair.five_map.degree,
        "multiplier_ratio": str(pair.multiplier_ratio),
        "recipe": {
            "commute": report.commute,
            "pullback_onto": report.pullback_onto,
            "proper_intersections": report.proper_intersections,
            "rational_points_dense": report.rational_points_dense,
            "all_hold": report.all_hold,
            "details": _jsonable(report.details),
        },
    }


def _serialize_map(m) -> dict:
    return {
        "degree": m.degree,
        "numerator": [str(c) for c in m.f0.coeffs],
        "denominator": [str(c) for c in m.f1.coeffs],
    }


def _run_lattes_witness(config) -> dict:
    from .dynamics_p1 import enumerate_gaussian_points

    levels = config.get("levels", [0, 1, 2, 3, 4])
    seed_height = config.get("seed_height", 10)
    pair = build_lattes_pair()
    recipe = verify_recipe(pair)
    if not recipe.all_hold:
        raise PiqLabError("recipe verification failed; no witnesses produced")
    seeds = [
        pt for pt in enumerate_gaussian_points(seed_height) if not pt.is_infinity()
    ]
    out = {"seed_height": seed_height, "witnesses": {}}
    consumed = []
    for s in levels:
        found = None
        for k, seed in enumerate(seeds):
            hits = witness_points(pair, int(s), [seed])
            if hits:
                found = hits[0]
                consumed.append(k + 1)
                break
        if found is None:
            raise SearchExhausted(f"no witness at level {s} for height {seed_height}")
        out["witnesses"][str(s)] = {
            "seed": str(found.seed),
            "pair": [str(found.point[0]), str(found.point[1])],
            "membership": found.membership,
            "non_membership": {str(i): c for i, c in sorted(found.non_membership.items())},
        }
    out["seeds_scanned_per_level"] = consumed
    return out


def _run_modp(config) -> dict:
    system = ProductSystem(_parse_map(config, "f"), _parse_map(config, "g"))
    sub = _parse_subscheme(_require(config, "subscheme", dict))
    p = _require(config, "p", int)
    report = modp_piq_report(system, sub, p)
    return _jsonable(report)


def _run_linearize(config) -> dict:
    germ = _parse_germ(config)
    trunc = config.get("conjugacy_truncation", 12)
    from .uniformize import translate_to_fixed_point

    shifted, center = translate_to_fixed_point(germ)
    conj = koenigs_linearize(shifted, trunc)
    out = conj.serialize()
    out["fixed_point_moved"] = not center.is_zero()
    out["residual_floor"] = _jsonable(conj.residual_floor)
    return out


def _run_boettcher(config) -> dict:
    germ = _parse_germ(config)
    trunc = config.get("conjugacy_truncation", 10)
    from .uniformize import translate_to_fixed_point

    shifted, center = translate_to_fixed_point(germ)
    conj = boettcher_coordinate(shifted, trunc)
    out = conj.serialize()
    out["fixed_point_moved"] = not center.is_zero()
    out["residual_floor"] = _jsonable(conj.residual_floor)
    return out


def _run_gauss_norm(config) -> dict:
    series, radius = _parse_series(config)
    exponent = series_gauss_norm(series, radius)
    return {
        "norm_exponent": _jsonable(exponent),
        "norm": f"{series.p}^{exponent}",
        "ord": series_ord(series, radius),
    }


def _run_ord_scan(config) -> dict:
    series, radius = _parse_series(config)
    depth = config.get("grid_depth", 4)
    stair = staircase_set(series, radius, depth)
    per_radius = {}
    for m in range(depth + 1):
        r = Radius(tuple(Fraction(m) for _ in range(series.nvars)))
        try:
            per_radius[str(m)] = series_ord(series, r)
        except PiqLabError as exc:
            per_radius[str(m)] = f"uncertified: {exc}"
    return {
        "staircase": sorted(list(stair)),
        "ord_at_grid": per_radius,
        "grid_depth": depth,
    }


def _run_period_bound(config) -> dict:
    n = _require(config, "dimension", int)
    return {"dimension": n, "period_bound": period_bound(n)}


def _run_cyclo_split(config) -> dict:
    rows = _require(config, "matrix", list)
    m = RationalMatrix([[Fraction(str(x)) for x in row] for row in rows])
    n0, mult, rest = minpoly_cyclotomic_split(m)
    return {
        "n0": n0,
        "multiplicity": mult,
        "cofactor": [str(c) for c in rest.coeffs],
    }


def _run_descend(config) -> dict:
    f = _parse_map(config, "f")
    sym = symmetric_square_descent(f)
    out = {"degree": f.degree, "forms": []}
    for form in sym.forms:
        out["forms"].append(
            sorted([[k[0], k[1], k[2], str(c)] for k, c in form.coeffs.items()])
        )
    if "point" in config:
        u, v, w = (Fraction(str(x)) for x in config["point"])
        from .dynamics_p1 import P2Point

        image = sym.apply(P2Point(u, v, w))
        out["point_image"] = list(image.coords)
    return out


_DISPATCH = {
    "piq-run": lambda cfg: _run_piq(cfg, generalized=False),
    "gpiq-run": lambda cfg: _run_piq(cfg, generalized=True),
    "lattes-build": _run_lattes_build,
    "lattes-witness": _run_lattes_witness,
    "modp-report": _run_modp,
    "linearize": _run_linearize,
    "boettcher": _run_boettcher,
    "gauss-norm": _run_gauss_norm,
    "ord-scan": _run_ord_scan,
    "period-bound": _run_period_bound,
    "cyclo-split": _run_cyclo_split,
    "descend-sym2": _run_descend,
}


def run(config: dict) -> dict:
    """Dispatch a parsed config to its experiment; returns the report body."""
    command = _require(config, "command", str)
    if command not in _DISPATCH:
        raise ConfigError(f"unknown command {command!r}")
    results = _DISPATCH[command](config)
    return {
        "schema_version": "1",
        "artifact_version": __version__,
        "command": command,
        "config": config,
        "results": results,
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="piqlab", description="exact preimage-stabilization experiments"
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS, default=None)
    parser.add_argument("--config", required=True, help="path to a JSON config")
    parser.add_argument("--out", default=None, help="report output path")
    parser.add_argument(
        "--jobs",
        type=int,
        default=None,
        help="worker cap (falls back to PIQ_LAB_JOBS; the engine is sequential"
        " and treats this as an upper bound)",
    )
    parser.add_argument("--seed", type=int, default=None, help="seed echoed into the report")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"piqlab: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command is not None:
        if "command" in config and config["command"] != args.command:
            print(
                "piqlab: positional command disagrees with the config", file=sys.stderr
            )
            return EXIT_CONFIG
        config["command"] = args.command
    jobs = args.jobs
    if jobs is None and os.environ.get("PIQ_LAB_JOBS"):
        try:
            jobs = int(os.environ["PIQ_LAB_JOBS"])
        except ValueError:
            print("piqlab: PIQ_LAB_JOBS is not an integer", file=sys.stderr)
            return EXIT_CONFIG
    if jobs is not None:
        config.setdefault("jobs", jobs)
    if args.seed is not None:
        config.setdefault("seed", args.seed)

    started = time.monotonic()
    try:
        report = run(config)
    except ConfigError as exc:
        print(f"piqlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvarianceViolated as exc:
        print(f"piqlab: invariance violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANCE
    except ExtensionRequired as exc:
        print(f"piqlab: extension required: {exc}", file=sys.stderr)
        return EXIT_EXTENSION
    except PrecisionLoss as exc:
        print(f"piqlab: precision loss: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except SearchExhausted as exc:
        print(f"piqlab: search exhausted: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except PiqLabError as exc:
        print(f"piqlab: {exc}", file=sys.stderr)
        return 1
    elapsed = time.monotonic() - started

    text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    if args.out:
        tmp = args.out + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, args.out)
    else:
        sys.stdout.write(text)
    print(f"piqlab: {config['command']} finished in {elapsed:.2f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
