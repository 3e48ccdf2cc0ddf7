"""Command-line workbench.

Exit codes follow a CI-friendly contract for a semi-decisional engine:
0 = every assertion holds (definite verdicts included), 2 = at least one
inconclusive verdict, 1 = failure, violation, or bad input.  Reports are
JSON; with --canonical the bytes depend only on inputs and config.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys

from .catalog import BUILTIN, run_catalog
from .compare import INCONCLUSIVE, ComparisonConfig, coarse_compare
from .doubles import compare_doubles, concat, idempotent_from_family, validate_double, witness_nonequivalence
from .doubles import NestedFamily
from .exact import as_q, q_str
from .operators import (
    col_sum_bound,
    ghost_profile,
    mask_compose,
    mask_inclusion,
    metric_mask,
    row_sum_bound,
)
from .schemas import (
    SchemaError,
    canonical_json,
    double_from_json,
    double_to_json,
    operator_from_json,
    space_from_json,
    space_to_json,
    verdict_csv,
)
from .spaces import InputError, MetricTower, ball, bounded_geometry_profile, json_point, validate_metric

OK, FAIL, UNDECIDED = 0, 1, 2


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _slice_tower(tower: MetricTower, levels) -> MetricTower:
    if levels is None or levels >= tower.num_levels:
        return tower
    return MetricTower(tower.levels[:levels], tower.dist, tower.generator)


def _emit(report: dict, args) -> None:
    if getattr(args, "canonical", False):
        text = canonical_json(report)
    else:
        report = dict(report)
        report["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _metric_spec(text):
    if text is None or text == "tower":
        return "tower"
    if text.lstrip().startswith("{"):
        return json.loads(text)
    return {"name": text}


def _point(text):
    try:
        return int(text)
    except ValueError:
        return text


def _load_double_pair(args, levels=None):
    obj_a, obj_b = _read_json(args.double_a), _read_json(args.double_b)
    if obj_a.get("base") != obj_b.get("base"):
        raise SchemaError("/base", "the two doubles must declare the same base space")
    tower = _slice_tower(space_from_json(obj_a["base"], "/base"), levels)
    d1 = double_from_json(obj_a, "", base=tower)
    d2 = double_from_json(obj_b, "", base=tower)
    return tower, d1, d2


def _comparison_config(args) -> ComparisonConfig:
    return ComparisonConfig(
        window=args.window,
        growth_threshold=None if args.growth_threshold is None else as_q(args.growth_threshold),
    )


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args) -> int:
    if args.double:
        obj = _read_json(args.double)
        tower = _slice_tower(space_from_json(obj["base"], "/base"), args.levels)
        base_report = validate_metric(tower)
        dm = double_from_json(obj, "", base=tower)
        report = validate_double(dm)
        payload = {"base": base_report.to_json(), "double": report.to_json()}
        ok = base_report.ok and report.ok
    else:
        tower = _slice_tower(space_from_json(_read_json(args.space), ""), args.levels)
        report = validate_metric(tower)
        payload = {"space": report.to_json()}
        ok = report.ok
    _emit({"command": "validate", "ok": ok, "reports": payload}, args)
    return OK if ok else FAIL


def cmd_compare(args) -> int:
    cfg = _comparison_config(args)
    if args.double_a:
        _, d1, d2 = _load_double_pair(args, args.levels)
        verdict = compare_doubles(d1, d2, cfg)
        inputs = {"double_a": d1.label, "double_b": d2.label}
    else:
        tower = _slice_tower(space_from_json(_read_json(args.space), ""), args.levels)
        verdict = coarse_compare(_metric_spec(args.metric_a), _metric_spec(args.metric_b), tower, cfg)
        inputs = {"metric_a": args.metric_a or "tower", "metric_b": args.metric_b or "tower"}
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(verdict_csv(verdict))
    _emit({"command": "compare", "inputs": inputs, "verdict": verdict.to_json()}, args)
    return UNDECIDED if verdict.tag == INCONCLUSIVE else OK


def cmd_concat(args) -> int:
    _, d1, d2 = _load_double_pair(args, args.levels)
    out = concat(d1, d2, buffer=args.buffer)
    payload = double_to_json(out)
    payload["separation"] = [q_str(out.separation(l)) for l in range(out.base.num_levels)]
    payload["boundary_limited"] = {
        str(l): len(out.boundary_flags.get(l, ())) for l in range(out.base.num_levels)
    }
    _emit({"command": "concat", "double": payload}, args)
    return OK


def cmd_idempotent(args) -> int:
    tower = _slice_tower(space_from_json(_read_json(args.space), ""), args.levels)
    fam = NestedFamily.of(json.loads(args.sets))
    dm = idempotent_from_family(tower, fam, require_growth=not args.no_growth_check)
    report = validate_double(dm)
    _emit(
        {"command": "idempotent", "ok": report.ok, "validation": report.to_json(), "double": double_to_json(dm)},
        args,
    )
    return OK if report.ok else FAIL


def cmd_witness(args) -> int:
    _, d1, d2 = _load_double_pair(args, args.levels)
    witness = witness_nonequivalence(d1, d2, as_q(args.C), as_q(args.T))
    _emit(
        {
            "command": "witness",
            "C": q_str(as_q(args.C)),
            "T": q_str(as_q(args.T)),
            "witnesses": None if witness is None else [w.to_json() for w in witness],
        },
        args,
    )
    return OK


def cmd_mask(args) -> int:
    if args.double_a and args.double_b:
        if args.L1 is None or args.L2 is None:
            raise InputError("mask composition needs both --L1 and --L2")
        _, d1, d2 = _load_double_pair(args, args.levels)
        m1 = metric_mask(d1, as_q(args.L1), args.level)
        m2 = metric_mask(d2, as_q(args.L2), args.level)
        composed = mask_compose(m1, m2)
        joined = concat(d1, d2, validate=False)
        target = metric_mask(joined, as_q(args.L1) + as_q(args.L2), args.level)
        included, stray = mask_inclusion(composed, target)
        _emit(
            {
                "command": "mask",
                "L1": q_str(as_q(args.L1)),
                "L2": q_str(as_q(args.L2)),
                "composed": composed.to_json(),
                "inside_concat_mask": included,
                "counterexample": None if stray is None else [json_point(stray[0]), json_point(stray[1])],
            },
            args,
        )
        return OK if included else FAIL
    obj = _read_json(args.double)
    tower = _slice_tower(space_from_json(obj["base"], "/base"), args.levels)
    dm = double_from_json(obj, "", base=tower)
    mask = metric_mask(dm, as_q(args.L), args.level)
    if args.format == "pbm":
        text = mask.to_pbm()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return OK
    _emit({"command": "mask", "L": q_str(as_q(args.L)), "mask": mask.to_json()}, args)
    return OK


def cmd_ghost(args) -> int:
    tower = _slice_tower(space_from_json(_read_json(args.space), ""), args.levels)
    T = operator_from_json(_read_json(args.operator), "")
    radii = [as_q(r) for r in args.radii.split(",")]
    profile = ghost_profile(T, tower.dist, _point(args.basepoint), radii)
    _emit(
        {
            "command": "ghost",
            "basepoint": args.basepoint,
            "profile": {q_str(r): q_str(v) for r, v in profile.items()},
            "row_sum_bound": q_str(row_sum_bound(T)),
            "col_sum_bound": q_str(col_sum_bound(T)),
        },
        args,
    )
    return OK


def cmd_semigroup(args) -> int:
    from .doubles import semigroup_probe

    base_obj = _read_json(args.base)
    tower = _slice_tower(space_from_json(base_obj, ""), args.levels)
    crosses = _read_json(args.doubles)
    doubles = [double_from_json({"cross": c}, f"/doubles/{i}", base=tower) for i, c in enumerate(crosses)]
    probe = semigroup_probe(doubles, args.law, _comparison_config(args))
    _emit({"command": "semigroup", "law": args.law, "results": [r.to_json() for r in probe]}, args)
    failed = any(r.exact is False for r in probe)
    undecided = any(r.verdict is not None and r.verdict.tag == INCONCLUSIVE for r in probe)
    return FAIL if failed else (UNDECIDED if undecided else OK)


def cmd_catalog(args) -> int:
    config = json.loads(args.config) if args.config else None
    report = run_catalog(args.name, config)
    _emit(report, args)
    return {"ok": OK, "inconclusive": UNDECIDED}.get(report["status"], FAIL)


def cmd_space(args) -> int:
    tower = _slice_tower(space_from_json(_read_json(args.space), ""), args.levels)
    payload = {"space": space_to_json(tower), "sizes": [len(l) for l in tower.levels]}
    if args.ball_center is not None:
        payload["ball"] = sorted(ball(tower, _point(args.ball_center), as_q(args.ball_radius), args.level))
    if args.geometry_radii:
        radii = [as_q(r) for r in args.geometry_radii.split(",")]
        profile = bounded_geometry_profile(tower, radii)
        payload["geometry"] = {q_str(r): list(v) for r, v in profile.items()}
    _emit({"command": "space", **payload}, args)
    return OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coarsebench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, compare_opts=False):
        p.add_argument("--levels", type=int, default=None, help="use only the first N tower levels")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        p.add_argument("--canonical", action="store_true", help="byte-deterministic output (no timestamp)")
        if compare_opts:
            p.add_argument("--window", type=int, default=3)
            p.add_argument("--growth-threshold", dest="growth_threshold", default=None)

    p = sub.add_parser("validate", help="check metric/double axioms")
    p.add_argument("--space")
    p.add_argument("--double")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("compare", help="coarse-comparison verdict")
    p.add_argument("--space")
    p.add_argument("--metric-a", dest="metric_a")
    p.add_argument("--metric-b", dest="metric_b")
    p.add_argument("--double-a", dest="double_a")
    p.add_argument("--double-b", dest="double_b")
    p.add_argument("--csv", default=None, help="also export distortion tables as CSV")
    common(p, compare_opts=True)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("concat", help="min-plus concatenation of two doubles")
    p.add_argument("--double-a", dest="double_a", required=True)
    p.add_argument("--double-b", dest="double_b", required=True)
    p.add_argument("--buffer", type=int, default=1)
    common(p)
    p.set_defaults(fn=cmd_concat)

    p = sub.add_parser("idempotent", help="build a nested-family double")
    p.add_argument("--space", required=True)
    p.add_argument("--sets", required=True, help="JSON list of point lists")
    p.add_argument("--no-growth-check", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_idempotent)

    p = sub.add_parser("witness", help="hunt non-equivalence witness pairs")
    p.add_argument("--double-a", dest="double_a", required=True)
    p.add_argument("--double-b", dest="double_b", required=True)
    p.add_argument("--C", required=True, help="bound for the first double's cross values")
    p.add_argument("--T", required=True, help="growth target for the second double")
    common(p)
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("mask", help="support mask of a double at a cut, or a mask composition check")
    p.add_argument("--double", help="single double: dump its mask at --L")
    p.add_argument("--L")
    p.add_argument("--double-a", dest="double_a", help="with --double-b: compose masks at --L1/--L2")
    p.add_argument("--double-b", dest="double_b")
    p.add_argument("--L1", default=None)
    p.add_argument("--L2", default=None)
    p.add_argument("--level", type=int, default=-1)
    p.add_argument("--format", choices=("json", "pbm"), default="json")
    common(p)
    p.set_defaults(fn=cmd_mask)

    p = sub.add_parser("ghost", help="entry decay profile of an operator")
    p.add_argument("--operator", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--basepoint", required=True)
    p.add_argument("--radii", required=True, help="comma-separated radii")
    common(p)
    p.set_defaults(fn=cmd_ghost)

    p = sub.add_parser("semigroup", help="probe a law over a catalog of doubles")
    p.add_argument("--base", required=True, help="space JSON file")
    p.add_argument("--doubles", required=True, help="JSON file: list of cross specs")
    p.add_argument("--law", choices=("associativity", "regularity", "idempotent_commutation"), required=True)
    common(p, compare_opts=True)
    p.set_defaults(fn=cmd_semigroup)

    p = sub.add_parser("catalog", help="run a built-in or user experiment")
    p.add_argument("name", choices=None, help=f"built-ins: {sorted(BUILTIN)}")
    p.add_argument("--config", default=None, help="JSON config overrides")
    common(p)
    p.set_defaults(fn=cmd_catalog)

    p = sub.add_parser("space", help="inspect a space: balls, geometry profiles")
    p.add_argument("--space", required=True)
    p.add_argument("--ball-center", dest="ball_center", default=None)
    p.add_argument("--ball-radius", dest="ball_radius", default="1")
    p.add_argument("--geometry-radii", dest="geometry_radii", default=None)
    p.add_argument("--level", type=int, default=-1)
    common(p)
    p.set_defaults(fn=cmd_space)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        sys.stderr.write(json.dumps({"error": "schema", "pointer": exc.pointer, "message": exc.message}) + "\n")
        return FAIL
    except InputError as exc:
        sys.stderr.write(json.dumps({"error": "input", "message": str(exc)}) + "\n")
        return FAIL


if __name__ == "__main__":
    raise SystemExit(main())
