"""Built-in, deterministic workbench experiments, plus user catalogs.

Each entry builds its towers and doubles from named generators, runs the
relevant operations, and returns a JSON-ready report with named checks.
Reports embed the config used; with identical inputs and config the
canonical encoding is byte-identical, so they are replayable and diffable.
User catalogs are JSON experiment specs resolved from the directory named
by the COARSEBENCH_CATALOG_DIR environment variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

from .compare import EQUIVALENT, INCONCLUSIVE, ComparisonConfig, coarse_compare, compare_leveled
from .doubles import (
    DoubleMetric,
    NestedFamily,
    compare_doubles,
    idempotent_from_family,
    semigroup_probe,
    translation_double,
    unit_double,
    witness_nonequivalence,
    zero_double,
)
from .exact import as_q, q_str
from .operators import mask_contains_operator, mask_inclusion, metric_mask, pair_sum_operator
from .spaces import InputError, MetricTower, metric_fn, tower_from_generator
from .schemas import double_from_json, space_from_json

CATALOG_DIR_ENV = "COARSEBENCH_CATALOG_DIR"


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    operation: str
    inputs: dict
    config: dict = field(default_factory=dict)
    out: Optional[str] = None


def validate_experiment_spec(spec: ExperimentSpec):
    known = {"compare", "compare-doubles", "witness", "semigroup"}
    if spec.operation not in known:
        raise InputError(f"unknown experiment operation {spec.operation!r}; known: {sorted(known)}")
    for key, value in spec.config.items():
        if isinstance(value, (int, float)) and value <= 0:
            raise InputError(f"config value {key}={value} must be positive")


def _config(overrides: Optional[dict], **defaults) -> ComparisonConfig:
    merged = dict(defaults)
    merged.update(overrides or {})
    return ComparisonConfig(
        window=int(merged.get("window", 3)),
        growth_threshold=None
        if merged.get("growth_threshold") is None
        else as_q(merged["growth_threshold"]),
    )


def _check(checks: list, name: str, ok: bool, detail: str = ""):
    checks.append({"name": name, "ok": bool(ok), "detail": detail})


def _status(checks, verdict_tags=()) -> str:
    if any(not c["ok"] for c in checks):
        return "fail"
    if any(tag == INCONCLUSIVE for tag in verdict_tags):
        return "inconclusive"
    return "ok"


# ---------------------------------------------------------------------------
# standard doubles over integer-line towers

def interval_family(tower: MetricTower, rate: int = 1) -> NestedFamily:
    """A_n = points within rate*n of the origin."""
    top = tower.points(-1)
    reach = max(abs(p) for p in top)
    depth = reach // rate + 2
    return NestedFamily.of(
        [frozenset(x for x in top if abs(x) <= rate * n) for n in range(1, depth + 1)]
    )


def growing_family(tower: MetricTower) -> NestedFamily:
    """A_1 = {0}, then each set is the 1-neighborhood of the previous one."""
    top = tower.points(-1)
    reach = max(abs(p) for p in top)
    return NestedFamily.of(
        [frozenset(x for x in top if abs(x) <= n - 1) for n in range(1, reach + 3)]
    )


def lopsided_family(tower: MetricTower) -> NestedFamily:
    """A_n = [-n, 2n]: growth-valid but not symmetric around the origin."""
    top = tower.points(-1)
    reach = max(abs(p) for p in top)
    return NestedFamily.of(
        [frozenset(x for x in top if -n <= x <= 2 * n) for n in range(1, reach + 2)]
    )


def integer_line_catalog(tower: MetricTower) -> list[DoubleMetric]:
    """The stock doubles every integer-line experiment draws from."""
    return [
        unit_double(tower),
        zero_double(tower, 0),
        idempotent_from_family(tower, interval_family(tower, 1)),
        idempotent_from_family(tower, interval_family(tower, 2)),
        idempotent_from_family(tower, growing_family(tower)),
        idempotent_from_family(tower, lopsided_family(tower)),
        translation_double(tower, 3),
    ]


def idempotent_catalog(tower: MetricTower) -> list[DoubleMetric]:
    return [
        zero_double(tower, 0),
        idempotent_from_family(tower, interval_family(tower, 1)),
        idempotent_from_family(tower, interval_family(tower, 2)),
        idempotent_from_family(tower, growing_family(tower)),
        idempotent_from_family(tower, lopsided_family(tower)),
    ]


# ---------------------------------------------------------------------------
# built-in experiments

def squares_cubes(config: Optional[dict] = None) -> dict:
    cfg = _config(config)
    tower = tower_from_generator("signed_squares", {"radii": [4, 8, 16, 32, 48, 64]})
    verdict = coarse_compare("tower", {"name": "cube_gaps"}, tower, cfg)
    checks: list = []
    _check(checks, "square_gaps_vs_cube_gaps_equivalent", verdict.tag == EQUIVALENT, verdict.tag)
    return {
        "catalog": "squares-cubes",
        "config": cfg.to_json(),
        "results": {"verdict": verdict.to_json()},
        "checks": checks,
        "status": _status(checks, [verdict.tag]),
    }


def discrete_unit_demo(config: Optional[dict] = None) -> dict:
    from .doubles import constant_double

    cfg = _config(config)
    tower = tower_from_generator("discrete_unit", {"sizes": [4, 8, 12, 16, 20]})
    top = tower.points(-1)
    family = NestedFamily.of([frozenset({0})] + [frozenset(top)] * 2)
    doubles = [
        unit_double(tower),
        zero_double(tower, 0),
        constant_double(tower, 1),
        idempotent_from_family(tower, family),
    ]
    checks: list = []
    tags = []
    verdicts = {}
    for i, a in enumerate(doubles):
        for b in doubles[i + 1 :]:
            verdict = compare_doubles(a, b, cfg)
            tags.append(verdict.tag)
            verdicts[f"{a.label}|{b.label}"] = verdict.to_json()
            _check(checks, f"equivalent[{a.label}|{b.label}]", verdict.tag == EQUIVALENT, verdict.tag)
    saturation = {}
    for dm in doubles:
        levels_full = None
        for L in (1, 2, 3, 4):
            if metric_mask(dm, L).is_full():
                levels_full = L
                break
        saturation[dm.label] = levels_full
        _check(checks, f"mask_saturates[{dm.label}]", levels_full is not None and levels_full <= 3,
               f"full at L={levels_full}")
    return {
        "catalog": "discrete-unit",
        "config": cfg.to_json(),
        "results": {"verdicts": verdicts, "mask_full_at": saturation},
        "checks": checks,
        "status": _status(checks, tags),
    }


def injectivity_witness(config: Optional[dict] = None) -> dict:
    merged = {"C": 1, "T": 20, "min_pairs": 10}
    merged.update(config or {})
    tower = tower_from_generator("integer_line", {"radii": list(range(8, 129, 8))})
    d_unit = unit_double(tower)
    d_zero = zero_double(tower, 0)
    C, T = as_q(merged["C"]), as_q(merged["T"])
    witness = witness_nonequivalence(d_unit, d_zero, C, T)
    checks: list = []
    _check(checks, "witness_family_found", witness is not None and len(witness) >= merged["min_pairs"],
           f"{0 if witness is None else len(witness)} pairs")
    results = {"witnesses": [] if witness is None else [w.to_json() for w in witness]}
    if witness:
        _check(checks, "bounded_side_holds", all(w.value_a <= C for w in witness))
        grows = [w.value_b for w in witness]
        _check(checks, "growing_side_strict", all(a < b for a, b in zip(grows, grows[1:])) and grows[-1] > T)
        pairs = [(w.p, w.q) for w in witness]
        top = tower.points(-1)
        op = pair_sum_operator(top, top, pairs)
        in_m1 = mask_contains_operator(metric_mask(d_unit, C), op)
        in_m2 = mask_contains_operator(metric_mask(d_zero, T), op)
        _check(checks, "pair_sum_inside_bounded_mask", in_m1)
        _check(checks, "pair_sum_outside_growing_mask", not in_m2)
        results["pair_sum"] = op.to_json()
    reverse = witness_nonequivalence(d_zero, d_unit, 3, T)
    _check(checks, "reverse_search_exhausts", reverse is None,
           "unit cross stays bounded on pairs the zero double keeps cheap")
    return {
        "catalog": "injectivity-witness",
        "config": {"C": q_str(C), "T": q_str(T), "min_pairs": merged["min_pairs"]},
        "results": results,
        "checks": checks,
        "status": _status(checks),
    }


def mc_probe(config: Optional[dict] = None) -> dict:
    """Compare the same standard double built over two equivalent base metrics.

    Semi-decidable probe: verdicts and mask inclusions are evidence about the
    metric-independent part of the semigroup image, never a proof.
    """
    cfg = _config(config)
    tower_d = tower_from_generator("signed_squares", {"radii": [4, 8, 16, 32, 48, 64]})
    b_dist = metric_fn(tower_d, {"name": "cube_gaps"})
    tower_b = MetricTower(tower_d.levels, b_dist, {"name": "signed_squares+cube_gaps", "params": {}})
    checks: list = []
    tags = []
    results = {}
    for kind, build in (("unit", unit_double), ("zero", lambda t: zero_double(t, 0))):
        dm_d, dm_b = build(tower_d), build(tower_b)
        verdict = compare_leveled(dm_d.leveled_dist(), dm_b.leveled_dist(), dm_d.leveled_points(), cfg)
        tags.append(verdict.tag)
        _check(checks, f"image_stable_across_metrics[{kind}]", verdict.tag == EQUIVALENT, verdict.tag)
        masks = {}
        for L in (1, 9, 65):
            m_d, m_b = metric_mask(dm_d, L), metric_mask(dm_b, L)
            ok_ab, ex_ab = mask_inclusion(m_b, m_d)
            ok_ba, ex_ba = mask_inclusion(m_d, m_b)
            masks[q_str(L)] = {
                "size_d": len(m_d.pairs),
                "size_b": len(m_b.pairs),
                "b_inside_d": ok_ab,
                "d_inside_b": ok_ba,
            }
        results[kind] = {"verdict": verdict.to_json(), "masks": masks}
    return {
        "catalog": "mc-probe",
        "config": cfg.to_json(),
        "results": results,
        "checks": checks,
        "status": _status(checks, tags),
    }


BUILTIN: dict[str, Callable[[Optional[dict]], dict]] = {
    "squares-cubes": squares_cubes,
    "discrete-unit": discrete_unit_demo,
    "injectivity-witness": injectivity_witness,
    "mc-probe": mc_probe,
}


# ---------------------------------------------------------------------------
# user catalogs and the generic experiment runner

def run_experiment(spec: ExperimentSpec) -> dict:
    validate_experiment_spec(spec)
    cfg = _config(spec.config)
    checks: list = []
    tags = []
    results: dict = {}
    if spec.operation == "compare":
        tower = space_from_json(spec.inputs["space"], "/inputs/space")
        verdict = coarse_compare(spec.inputs.get("metric_a"), spec.inputs.get("metric_b"), tower, cfg)
        results["verdict"] = verdict.to_json()
        tags.append(verdict.tag)
    elif spec.operation == "compare-doubles":
        tower = space_from_json(spec.inputs["base"], "/inputs/base")
        d1 = double_from_json({"cross": spec.inputs["cross_a"]}, "/inputs/cross_a", base=tower)
        d2 = double_from_json({"cross": spec.inputs["cross_b"]}, "/inputs/cross_b", base=tower)
        verdict = compare_doubles(d1, d2, cfg)
        results["verdict"] = verdict.to_json()
        tags.append(verdict.tag)
    elif spec.operation == "witness":
        tower = space_from_json(spec.inputs["base"], "/inputs/base")
        d1 = double_from_json({"cross": spec.inputs["cross_a"]}, "/inputs/cross_a", base=tower)
        d2 = double_from_json({"cross": spec.inputs["cross_b"]}, "/inputs/cross_b", base=tower)
        witness = witness_nonequivalence(d1, d2, as_q(spec.config.get("C", 1)), as_q(spec.config.get("T", 10)))
        results["witnesses"] = None if witness is None else [w.to_json() for w in witness]
    elif spec.operation == "semigroup":
        tower = space_from_json(spec.inputs["base"], "/inputs/base")
        doubles = [
            double_from_json({"cross": cross}, f"/inputs/doubles/{i}", base=tower)
            for i, cross in enumerate(spec.inputs["doubles"])
        ]
        probe = semigroup_probe(doubles, spec.inputs.get("law", "associativity"), cfg)
        results["probe"] = [r.to_json() for r in probe]
        for r in probe:
            if r.exact is not None:
                _check(checks, f"{r.law}[{r.instance}]", r.exact, r.detail)
            if r.verdict is not None:
                tags.append(r.verdict.tag)
    return {
        "catalog": spec.name,
        "config": dict(spec.config),
        "results": results,
        "checks": checks,
        "status": _status(checks, tags),
    }


def run_catalog(name: str, config: Optional[dict] = None) -> dict:
    """Run a built-in experiment, or a JSON spec from the catalog directory."""
    directory = os.environ.get(CATALOG_DIR_ENV)
    if directory:
        path = os.path.join(directory, f"{name}.json")
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
            spec = ExperimentSpec(
                name=raw.get("name", name),
                operation=raw["operation"],
                inputs=raw.get("inputs", {}),
                config={**raw.get("config", {}), **(config or {})},
                out=raw.get("out"),
            )
            return run_experiment(spec)
    if name not in BUILTIN:
        raise InputError(f"unknown catalog {name!r}; built-ins: {sorted(BUILTIN)}")
    return BUILTIN[name](config)
