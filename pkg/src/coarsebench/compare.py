"""Empirical coarse-equivalence engine.

Coarse equivalence is an asymptotic property; finite truncations can only
gather evidence.  The engine therefore returns a three-valued verdict:

* ``equivalent``   - both directional distortion profiles are finite and
  unchanged over the last `window` levels (the profiles themselves are the
  control-function evidence, recorded with <= in both directions);
* ``not_equivalent`` - some radius r admits pairs whose first-metric value
  stays <= r while the second-metric value strictly grows level after level
  past the growth threshold; the pairs are returned as witnesses and
  re-verified by direct evaluation before the verdict is emitted;
* ``inconclusive`` - anything else, with per-level distortion tables as
  diagnostics.

Distances are exact rationals throughout, so "unchanged" means equality,
not closeness.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .exact import Q, as_q, q_str
from .spaces import InputError, MetricTower, json_point, metric_fn, point_sort_key

LeveledDist = Callable[[int, object, object], Q]

EQUIVALENT = "equivalent"
NOT_EQUIVALENT = "not_equivalent"
INCONCLUSIVE = "inconclusive"


def level_free(dist) -> LeveledDist:
    """Lift a plain (p, q) -> value metric to the leveled calling convention."""
    return lambda _level, p, q: dist(p, q)


@dataclass(frozen=True)
class ControlFunction:
    """Monotone sampled control: r -> largest opposite-metric value seen at <= r."""

    samples: tuple[tuple[Q, Q], ...]

    def __post_init__(self):
        rs = [r for r, _ in self.samples]
        vs = [v for _, v in self.samples]
        if rs != sorted(rs) or vs != sorted(vs):
            raise ValueError("control samples must be monotone nondecreasing")

    def value_at(self, r: Q) -> Q:
        idx = bisect.bisect_right([s[0] for s in self.samples], as_q(r)) - 1
        if idx < 0:
            return 0
        return self.samples[idx][1]

    def to_json(self):
        return [[q_str(r), q_str(v)] for r, v in self.samples]


@dataclass(frozen=True)
class WitnessPair:
    p: object
    q: object
    value_a: Q
    value_b: Q
    level: int

    def to_json(self):
        return {
            "p": json_point(self.p),
            "q": json_point(self.q),
            "value_a": q_str(self.value_a),
            "value_b": q_str(self.value_b),
            "level": self.level,
        }


@dataclass(frozen=True)
class LevelTable:
    level: int
    size: int
    forward: ControlFunction
    reverse: ControlFunction

    def to_json(self):
        return {
            "level": self.level,
            "size": self.size,
            "forward": self.forward.to_json(),
            "reverse": self.reverse.to_json(),
        }


@dataclass(frozen=True)
class ComparisonConfig:
    window: int = 3
    growth_threshold: Optional[Q] = None

    def to_json(self):
        return {
            "window": self.window,
            "growth_threshold": None if self.growth_threshold is None else q_str(self.growth_threshold),
        }


@dataclass(frozen=True)
class CoarseVerdict:
    tag: str
    control: Optional[tuple[ControlFunction, ControlFunction]] = None
    witnesses: tuple[WitnessPair, ...] = ()
    bound: Optional[Q] = None
    bound_metric: Optional[str] = None
    tables: tuple[LevelTable, ...] = ()
    notes: tuple[str, ...] = ()
    config: ComparisonConfig = field(default_factory=ComparisonConfig)

    @property
    def is_equivalent(self) -> bool:
        return self.tag == EQUIVALENT

    def to_json(self):
        return {
            "tag": self.tag,
            "control": None if self.control is None else {
                "forward": self.control[0].to_json(),
                "reverse": self.control[1].to_json(),
            },
            "witnesses": [w.to_json() for w in self.witnesses],
            "bound": None if self.bound is None else q_str(self.bound),
            "bound_metric": self.bound_metric,
            "tables": [t.to_json() for t in self.tables],
            "notes": list(self.notes),
            "config": self.config.to_json(),
        }


# ---------------------------------------------------------------------------
# profiles

def _pair_values(dA: LeveledDist, dB: LeveledDist, level: int, points: Sequence):
    """Sorted (dA, dB) values over distinct unordered pairs, plus prefix maxima."""
    vals = []
    n = len(points)
    for i in range(n):
        p = points[i]
        for j in range(i + 1, n):
            q = points[j]
            vals.append((as_q(dA(level, p, q)), as_q(dB(level, p, q)), p, q))
    vals.sort(key=lambda t: (t[0], point_sort_key(t[2]), point_sort_key(t[3])))
    prefix_max = []
    best = 0
    best_pair = None
    for a, b, p, q in vals:
        if best_pair is None or b > best:
            best = b
            best_pair = (p, q)
        prefix_max.append((best, best_pair))
    return vals, prefix_max


def _profile_on_grid(vals, prefix_max, grid):
    keys = [t[0] for t in vals]
    samples = []
    attaining = []
    for r in grid:
        idx = bisect.bisect_right(keys, r) - 1
        if idx < 0:
            samples.append((r, 0))
            attaining.append(None)
        else:
            best, pair = prefix_max[idx]
            samples.append((r, best))
            attaining.append(pair)
    return ControlFunction(tuple(samples)), attaining


def distortion_profile(dA, dB, points: Sequence, grid: Sequence[Q]) -> ControlFunction:
    """phi(r) = max { dB(p,q) : dA(p,q) <= r } over one level's point set.

    `dA` and `dB` are plain (p, q) callables defined on the same points;
    the result is monotone nondecreasing by construction.
    """
    grid = sorted({as_q(r) for r in grid})
    vals, prefix_max = _pair_values(level_free(dA), level_free(dB), 0, points)
    profile, _ = _profile_on_grid(vals, prefix_max, grid)
    return profile


def attained_values(dist, points: Sequence) -> tuple:
    """Distinct positive values of `dist` over distinct pairs, sorted."""
    seen = set()
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            seen.add(as_q(dist(points[i], points[j])))
    return tuple(sorted(seen))


# ---------------------------------------------------------------------------
# the verdict engine

def _auto_threshold(vals_smallest) -> Q:
    top = max((b for _, b, _, _ in vals_smallest), default=0)
    return as_q(2 * top + 1)


def compare_leveled(dA: LeveledDist, dB: LeveledDist, levels: Sequence[Sequence], config: ComparisonConfig = ComparisonConfig()) -> CoarseVerdict:
    """Core engine over explicit level point sets and leveled metrics."""
    window = config.window
    if window < 1:
        raise InputError("stability window must be >= 1")
    notes: list[str] = []
    if len(levels) < window:
        return CoarseVerdict(
            tag=INCONCLUSIVE,
            notes=(f"only {len(levels)} level(s) materialized, below the stability window {window}",),
            config=config,
        )

    per_level = []
    for i, pts in enumerate(levels):
        fwd = _pair_values(dA, dB, i, pts)
        rev = _pair_values(dB, dA, i, pts)
        per_level.append((pts, fwd, rev))

    grid_a = sorted({a for a, _, _, _ in per_level[0][1][0]})
    grid_b = sorted({a for a, _, _, _ in per_level[0][2][0]})
    if not grid_a or not grid_b:
        return CoarseVerdict(
            tag=INCONCLUSIVE,
            notes=("smallest level attains no positive distances; no radius grid",),
            config=config,
        )

    tables = []
    fwd_profiles, rev_profiles = [], []
    fwd_attain, rev_attain = [], []
    for i, (pts, fwd, rev) in enumerate(per_level):
        pf, at_f = _profile_on_grid(fwd[0], fwd[1], grid_a)
        pr, at_r = _profile_on_grid(rev[0], rev[1], grid_b)
        fwd_profiles.append(pf)
        rev_profiles.append(pr)
        fwd_attain.append(at_f)
        rev_attain.append(at_r)
        tables.append(LevelTable(level=i, size=len(pts), forward=pf, reverse=pr))

    def stable(profiles):
        tail = profiles[-window:]
        return all(p.samples == tail[0].samples for p in tail)

    if stable(fwd_profiles) and stable(rev_profiles):
        return CoarseVerdict(
            tag=EQUIVALENT,
            control=(fwd_profiles[-1], rev_profiles[-1]),
            tables=tuple(tables),
            config=config,
        )

    def divergence(profiles, grid, dSmall, dGrow, which):
        threshold = config.growth_threshold
        if threshold is None:
            threshold = _auto_threshold(per_level[0][1][0] if which == "a" else per_level[0][2][0])
            notes.append(f"auto growth threshold for bounded metric {which}: {q_str(threshold)}")
        for gi, r in enumerate(grid):
            tail = [p.samples[gi][1] for p in profiles[-window:]]
            if all(x < y for x, y in zip(tail, tail[1:])) and tail[-1] >= threshold:
                witnesses = []
                prev = None
                for i in range(len(levels)):
                    value = profiles[i].samples[gi][1]
                    pair = (fwd_attain if which == "a" else rev_attain)[i][gi]
                    if pair is None or (prev is not None and value <= prev):
                        continue
                    p, q = pair
                    small = as_q(dSmall(i, p, q))
                    grow = as_q(dGrow(i, p, q))
                    # re-verify the witness by direct evaluation
                    if small > r or grow != value:
                        raise AssertionError("witness failed re-verification")
                    witnesses.append(
                        WitnessPair(p, q, small if which == "a" else grow, grow if which == "a" else small, i)
                    )
                    prev = value
                return r, tuple(witnesses)
        return None

    div = divergence(fwd_profiles, grid_a, dA, dB, "a")
    bound_metric = "a"
    if div is None:
        div = divergence(rev_profiles, grid_b, dB, dA, "b")
        bound_metric = "b"
    if div is not None:
        bound, witnesses = div
        return CoarseVerdict(
            tag=NOT_EQUIVALENT,
            witnesses=witnesses,
            bound=bound,
            bound_metric=bound_metric,
            tables=tuple(tables),
            notes=tuple(notes),
            config=config,
        )

    notes.append("profiles still moving but no sustained divergence past the threshold")
    return CoarseVerdict(tag=INCONCLUSIVE, tables=tuple(tables), notes=tuple(notes), config=config)


def coarse_compare(dA, dB, tower: MetricTower, config: ComparisonConfig = ComparisonConfig()) -> CoarseVerdict:
    """Compare two metrics over a tower's levels.

    `dA`/`dB` may be plain (p, q) callables, metric specs (see
    :func:`coarsebench.spaces.metric_fn`), or None for the tower's own metric.
    """
    fa = metric_fn(tower, dA) if not callable(dA) else dA
    fb = metric_fn(tower, dB) if not callable(dB) else dB
    return compare_leveled(level_free(fa), level_free(fb), tower.levels, config)
