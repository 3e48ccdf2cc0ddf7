from fractions import Fraction
from random import Random

import pytest
from hypothesis import strategies as st

from coarsebench import MetricTower, portal_double, tower_from_generator


@pytest.fixture
def line6():
    """Six-level integer line, big enough for window-3 verdicts."""
    return tower_from_generator("integer_line", {"radii": [4, 8, 12, 16, 20, 24]})


@pytest.fixture
def line_small():
    return tower_from_generator("integer_line", {"radii": [3, 6, 9]})


@pytest.fixture
def flat40():
    """Single full level: the complete-space setting for exact laws."""
    return tower_from_generator("integer_line", {"spans": [[0, 39]]})


@pytest.fixture
def unit5():
    return tower_from_generator("discrete_unit", {"sizes": [5]})


def shortest_path_tower(weights):
    """Metric closure of a symmetric positive weight matrix: always a metric."""
    n = len(weights)
    d = [[0 if i == j else weights[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                via = d[i][k] + d[k][j]
                if via < d[i][j]:
                    d[i][j] = via
    pts = list(range(n))
    table = {(i, j): d[i][j] for i in pts for j in pts}
    return MetricTower([pts], lambda p, q: table[(p, q)])


@st.composite
def metric_towers(draw, max_points=7):
    n = draw(st.integers(min_value=2, max_value=max_points))
    weights = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            weights[i][j] = draw(st.integers(min_value=1, max_value=9))
    return shortest_path_tower(weights)


@st.composite
def square_matrices(draw, max_points=5):
    """Arbitrary small symmetric nonneg matrices; only some are metrics."""
    n = draw(st.integers(min_value=2, max_value=max_points))
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m[i][j] = m[j][i] = draw(st.integers(min_value=0, max_value=6))
    return m


@st.composite
def portal_doubles(draw, tower, label="h"):
    """Valid doubles over an integer-labeled tower: one-isometry portals."""
    pts = tower.points(-1)
    universe = set(pts)
    sign = draw(st.sampled_from((1, -1)))
    span = max(pts) - min(pts)
    shift = draw(st.integers(min_value=-span // 3, max_value=span // 3))
    domain = [p for p in pts if sign * p + shift in universe]
    if not domain:
        sign, shift = 1, 0
        domain = list(pts)
    chosen = draw(st.sets(st.sampled_from(domain), min_size=1, max_size=min(8, len(domain))))
    costs = draw(st.lists(st.integers(min_value=1, max_value=6), min_size=len(chosen), max_size=len(chosen)))
    portals = [(a, sign * a + shift, t) for a, t in zip(sorted(chosen), costs)]
    return portal_double(tower, portals, label, check=False)


def seeded_doubles(tower, seed, count):
    from coarsebench import random_portal_double

    rng = Random(seed)
    return [random_portal_double(tower, rng, f"r{i}") for i in range(count)]
