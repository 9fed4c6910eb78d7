import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from negolab.geometry import Domain
from negolab.pareto import (
    ParetoSample,
    frontier_distance,
    frontier_sample,
    pareto_residual,
    probe_directions,
    weight_grid,
    weighting_solution,
)
from negolab.utility import ConcaveQuadratic, Linear, LogLinear, Scaled
from tests import oracles

D = Domain.budget_simplex(2, 1.0)
CD = (LogLinear.coordinates([1.0, 0.0]), LogLinear.coordinates([0.0, 1.0]))
LIN = (Linear([1.0, 0.0]), Linear([0.0, 1.0]))
QUAD = (ConcaveQuadratic([1, 0]), ConcaveQuadratic([0, 1]))


@pytest.fixture(scope="module")
def quad_frontier():
    return frontier_sample(QUAD, 41, D)


def test_weight_grid():
    g = weight_grid(2, 3)
    np.testing.assert_allclose(g, [[1, 0], [0.5, 0.5], [0, 1]])
    g3 = weight_grid(3, 5)
    assert len(g3) == 15
    np.testing.assert_allclose(g3.sum(axis=1), 1.0)
    with pytest.raises(ValueError):
        weight_grid(2, 1)


@pytest.mark.parametrize("w", [(0.5, 0.5), (2 / 3, 1 / 3)])
def test_weighting_cobb_douglas(w):
    np.testing.assert_allclose(weighting_solution(CD, w, D), oracles.cobb_douglas(w), atol=1e-3)


def test_weighting_single_party():
    x = weighting_solution(LIN, (1.0, 0.0), D)
    assert x[0] == pytest.approx(1.0, abs=1e-6)


def test_frontier_cobb_douglas_exhausts_budget():
    ps = frontier_sample(CD, 21, D)
    assert len(ps) > 0
    np.testing.assert_allclose(ps.points.sum(axis=1), 1.0, atol=1e-3)


def test_frontier_linear_on_budget_face():
    ps = frontier_sample(LIN, 21, D)
    np.testing.assert_allclose(ps.points.sum(axis=1), 1.0, atol=1e-3)


def test_frontier_resolution_two():
    ps = frontier_sample(QUAD, 2, D, fill_gaps=False)
    np.testing.assert_allclose(np.sort(ps.points, axis=0), [[0, 0], [1, 1]], atol=1e-3)
    assert ps.boundary_weight == [True, True]


def test_frontier_points_are_efficient(quad_frontier):
    res = [pareto_residual(QUAD, p, D) for p in quad_frontier.points]
    assert max(res) <= 1e-6


def test_frontier_fills_gaps_and_spacing(quad_frontier):
    assert quad_frontier.spacing <= np.sqrt(2) / 40 * (1 + 1e-3)
    filled = [w is None for w in quad_frontier.generating_weights]
    assert len(filled) == len(quad_frontier)


def test_residual_examples():
    assert pareto_residual(CD, [0.5, 0.5], D) <= 1e-9
    assert pareto_residual(LIN, [0.2, 0.2], D) > 0
    for w in [(0.3, 0.7), (0.5, 0.5), (0.9, 0.1)]:
        assert pareto_residual(QUAD, weighting_solution(QUAD, w, D), D) <= 1e-6


def test_probe_directions_are_unit():
    for dim in (1, 2, 3, 5):
        P = probe_directions(dim, 50)
        np.testing.assert_allclose(np.linalg.norm(P, axis=1), 1.0)


def test_frontier_distance_examples(quad_frontier):
    assert frontier_distance(quad_frontier, quad_frontier) == 0.0
    scaled = frontier_sample((Scaled(2.0, QUAD[0]), QUAD[1]), 41, D)
    assert frontier_distance(quad_frontier, scaled) <= 2 * quad_frontier.spacing
    moved = frontier_sample((ConcaveQuadratic([0.8, 0]), QUAD[1]), 41, D)
    assert frontier_distance(quad_frontier, moved) > 0.05


def test_frontier_distance_matches_oracle(quad_frontier):
    moved = frontier_sample((ConcaveQuadratic([0.8, 0]), QUAD[1]), 41, D)
    assert frontier_distance(quad_frontier, moved) == pytest.approx(
        oracles.hausdorff(quad_frontier.points, moved.points), abs=1e-12
    )


def test_frontier_distance_rejects_empty(quad_frontier):
    with pytest.raises(ValueError):
        frontier_distance(quad_frontier, ParetoSample(np.empty((0, 2)), []))


point_sets = st.integers(1, 8).flatmap(
    lambda k: st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=k, max_size=k)
)


@settings(max_examples=60, deadline=None)
@given(point_sets, point_sets, point_sets)
def test_frontier_distance_is_a_metric(a, b, c):
    A, B, C = (ParetoSample(np.array(p, dtype=float), [None] * len(p)) for p in (a, b, c))
    assert frontier_distance(A, B) == frontier_distance(B, A)
    assert frontier_distance(A, A) == 0.0
    assert frontier_distance(A, C) <= frontier_distance(A, B) + frontier_distance(B, C) + 1e-9


@settings(max_examples=5, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(-3, 3), st.integers(0, 1))
def test_affine_transform_keeps_frontier(a, b, party):
    base = frontier_sample(QUAD, 31, D)
    prof = list(QUAD)
    prof[party] = Scaled(a, prof[party], b)
    moved = frontier_sample(tuple(prof), 31, D)
    assert frontier_distance(base, moved) <= 2 * base.spacing
