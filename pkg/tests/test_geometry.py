import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from negolab.errors import DegenerateInputError
from negolab.geometry import Domain, contains, lattice, project, ray_extent, sample, unit_direction
from tests import oracles

unit = st.floats(0, 1, allow_nan=False)


def test_contains_examples(simplex):
    assert contains(simplex, [0.3, 0.3])
    assert not contains(simplex, [0.7, 0.7])
    assert contains(simplex, [0.5, 0.5], slack=0.0)


def test_contains_dimension_mismatch(simplex):
    with pytest.raises(ValueError):
        contains(simplex, [0.1, 0.1, 0.1])


def test_contains_rejects_negative_slack(simplex):
    with pytest.raises(ValueError):
        contains(simplex, [0.1, 0.1], slack=-1.0)


def test_project_examples(simplex):
    np.testing.assert_allclose(project(simplex, [0.3, 0.3]), [0.3, 0.3])
    np.testing.assert_allclose(project(simplex, [0.7, 0.7]), [0.5, 0.5], atol=1e-6)
    np.testing.assert_allclose(project(simplex, [-0.1, 0.2]), [0.0, 0.2])


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 2), st.floats(-1, 2))
def test_project_matches_qp_oracle_and_is_idempotent(a, b):
    D = Domain.budget_simplex(2, 1.0)
    p = project(D, [a, b])
    np.testing.assert_allclose(p, oracles.simplex_projection([a, b]), atol=1e-5)
    assert contains(D, p, 1e-9)
    np.testing.assert_array_equal(project(D, p), p)


def test_ray_extent_examples(simplex):
    s = math.sqrt(2) / 2
    assert ray_extent(simplex, [0.2, 0.2], [s, s]) == pytest.approx(0.6 / math.sqrt(2), abs=1e-12)
    assert ray_extent(simplex, [0.2, 0.2], [-1, 0]) == pytest.approx(0.2)
    assert ray_extent(simplex, [0.5, 0.5], [s, s]) == 0.0


def test_ray_extent_matches_bisection_oracle(simplex):
    s = math.sqrt(2) / 2
    o, d = np.array([0.2, 0.2]), np.array([s, s])
    ref = oracles.bisect_ray_extent(lambda x: contains(simplex, x, 0.0), o, d)
    assert ray_extent(simplex, o, d) == pytest.approx(ref, abs=1e-12)


def test_ray_extent_requires_unit_direction_and_inside_origin(simplex):
    with pytest.raises(ValueError):
        ray_extent(simplex, [0.2, 0.2], [1.0, 1.0])
    with pytest.raises(ValueError):
        ray_extent(simplex, [0.9, 0.9], [1.0, 0.0])


@settings(max_examples=60, deadline=None)
@given(unit, unit, st.floats(0, 2 * math.pi))
def test_ray_extent_is_tight(a, b, theta):
    D = Domain.budget_simplex(2, 1.0)
    o = np.array([a, b]) * 0.98 * min(1.0, 0.98 / max(a + b, 1e-9))
    d = np.array([math.cos(theta), math.sin(theta)])
    lam = ray_extent(D, o, d)
    assert not contains(D, o + (lam + 1e-6) * d)
    if lam > 1e-6:
        assert contains(D, o + (lam - 1e-6) * d)
    assert contains(D, o + lam * d, 1e-9)


def test_sample_contract(simplex):
    P = sample(simplex, 500, seed=3)
    assert simplex.mask(P, 0.0).all()
    np.testing.assert_array_equal(P, sample(simplex, 500, seed=3))


def test_sample_mean_is_centroid(simplex):
    P = sample(simplex, 100_000, seed=11)
    np.testing.assert_allclose(P.mean(axis=0), [1 / 3, 1 / 3], atol=0.01)


def test_sample_degenerate_domain_signals():
    thin = Domain.polytope([[1.0, 1.0], [-1.0, -1.0]], [1.0, -1.0 + 2e-8], [0, 0], [1000, 1000])
    with pytest.raises(DegenerateInputError):
        sample(thin, 10, seed=0, batch=1024)


def test_domain_validation():
    with pytest.raises(ValueError):
        Domain.polytope([[1.0, 1.0]], [-1.0], [0, 0], [1, 1])  # empty
    with pytest.raises(ValueError):
        Domain.polytope([[1.0, 1.0], [-1.0, -1.0]], [1.0, -1.0], [0, 0], [1, 1])  # flat
    with pytest.raises(ValueError):
        Domain.polytope([], [], [0, 0], [1, np.inf])
    with pytest.raises(ValueError):
        Domain.budget_simplex(2, 0.0)


def test_domain_geometry(simplex):
    np.testing.assert_allclose(simplex.vertices, [[0, 0], [0, 1], [1, 0]])
    np.testing.assert_allclose(simplex.centroid, [1 / 3, 1 / 3])
    assert simplex.diameter == pytest.approx(math.sqrt(2))
    assert simplex.inradius == pytest.approx(1 / (2 + math.sqrt(2)), rel=1e-6)


def test_lattice_inside(simplex):
    L = lattice(simplex, 11)
    assert len(L) == 66
    assert simplex.mask(L).all()


def test_unit_direction():
    np.testing.assert_allclose(unit_direction([3, 4]), [0.6, 0.8])
    with pytest.raises(ValueError):
        unit_direction([0, 0])
