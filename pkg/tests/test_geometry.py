import math

import numpy as np
import pytest

from polychar.geometry import (
    SpherePoint,
    decompose_many,
    density_diagnostic,
    kronecker_generators,
    sphere_difference_decompose,
)


def _check(p, q, x, delta):
    assert abs(np.linalg.norm(p.coords) - delta) <= 1e-12 * delta
    assert abs(np.linalg.norm(q.coords) - delta) <= 1e-12 * delta
    assert np.linalg.norm(q.coords - p.coords - x) <= 1e-10 * delta


def test_boundary_case_is_antipodal():
    x = np.array([0.0, 2.0, 0.0])
    p, q = sphere_difference_decompose(x, 1.0)
    assert np.allclose(p.coords, -x / 2) and np.allclose(q.coords, x / 2)


def test_zero_vector_uses_first_axis():
    p, q = sphere_difference_decompose(np.zeros(3), 2.0)
    assert np.allclose(p.coords, [2, 0, 0]) and np.allclose(q.coords, [2, 0, 0])


def test_unit_example_up_to_reflection():
    x = np.array([1.0, 0.0])
    p, q = sphere_difference_decompose(x, 1.0)
    _check(p, q, x, 1.0)
    assert np.allclose(np.abs(p.coords), [0.5, math.sqrt(3) / 2])
    assert np.allclose(np.abs(q.coords), [0.5, math.sqrt(3) / 2])


def test_decompose_errors():
    with pytest.raises(ValueError):
        sphere_difference_decompose(np.array([1.0]), 1.0)
    with pytest.raises(ValueError):
        sphere_difference_decompose(np.array([3.0, 0.0]), 1.0)
    with pytest.raises(ValueError):
        SpherePoint(np.array([1.0, 1.0]), 1.0)


def test_vectorised_matches_scalar():
    rng = np.random.default_rng(3)
    xs = rng.uniform(-1, 1, size=(50, 3))
    ps, qs = decompose_many(xs, 1.0)
    for x, p, q in zip(xs, ps, qs):
        sp_, sq = sphere_difference_decompose(x, 1.0)
        assert np.allclose(sp_.coords, p) and np.allclose(sq.coords, q)


def test_kronecker_generators_reproduce_differences():
    pts = kronecker_generators(2, 1.0, 3)
    assert len(pts) == 6
    for p in pts:
        assert abs(np.linalg.norm(p.coords) - 1.0) <= 1e-12
    diffs = [pts[2 * k + 1].coords - pts[2 * k].coords for k in range(3)]
    assert np.allclose(diffs[0], [1, 0]) and np.allclose(diffs[1], [0, 1])
    assert np.allclose(diffs[2], [math.sqrt(2) / 4, math.sqrt(3) / 4])


def test_kronecker_errors():
    with pytest.raises(ValueError):
        kronecker_generators(1, 1.0, 2)
    with pytest.raises(ValueError):
        kronecker_generators(3, 1.0, 2)


def test_density_single_point_and_lattice():
    single = density_diagnostic(np.array([[0.3, 0.1]]), 1.0, 0.1, 20)
    assert 0 < single < 1
    lattice = density_diagnostic(np.array([[1, 0], [0, 1], [0.5, 0], [0, 1 / 3]]), 1.0, 0.05, 20)
    assert lattice <= 0.5


def test_density_monotone_in_coeff_bound():
    pts = np.array([p.coords for p in kronecker_generators(2, 1.0, 3)])
    fills = [density_diagnostic(pts, 1.0, 0.05, b) for b in (1, 2, 4, 8)]
    assert all(a <= b for a, b in zip(fills, fills[1:]))
    assert fills[0] < fills[-1]
