import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import SQUARE, random_exterior_point, random_polytope
from convexeq.geometry import (
    TOL_FEAS,
    Ball,
    ConvergenceError,
    NormalCone,
    Polytope,
    contains,
    exposed_points_sample,
    exposing_margin,
    extreme_points,
    farthest_points,
    gauss_map_contains,
    locate_partition_cell,
    min_norm_point,
    normal_cone_contains,
    project,
)
from convexeq.oracle import exposing_lp, nearest_point_enumeration


def square_boundary_grid(step=1e-4):
    t = np.arange(-1.0, 1.0 + step / 2, step)
    one = np.ones_like(t)
    return np.vstack([np.column_stack([t, one]), np.column_stack([t, -one]),
                      np.column_stack([one, t]), np.column_stack([-one, t])])


def as_set(points):
    return sorted(map(tuple, np.round(np.asarray(points), 12).tolist()))


# --- bodies ---------------------------------------------------------------


def test_polytope_rejects_duplicate_generators():
    with pytest.raises(ValueError, match="coincide"):
        Polytope([[0, 0], [1, 0], [0, 0]])


def test_bodies_are_immutable(square):
    with pytest.raises(ValueError):
        square.generators[0, 0] = 5.0
    with pytest.raises(Exception):
        square.generators = np.zeros((1, 2))


@pytest.mark.parametrize("radius", [0.0, -1.0, math.inf])
def test_ball_needs_positive_radius(radius):
    with pytest.raises(ValueError):
        Ball([0, 0], radius)


def test_nonfinite_points_rejected():
    with pytest.raises(ValueError):
        Polytope([[0, math.nan]])


# --- contains -------------------------------------------------------------


def test_contains_interior(square):
    assert contains(square, [0, 0])


def test_contains_far_point(square):
    # boundary-grid distance from (2, 2) is sqrt 2, far beyond the tolerance
    grid_dist = np.min(np.linalg.norm(square_boundary_grid() - [2, 2], axis=1))
    assert grid_dist == pytest.approx(math.sqrt(2), abs=1e-9)
    assert not contains(square, [2, 2], tol=1e-9)


def test_contains_ball_boundary(disk):
    assert contains(disk, [1, 0])
    assert not contains(disk, [1.01, 0])


def test_contains_dimension_mismatch(square):
    with pytest.raises(ValueError, match="dimension"):
        contains(square, [0, 0, 0])


# --- extreme and exposed points ----------------------------------------------


def test_extreme_points_square(square):
    assert as_set(extreme_points(square)) == as_set(SQUARE)


def test_extreme_points_drop_center():
    S = Polytope(SQUARE + [[0, 0]])
    assert as_set(extreme_points(S)) == as_set(SQUARE)


def test_extreme_points_singleton():
    S = Polytope([[0.3, -2.0]])
    assert_allclose(extreme_points(S), [[0.3, -2.0]])


def test_extreme_points_collinear():
    S = Polytope([[0, 0], [0.5, 0.5], [1, 1], [0.25, 0.25]])
    assert as_set(extreme_points(S)) == as_set([[0, 0], [1, 1]])


def test_exposed_sample_square_is_corners(square):
    # each corner is the unique argmin of <c, .> over a dense grid of the
    # square when c is taken from the negated quadrant cone at that corner
    t = np.linspace(-1, 1, 201)
    grid = np.array(np.meshgrid(t, t)).reshape(2, -1).T
    for corner in SQUARE:
        c = -np.array(corner, dtype=float) * [1.0, 0.5]
        vals = grid @ c
        winners = grid[vals <= vals.min() + 1e-12]
        assert as_set(winners) == as_set([corner])
    assert as_set(exposed_points_sample(Polytope(SQUARE), 10)) == as_set(SQUARE)


def test_exposed_sample_disk(disk):
    pts = exposed_points_sample(disk, 4)
    assert_allclose(pts, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)


def test_exposed_sample_single_generator():
    assert_allclose(exposed_points_sample(Polytope([[2.0, 3.0]]), 7), [[2.0, 3.0]])


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_sphere_samples_lie_on_sphere(n):
    B = Ball(np.arange(n, dtype=float), 2.5)
    pts = exposed_points_sample(B, 64)
    assert_allclose(np.linalg.norm(pts - B.center, axis=1), 2.5)


# --- projection -------------------------------------------------------------


def test_project_corner(square):
    res = project(square, [2, 2])
    assert_allclose(res.point, [1, 1])
    # (2,2) - (1,1) lies in the quadrant cone at (1,1)
    assert normal_cone_contains(square, [1, 1], [1, 1])
    assert res.residual <= TOL_FEAS


def test_project_inside_is_identity(square, disk):
    for S in (square, disk):
        res = project(S, [0.25, -0.5])
        assert_allclose(res.point, [0.25, -0.5])
        assert res.residual == 0.0


def test_project_ball(disk):
    assert_allclose(project(disk, [3, 0]).point, [1, 0])


def test_project_top_edge(square):
    assert_allclose(project(square, [0, 5]).point, [0, 1])


def test_project_matches_enumeration(rng):
    for _ in range(60):
        n = int(rng.integers(1, 5))
        S = random_polytope(rng, n, 15, m_min=1)
        x = rng.uniform(-3, 3, n)
        res = project(S, x)
        _, d = nearest_point_enumeration(S.generators, x)
        assert np.linalg.norm(res.point - x) == pytest.approx(d, abs=1e-10)
        assert res.residual <= TOL_FEAS


def test_project_nonconvergence_carries_best_iterate(square):
    with pytest.raises(ConvergenceError) as info:
        # the answer (0, 1) lies mid-edge, so no iterations means no certificate
        project(square, [0.0, 5.0], max_iter=0)
    assert info.value.point.shape == (2,)
    assert info.value.residual > TOL_FEAS


def test_min_norm_point_simplex():
    # nearest point of the standard simplex in R^3 to the origin is (1/3, 1/3, 1/3)
    x, active, weights, gap, _ = min_norm_point(np.eye(3))
    assert_allclose(x, [1 / 3] * 3)
    assert sorted(active) == [0, 1, 2]
    assert gap <= 1e-15


coords = st.floats(-2, 2, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=12, unique=True),
       st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
def test_projection_variational_certificate(gens, x):
    gens = np.unique(np.round(np.array(gens), 6), axis=0)
    S = Polytope(gens)
    res = project(S, x)
    # the certificate inequality holds on every generator, hence on all of S
    assert np.max((S.generators - res.point) @ (np.asarray(x) - res.point)) <= TOL_FEAS
    again = project(S, res.point)
    assert np.linalg.norm(again.point - res.point) <= TOL_FEAS


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_projection_nonexpansive(seed):
    rng = np.random.default_rng(seed)
    S = random_polytope(rng, int(rng.integers(2, 4)), 12)
    x, y = rng.uniform(-4, 4, (2, S.dim))
    px, py = project(S, x).point, project(S, y).point
    assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 10 * TOL_FEAS


def test_characterization_both_directions(rng):
    """x0 = P(x*) iff the generator inequality holds: perturbed points fail it."""
    for _ in range(50):
        S = random_polytope(rng, 2, 10)
        x = random_exterior_point(rng, S)
        x0 = project(S, x).point
        assert np.max((S.generators - x0) @ (x - x0)) <= TOL_FEAS
        other = project(S, x0 + rng.normal(0, 0.3, 2)).point
        if np.linalg.norm(other - x0) > 1e-6:
            assert np.max((S.generators - other) @ (x - other)) > TOL_FEAS


def test_hull_of_extreme_points_covers_generators(rng):
    for _ in range(30):
        n = int(rng.integers(2, 4))
        S = random_polytope(rng, n, 20)
        E = Polytope(extreme_points(S))
        for g in S.generators:
            assert np.linalg.norm(project(E, g).point - g) <= TOL_FEAS


# --- normal cones and Gauss map --------------------------------------------


def test_corner_cone(square):
    assert normal_cone_contains(square, [1, 1], [0.5, 2])
    assert not normal_cone_contains(square, [1, 1], [-0.5, 2])


def test_edge_cone(square):
    assert normal_cone_contains(square, [0, 1], [0, 1])
    assert not normal_cone_contains(square, [0, 1], [0.1, 1])


def test_zero_is_always_normal(square, disk):
    assert normal_cone_contains(square, [0.3, 0.3], [0, 0])
    assert normal_cone_contains(disk, [0.0, 0.5], [0, 0])


def test_interior_cone_is_trivial(square, disk):
    assert not normal_cone_contains(square, [0, 0], [1e-3, 0])
    assert normal_cone_contains(square, [0, 0], [1e-10, 0])
    assert not normal_cone_contains(disk, [0, 0], [0, 1e-3])


def test_ball_cone(disk):
    assert normal_cone_contains(disk, [1, 0], [3, 0])
    assert not normal_cone_contains(disk, [1, 0], [3, 0.1])


def test_cone_base_must_be_in_body(square):
    with pytest.raises(ValueError, match="not in the body"):
        normal_cone_contains(square, [2, 2], [1, 1])
    with pytest.raises(ValueError):
        NormalCone(square, [0, 1.5])


def test_normal_cone_object(square):
    cone = NormalCone(square, [1, -1])
    assert [2, -3] in cone
    assert [-2, -3] not in cone


def test_gauss_map(square, disk):
    u = np.array([1, 1]) / math.sqrt(2)
    assert gauss_map_contains(square, [1, 1], u)
    assert not gauss_map_contains(square, [1, 1], [1, 1])
    assert gauss_map_contains(disk, [1, 0], [1, 0])
    with pytest.raises(ValueError):
        gauss_map_contains(square, [3, 3], [1, 0])


def test_gauss_map_equivalence(rng):
    for _ in range(200):
        S = random_polytope(rng, int(rng.integers(2, 4)), 12)
        x = random_exterior_point(rng, S)
        x0 = project(S, x).point
        u = (x - x0) / np.linalg.norm(x - x0)
        assert gauss_map_contains(S, x0, u)


# --- partition --------------------------------------------------------------


def test_partition_cell_corner(square):
    assert_allclose(locate_partition_cell(square, [2, 2]), [1, 1])


def test_partition_cell_edge(square):
    assert_allclose(locate_partition_cell(square, [0, 5]), [0, 1])


def test_partition_cell_interior_errors(square):
    with pytest.raises(ValueError, match="no partition cell"):
        locate_partition_cell(square, [0, 0])


def test_partition_cells_unique_under_perturbation(rng, square):
    """Cells do not overlap: bases from nearby starts converge to one point."""
    for _ in range(100):
        x = random_exterior_point(rng, square, 5)
        base = locate_partition_cell(square, x)
        for _ in range(3):
            # reordering the generators changes Wolfe's starting support
            perm = Polytope(square.generators[rng.permutation(4)])
            assert np.linalg.norm(locate_partition_cell(perm, x) - base) <= 10 * TOL_FEAS


def test_partition_offsets_return_to_base(rng, square):
    """Each x + u with u normal at boundary x lies in the cell of x and no other."""
    for _ in range(300):
        x = project(square, rng.uniform(-4, 4, 2)).point
        if not contains(square, x) or np.max(np.abs(x)) < 1 - 1e-9:
            continue
        u = rng.normal(size=2)
        if not normal_cone_contains(square, x, u, 0.0):
            u = np.sign(x) * np.abs(u) * (np.abs(x) >= 1 - 1e-12)
        if np.linalg.norm(u) == 0:
            continue
        assert normal_cone_contains(square, x, u)
        assert_allclose(locate_partition_cell(square, x + u), x, atol=1e-9)


def test_ball_partition(disk, rng):
    for _ in range(100):
        x = random_exterior_point(rng, disk, 4)
        base = locate_partition_cell(disk, x)
        assert_allclose(base, x / np.linalg.norm(x))


# --- farthest points ------------------------------------------------------


def test_farthest_square_off_center(square):
    # brute force over the corners
    d = np.linalg.norm(np.array(SQUARE) - [0.5, 0.5], axis=1)
    assert np.array(SQUARE)[np.argmax(d)].tolist() == [-1, -1]
    fp = farthest_points(square, [0.5, 0.5])
    assert_allclose(fp.points, [[-1, -1]])
    assert not fp.degenerate


def test_farthest_square_center(square):
    assert as_set(farthest_points(square, [0, 0]).points) == as_set(SQUARE)


def test_farthest_ball(disk):
    assert_allclose(farthest_points(disk, [2, 0]).points, [[-1, 0]])


def test_farthest_ball_center_is_degenerate(disk):
    fp = farthest_points(disk, [0, 0], count=16)
    assert fp.degenerate
    assert len(fp) == 16
    assert_allclose(np.linalg.norm(fp.points, axis=1), 1.0)


def test_farthest_points_are_exposed(rng):
    for _ in range(100):
        S = random_polytope(rng, int(rng.integers(2, 4)), 15)
        x = rng.uniform(-2, 2, S.dim)
        verts = np.array(S.vertices)
        for p in farthest_points(S, x):
            i = int(np.argmin(np.linalg.norm(verts - p, axis=1)))
            assert exposing_lp(verts, i) > 1e-9
            assert exposing_margin(S, p, p - x) > 0
