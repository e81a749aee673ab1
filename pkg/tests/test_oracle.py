import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import SQUARE, random_polytope
from convexeq.equilibrium import difference_bifunction, eq_reduced, eq_set
from convexeq.families import build_objective
from convexeq.geometry import Ball, Polytope
from convexeq.oracle import (
    brute_eq,
    compare,
    exposing_lp,
    halfspaces,
    make_grid,
    membership_residual,
    nearest_point_enumeration,
)


def neg_dist(center):
    f = build_objective({"type": "neg_dist", "center": center}, len(center))
    return difference_bifunction(f, True, True, vectorized=True)


def test_square_grid_counts(square):
    g = make_grid(square, 1.0)
    assert len(g.points) == 9
    assert_allclose(g.points[0], [-1, -1])
    assert len(make_grid(square, 0.5).points) == 25


def test_interval_grid(interval):
    assert_allclose(make_grid(interval, 0.5).points.ravel(), [-1, -0.5, 0, 0.5, 1])


def test_interior_grid_drops_boundary(interval, square):
    assert_allclose(make_grid(interval, 0.5, interior=True).points.ravel(), [-0.5, 0, 0.5])
    assert len(make_grid(square, 1.0, interior=True).points) == 1


def test_disk_grid(disk):
    pts = make_grid(disk, 0.5).points
    assert np.all(np.linalg.norm(pts, axis=1) <= 1 + 1e-12)
    # lattice points of spacing 0.5 in the unit disk, counted by hand
    assert len(pts) == 13


def test_grid_errors(square):
    with pytest.raises(ValueError, match="positive"):
        make_grid(square, 0.0)
    with pytest.raises(ValueError, match="dimension"):
        make_grid(Polytope(np.eye(5)), 0.5)
    with pytest.raises(ValueError, match="no points"):
        make_grid(Polytope([[0.1, 0.1], [0.2, 0.3], [0.3, 0.1]]), 0.5, interior=True)


def test_flat_polytope_membership():
    S = Polytope([[0, 0], [1, 1]])
    assert halfspaces(S) is None
    r = membership_residual(S, np.array([[0.5, 0.5], [0.5, 0.6]]))
    assert r[0] <= 1e-12 and r[1] == pytest.approx(0.1 / math.sqrt(2))


def test_halfspace_residual_matches_definition(rng):
    S = random_polytope(rng, 3, 12)
    pts = rng.uniform(-2, 2, (200, 3))
    r = membership_residual(S, pts)
    H = halfspaces(S)
    assert_allclose(r, np.max(pts @ H[:, :-1].T + H[:, -1], axis=1))


def test_brute_eq_square(square):
    g = neg_dist([0.5, 0.5])
    rep = brute_eq(g, SQUARE + [[0, 0]], square, 0.05)
    assert_allclose(rep.solutions, [[-1, -1]])


def test_brute_refinement_monotone(interval):
    f = build_objective({"type": "neg_sq_dist", "center": [0.0]}, 1)
    g = difference_bifunction(f, True, True, vectorized=True)
    cand = make_grid(interval, 0.1, interior=True).points
    sizes = [len(brute_eq(g, cand, interval, h, interior=True).solutions) for h in (0.1, 0.05, 0.025)]
    # coarse tester grids keep the outermost candidates; refinement removes them
    assert sizes[0] == 2
    assert sizes[1] == sizes[2] == 0


def test_compare_agree_and_disagree(interval):
    cand = make_grid(interval, 0.25).points
    g = neg_dist([0.0])
    a = eq_reduced(g, cand, interval)
    b = brute_eq(g, cand, interval, 0.25)
    rep = compare(a, b)
    assert rep.agree and rep.hausdorff_gap == 0.0

    f = build_objective({"type": "sq_dist", "center": [0.0]}, 1)
    h = difference_bifunction(f, False, True, vectorized=True)
    with pytest.warns(UserWarning):
        forced = eq_reduced(h, cand, interval, "generators", unsafe=True)
    rep = compare(forced, brute_eq(h, cand, interval, 0.25))
    assert not rep.agree
    assert len(rep.only_in_reduced) == len(cand) - 1
    assert len(rep.only_in_brute) == 0
    assert rep.hausdorff_gap == pytest.approx(1.0)
    assert rep.to_dict()["agree"] is False


def test_compare_empty_side(interval):
    cand = make_grid(interval, 0.5, interior=True).points
    g = neg_dist([0.0])
    empty = eq_set(g, cand, [[-1.0], [1.0]])
    full = eq_set(g, cand, [])
    rep = compare(full, empty)
    assert math.isinf(rep.hausdorff_gap)
    assert rep.to_dict()["hausdorff_gap"] == "inf"


def test_compare_rejects_different_candidates(interval):
    g = neg_dist([0.0])
    with pytest.raises(ValueError, match="candidate"):
        compare(eq_set(g, [[0.0]], []), eq_set(g, [[0.5]], []))


def test_enumeration_square():
    pt, d = nearest_point_enumeration(SQUARE, [2, 0.5])
    assert_allclose(pt, [1, 0.5])
    assert d == pytest.approx(1.0)
    pt, d = nearest_point_enumeration(SQUARE, [0.2, 0.1])
    assert_allclose(pt, [0.2, 0.1])
    assert d == pytest.approx(0.0, abs=1e-12)


def test_enumeration_against_dense_hull_sample(rng):
    for _ in range(10):
        S = random_polytope(rng, 2, 6)
        x = rng.uniform(-3, 3, 2)
        _, d = nearest_point_enumeration(S.generators, x)
        w = rng.dirichlet(np.full(len(S.generators), 0.3), size=200000)
        sample = np.vstack([w @ S.generators, S.generators])
        assert d <= np.min(np.linalg.norm(sample - x, axis=1)) + 1e-12


def test_exposing_lp():
    pts = np.array(SQUARE + [[0, 0], [1, 0]], dtype=float)
    assert exposing_lp(pts, 0) > 0
    assert exposing_lp(pts, 4) <= 1e-12
    assert exposing_lp(pts, 5) <= 1e-12


def test_ball_membership(disk):
    r = membership_residual(disk, np.array([[0.0, 0.0], [2.0, 0.0]]))
    assert_allclose(r, [-1.0, 1.0])
    assert isinstance(disk, Ball)
