"""Equilibrium problems over convex hulls, solved by checking generators, extreme or exposed points."""

from convexeq.equilibrium import (
    Bifunction,
    UnsoundReductionError,
    eq_reduced,
    eq_set,
    solve_vi,
)
from convexeq.geometry import (
    TOL_EQ,
    TOL_FEAS,
    TOL_PT,
    Ball,
    ConvergenceError,
    FarthestPoints,
    NormalCone,
    Polytope,
    ProjectionResult,
    contains,
    exposed_points_sample,
    extreme_points,
    farthest_points,
    gauss_map_contains,
    locate_partition_cell,
    normal_cone_contains,
    project,
)

__version__ = "0.1.0"

__all__ = [
    "TOL_EQ", "TOL_FEAS", "TOL_PT",
    "Ball", "Polytope", "ProjectionResult", "FarthestPoints", "NormalCone",
    "ConvergenceError", "UnsoundReductionError", "Bifunction",
    "contains", "project", "extreme_points", "exposed_points_sample", "farthest_points",
    "normal_cone_contains", "gauss_map_contains", "locate_partition_cell",
    "eq_set", "eq_reduced", "solve_vi",
]
