"""
Brute-force ground truth.

Nothing here calls the projection kernel: grid membership goes through the
facet inequalities from qhull (or the interval ends in 1-D, the radius for
balls), and the exact nearest point comes from enumerating every small
simplex of generators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from convexeq.equilibrium import Bifunction, EqReport, eq_set
from convexeq.geometry import TOL_EQ, TOL_FEAS, Ball, ConvexBody, Polytope, as_point

MAX_GRID_DIM = 4


@dataclass(frozen=True)
class Grid:
    points: np.ndarray
    resolution: float
    body: ConvexBody


@dataclass
class ComparisonReport:
    agree: bool
    only_in_reduced: np.ndarray
    only_in_brute: np.ndarray
    hausdorff_gap: float

    def to_dict(self) -> dict:
        return {
            "agree": self.agree,
            "only_in_reduced": self.only_in_reduced.tolist(),
            "only_in_brute": self.only_in_brute.tolist(),
            "hausdorff_gap": self.hausdorff_gap if math.isfinite(self.hausdorff_gap) else "inf",
        }


def halfspaces(S: Polytope) -> Optional[np.ndarray]:
    """Rows [a, b] with |a| = 1 and S = {x : a.x + b <= 0}; None if S is flat."""
    gens = S.generators
    n = S.dim
    if n == 1:
        lo, hi = gens.min(), gens.max()
        if hi - lo <= TOL_FEAS:
            return None
        return np.array([[1.0, -hi], [-1.0, lo]])
    if len(gens) <= n:
        return None
    try:
        hull = ConvexHull(gens)
    except QhullError:
        return None
    return hull.equations


def membership_residual(S: ConvexBody, pts: np.ndarray) -> np.ndarray:
    """Signed outside-distance proxy for each point (<= 0 means inside).

    Exact distance for balls and 1-D polytopes; the largest facet violation
    for full-dimensional polytopes; a brute nearest-point distance otherwise.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if isinstance(S, Ball):
        return np.linalg.norm(pts - S.center, axis=1) - S.radius
    eq = halfspaces(S)
    if eq is not None:
        return np.max(pts @ eq[:, :-1].T + eq[:, -1], axis=1)
    return np.array([nearest_point_enumeration(S.generators, p)[1] for p in pts])


def make_grid(S: ConvexBody, resolution: float, interior: bool = False) -> Grid:
    """Bounding-box lattice of spacing ``resolution`` intersected with S.

    The lattice is anchored at the lower box corner and points come out in
    lexicographic order. With ``interior`` set, only points strictly inside
    (beyond ``TOL_FEAS``) are kept, a finite model of the open set.
    """
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    if S.dim > MAX_GRID_DIM:
        raise ValueError(f"grids are limited to dimension {MAX_GRID_DIM}; got {S.dim}")
    lo, hi = S.bounding_box()
    axes = []
    for a, b in zip(lo, hi):
        k = int(math.floor((b - a) / resolution + 1e-9))
        axes.append(a + resolution * np.arange(k + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    res = membership_residual(S, pts)
    keep = res < -TOL_FEAS if interior else res <= TOL_FEAS
    pts = pts[keep]
    if len(pts) == 0:
        raise ValueError(f"grid of resolution {resolution} has no points in the body")
    return Grid(pts, float(resolution), S)


def brute_eq(g: Bifunction, candidates, S: ConvexBody, resolution: float,
             tol: float = TOL_EQ, interior: bool = False) -> EqReport:
    """eq(g | candidates, grid of S) straight from the definition."""
    grid = make_grid(S, resolution, interior)
    report = eq_set(g, candidates, grid.points, tol)
    report.reduction_used = "none"
    return report


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return math.inf
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _unmatched(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    if len(a) == 0:
        return a
    if len(b) == 0:
        return a.copy()
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return a[d.min(axis=1) > tol]


def compare(reduced: EqReport, brute: EqReport, tol: float = 10 * TOL_EQ) -> ComparisonReport:
    """Set difference of two solution sets with point-matching radius ``tol``."""
    if reduced.candidates.shape != brute.candidates.shape or not np.array_equal(
            reduced.candidates, brute.candidates):
        raise ValueError("reports were computed on different candidate lists")
    a, b = reduced.solutions, brute.solutions
    only_a = _unmatched(a, b, tol)
    only_b = _unmatched(b, a, tol)
    return ComparisonReport(len(only_a) == 0 and len(only_b) == 0, only_a, only_b, _hausdorff(a, b))


# ---------------------------------------------------------------------------
# exact nearest point by enumeration


def nearest_point_enumeration(generators, xstar, max_size: Optional[int] = None):
    """Nearest point of conv(generators) to ``xstar`` by trying every simplex.

    For every subset of at most ``n + 1`` generators, project ``xstar`` onto
    the subset's affine hull and keep it if the barycentric weights are
    nonnegative. The best kept point is the exact answer (Caratheodory).
    Returns ``(point, distance)``.
    """
    G = np.asarray(generators, dtype=float)
    x = as_point(xstar)
    m, n = G.shape
    if max_size is None:
        max_size = n + 1
    best_pt = G[np.argmin(np.linalg.norm(G - x, axis=1))]
    best = float(np.linalg.norm(best_pt - x))
    for k in range(2, min(m, max_size) + 1):
        idx = np.array(list(itertools.combinations(range(m), k)))
        Q = G[idx]                       # (C, k, n)
        Q0 = Q[:, 0, :]
        D = Q[:, 1:, :] - Q0[:, None, :]                  # (C, k-1, n)
        gram = np.matmul(D, np.transpose(D, (0, 2, 1)))   # (C, k-1, k-1)
        # affinely dependent subsets are covered by their smaller subsets
        good = np.abs(np.linalg.det(gram)) > 1e-12 * np.prod(np.einsum("cii->ci", gram), axis=1)
        if not np.any(good):
            continue
        Q0, D, gram = Q0[good], D[good], gram[good]
        rhs = np.matmul(D, (x - Q0)[:, :, None])
        beta = np.linalg.solve(gram, rhs)[:, :, 0]         # (C, k-1)
        w0 = 1.0 - beta.sum(axis=1)
        ok = (w0 >= -1e-12) & np.all(beta >= -1e-12, axis=1)
        proj = Q0 + np.matmul(beta[:, None, :], D)[:, 0, :]
        if not np.any(ok):
            continue
        dist = np.linalg.norm(proj[ok] - x, axis=1)
        j = int(np.argmin(dist))
        if dist[j] < best:
            best = float(dist[j])
            best_pt = proj[ok][j]
    return best_pt, best


def exposing_lp(points, i: int) -> float:
    """Largest margin t with <c, p_i> >= <c, p_j> + t for all j != i, |c|_inf <= 1.

    Positive exactly when p_i is an exposed point of conv(points). Solved as a
    linear program, independently of the projection kernel.
    """
    from scipy.optimize import linprog

    P = np.asarray(points, dtype=float)
    others = np.delete(P, i, axis=0)
    if len(others) == 0:
        return math.inf
    n = P.shape[1]
    # variables (c, t); maximize t
    A = np.hstack([others - P[i], np.ones((len(others), 1))])
    b = np.zeros(len(others))
    bounds = [(-1.0, 1.0)] * n + [(None, 10.0)]
    res = linprog(np.r_[np.zeros(n), -1.0], A_ub=A, b_ub=b, bounds=bounds, method="highs")
    return float(res.x[-1]) if res.success else -math.inf
