"""
Convex geometry over V-polytopes and closed balls.

Bodies are immutable. Points are 1-D float arrays; point lists are 2-D
arrays with one point per row. Every polytope routine reduces to the
nearest-point kernel :func:`project`, a Wolfe min-norm-point iteration over
the generator list whose stopping rule is the generator certificate

    max_v <v - x0, x* - x0> <= tol

which is exact for conv M because the left side is affine in v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union

import numpy as np

TOL_FEAS = 1e-8
TOL_PT = 1e-12
TOL_EQ = 1e-9
DEFAULT_SEED = 42


class ConvergenceError(RuntimeError):
    """The polytope projection did not reach its certificate tolerance."""

    def __init__(self, message: str, point: np.ndarray, residual: float, iterations: int):
        super().__init__(message)
        self.point = point
        self.residual = residual
        self.iterations = iterations


def as_point(p, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError("a point needs at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite coordinates in point {arr.tolist()}")
    if dim is not None and arr.size != dim:
        raise ValueError(f"dimension mismatch: point has {arr.size} coordinates, body has {dim}")
    return arr


def as_points(ps, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(ps, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError("expected a list of points")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("non-finite coordinates in point list")
    if dim is not None and arr.shape[0] and arr.shape[1] != dim:
        raise ValueError(f"dimension mismatch: points have {arr.shape[1]} coordinates, expected {dim}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Polytope:
    """S = conv M for a finite generator list M (one generator per row)."""

    generators: np.ndarray

    def __post_init__(self):
        gens = as_points(self.generators)
        if gens.shape[0] == 0:
            raise ValueError("a polytope needs at least one generator")
        diff = gens[:, None, :] - gens[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(dist, np.inf)
        if np.any(dist <= TOL_PT):
            i, j = np.argwhere(dist <= TOL_PT)[0]
            raise ValueError(f"generators {i} and {j} coincide")
        object.__setattr__(self, "generators", _frozen(gens))

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    @cached_property
    def vertices(self) -> np.ndarray:
        return _frozen(extreme_points(self))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.generators.min(axis=0), self.generators.max(axis=0)

    def __eq__(self, other):
        return isinstance(other, Polytope) and np.array_equal(self.generators, other.generators)

    __hash__ = None

    def __repr__(self):
        return f"Polytope({self.generators.tolist()})"


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed Euclidean ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(as_point(self.center)))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.radius, self.center + self.radius

    def __eq__(self, other):
        return (
            isinstance(other, Ball)
            and np.array_equal(self.center, other.center)
            and self.radius == other.radius
        )

    __hash__ = None

    def __repr__(self):
        return f"Ball({self.center.tolist()}, {self.radius})"


ConvexBody = Union[Polytope, Ball]


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    residual: float
    iterations: int = 0


# ---------------------------------------------------------------------------
# nearest-point kernel


def _affine_minimizer(Q: np.ndarray) -> np.ndarray:
    """Weights a (sum 1) minimizing ||a @ Q|| over the affine hull of the rows of Q."""
    k = Q.shape[0]
    if k == 1:
        return np.ones(1)
    D = (Q[1:] - Q[0]).T
    beta = np.linalg.lstsq(D, -Q[0], rcond=None)[0]
    return np.concatenate([[1.0 - beta.sum()], beta])


def min_norm_point(P: np.ndarray, tol: float = TOL_FEAS, max_iter: int | None = None):
    """Wolfe's algorithm: the point of conv(rows of P) closest to the origin.

    Returns ``(x, active, weights, gap, iterations)`` where ``gap`` is
    ``|x|^2 - min_i <P_i, x>`` (zero exactly at the optimum). The loop keeps
    going past ``tol`` down to rounding level; ``tol`` is only used to decide
    whether a stalled run still counts as converged.
    """
    m, n = P.shape
    if max_iter is None:
        max_iter = 10 * m * n
    scale = max(1.0, float(np.max(np.einsum("ij,ij->i", P, P))))
    tight = 1e-15 * scale
    eps = 1e-14

    j0 = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    active = [j0]
    lam = np.ones(1)
    x = P[j0].copy()
    it = 0
    while True:
        dots = P @ x
        j = int(np.argmin(dots))
        gap = float(x @ x - dots[j])
        if gap <= tight or j in active or it >= max_iter:
            break
        it += 1
        active.append(j)
        lam = np.append(lam, 0.0)
        while True:
            alpha = _affine_minimizer(P[active])
            if np.all(alpha > eps):
                lam = alpha
                break
            it += 1
            neg = alpha <= eps
            denom = lam[neg] - alpha[neg]
            theta = float(np.min(np.where(denom > 0, lam[neg] / np.where(denom > 0, denom, 1.0), 0.0)))
            lam = theta * alpha + (1.0 - theta) * lam
            keep = lam > eps
            if not np.any(keep):
                keep[np.argmax(lam)] = True
            active = [a for a, k in zip(active, keep) if k]
            lam = lam[keep] / lam[keep].sum()
            if len(active) == 1 or it >= max_iter:
                break
        x = lam @ P[active]
    dots = P @ x
    gap = max(0.0, float(x @ x - dots.min()))
    return x, active, lam, gap, it


def _project_polytope(S: Polytope, xstar: np.ndarray, tol: float, max_iter: int | None) -> ProjectionResult:
    P = S.generators - xstar
    x, _, _, gap, it = min_norm_point(P, tol, max_iter)
    if np.linalg.norm(x) <= TOL_PT:
        return ProjectionResult(xstar.copy(), 0.0, it)
    point = xstar + x
    if gap > tol:
        raise ConvergenceError(
            f"projection did not converge: certificate {gap:.3e} > {tol:.1e} after {it} iterations",
            point, gap, it)
    return ProjectionResult(point, gap, it)


def _project_ball(S: Ball, xstar: np.ndarray) -> ProjectionResult:
    d = xstar - S.center
    r = np.linalg.norm(d)
    if r <= S.radius:
        return ProjectionResult(xstar.copy(), 0.0, 0)
    point = S.center + S.radius * d / r
    u = xstar - point
    residual = float((S.center - point) @ u + S.radius * np.linalg.norm(u))
    return ProjectionResult(point, max(0.0, residual), 0)


def project(S: ConvexBody, xstar, tol: float = TOL_FEAS, max_iter: int | None = None) -> ProjectionResult:
    """Nearest point of S to ``xstar`` with its variational certificate.

    Raises:
        ConvergenceError: the polytope iteration stopped with certificate > tol.
    """
    xstar = as_point(xstar, S.dim)
    if isinstance(S, Ball):
        return _project_ball(S, xstar)
    return _project_polytope(S, xstar, tol, max_iter)


def distance(S: ConvexBody, p) -> float:
    p = as_point(p, S.dim)
    if isinstance(S, Ball):
        return max(0.0, float(np.linalg.norm(p - S.center) - S.radius))
    return float(np.linalg.norm(p - project(S, p).point))


def contains(S: ConvexBody, p, tol: float = TOL_FEAS) -> bool:
    p = as_point(p, S.dim)
    if isinstance(S, Ball):
        return bool(np.linalg.norm(p - S.center) <= S.radius + tol)
    return distance(S, p) <= tol


def support(S: ConvexBody, d) -> float:
    """max over x in S of <x, d>."""
    d = as_point(d, S.dim)
    if isinstance(S, Ball):
        return float(S.center @ d + S.radius * np.linalg.norm(d))
    return float(np.max(S.generators @ d))


# ---------------------------------------------------------------------------
# extreme / exposed / farthest points


def extreme_points(S: Polytope, tol: float = TOL_FEAS) -> np.ndarray:
    """Generators that are not in the hull of the remaining generators."""
    gens = S.generators
    m = gens.shape[0]
    if m == 1:
        return gens.copy()
    keep = np.zeros(m, dtype=bool)
    for i in range(m):
        rest = np.delete(gens, i, axis=0)
        x, _, _, _, _ = min_norm_point(rest - gens[i], tol)
        keep[i] = np.linalg.norm(x) > tol
    return gens[keep].copy()


def sphere_points(center, radius: float, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``count`` points spread evenly on a sphere.

    2-D: equal angles starting at angle 0 (so counts divisible by 4 hit the
    axis points). 3-D: Fibonacci lattice. Higher dimensions: seeded Gaussian
    directions. 1-D spheres are the two endpoints whatever ``count`` is.
    """
    center = as_point(center)
    n = center.size
    if count < 1:
        raise ValueError("count must be positive")
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif n == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    elif n == 3:
        k = np.arange(count) + 0.5
        z = 1.0 - 2.0 * k / count
        phi = np.pi * (1.0 + math.sqrt(5.0)) * k
        rho = np.sqrt(1.0 - z * z)
        dirs = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    else:
        g = np.random.default_rng(seed).standard_normal((count, n))
        dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
    return center + radius * dirs


def exposed_points_sample(S: ConvexBody, count: int = 1024, seed: int = DEFAULT_SEED) -> np.ndarray:
    """A finite stand-in for exp S.

    For polytopes every vertex is exposed, so the vertex list is returned and
    ``count`` is ignored. For balls every boundary point is exposed; a sphere
    sample of ``count`` points is returned.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if isinstance(S, Ball):
        return sphere_points(S.center, S.radius, count, seed)
    return np.array(S.vertices)


def exposing_margin(S: ConvexBody, p, c) -> float:
    """How strictly the functional <c, .> is uniquely maximized at p over S.

    Polytope: <c, p> minus the largest <c, w> over the other vertices.
    Ball: positive iff p is on the sphere and c points along p - center
    (then the tangent hyperplane touches S only at p); returned as the
    cosine between c and the outward normal, or -inf off the sphere.
    """
    p = as_point(p, S.dim)
    c = as_point(c, S.dim)
    if isinstance(S, Ball):
        r = np.linalg.norm(p - S.center)
        cn = np.linalg.norm(c)
        if abs(r - S.radius) > TOL_FEAS or cn == 0:
            return -math.inf
        return float(c @ (p - S.center) / (cn * r))
    verts = S.vertices
    others = verts[np.linalg.norm(verts - p, axis=1) > TOL_FEAS]
    if len(others) == 0:
        return math.inf
    return float(c @ p - np.max(others @ c))


@dataclass(frozen=True)
class FarthestPoints:
    """Maximizers of |x - x*| over S; ``degenerate`` marks a sampled sphere."""

    points: np.ndarray
    degenerate: bool = False
    margins: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)


def farthest_points(S: ConvexBody, xstar, tol: float = TOL_EQ, count: int = 1024,
                    seed: int = DEFAULT_SEED) -> FarthestPoints:
    """Farthest points of S from ``xstar``.

    -|x - x*| is concave, so its minimum over conv M is attained on the
    vertices. Each returned point is checked to be exposed by the functional
    <p - x*, .>, which it maximizes uniquely.
    """
    xstar = as_point(xstar, S.dim)
    if isinstance(S, Ball):
        d = xstar - S.center
        nd = np.linalg.norm(d)
        if nd <= TOL_PT:
            pts = sphere_points(S.center, S.radius, count, seed)
            return FarthestPoints(pts, True, np.ones(len(pts)))
        pts = (S.center - S.radius * d / nd)[None, :]
    else:
        verts = S.vertices
        dist = np.linalg.norm(verts - xstar, axis=1)
        pts = verts[dist >= dist.max() - tol]
    margins = np.array([exposing_margin(S, p, p - xstar) for p in pts])
    if np.any(margins <= 0):
        bad = pts[np.argmin(margins)]
        raise AssertionError(f"farthest point {bad.tolist()} failed the exposedness check")
    return FarthestPoints(pts, False, margins)


# ---------------------------------------------------------------------------
# normal cones, Gauss map, partition of the exterior


def normal_cone_contains(S: ConvexBody, x0, d, tol: float = TOL_FEAS) -> bool:
    """Whether d is in N_S(x0) = {d : <x - x0, d> <= 0 for all x in S}.

    Decided through the support function: max_S <x - x0, d> <= tol. For a
    polytope that max runs over the generators only.
    """
    x0 = as_point(x0, S.dim)
    d = as_point(d, S.dim)
    if not contains(S, x0, TOL_FEAS):
        raise ValueError(f"cone base {x0.tolist()} is not in the body")
    return support(S, d) - float(x0 @ d) <= tol


@dataclass(frozen=True)
class NormalCone:
    """N_S(base), queried by membership."""

    body: ConvexBody
    base: np.ndarray

    def __post_init__(self):
        base = as_point(self.base, self.body.dim)
        if not contains(self.body, base, TOL_FEAS):
            raise ValueError(f"cone base {base.tolist()} is not in the body")
        object.__setattr__(self, "base", base)

    def __contains__(self, d) -> bool:
        return normal_cone_contains(self.body, self.base, d)

    def contains(self, d, tol: float = TOL_FEAS) -> bool:
        return normal_cone_contains(self.body, self.base, d, tol)


def gauss_map_contains(S: ConvexBody, x0, u, tol: float = TOL_FEAS) -> bool:
    """Whether u is a unit vector of N_S(x0)."""
    u = as_point(u, S.dim)
    if abs(np.linalg.norm(u) - 1.0) > tol:
        # still validate the base point
        if not contains(S, as_point(x0, S.dim), TOL_FEAS):
            raise ValueError("cone base is not in the body")
        return False
    return normal_cone_contains(S, x0, u, tol)


def locate_partition_cell(S: ConvexBody, xstar, tol: float = TOL_FEAS) -> np.ndarray:
    """The boundary point x with xstar in x + N_S(x) minus {0}.

    That base is the metric projection of xstar; the membership and the
    nonzero offset are re-checked before returning.
    """
    xstar = as_point(xstar, S.dim)
    res = project(S, xstar, tol)
    base = res.point
    offset = xstar - base
    if np.linalg.norm(offset) <= tol:
        raise ValueError(f"{xstar.tolist()} lies in the body and has no partition cell")
    if not normal_cone_contains(S, base, offset, tol):
        raise ConvergenceError("partition certificate failed", base, res.residual, res.iterations)
    return base
