"""
Equilibrium problems eq(g | A', B') with finite candidate lists.

A candidate u solves the problem when g(u, x) <= tol for every tester x.
When g(u, .) is quasiconvex on S = conv M, testing against M (or ext S, or
a sample of exp S when g(u, .) is also lower semicontinuous) gives the same
answer as testing against all of S; :func:`eq_reduced` performs that swap
and refuses it unless the needed properties were declared.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from convexeq.geometry import (
    DEFAULT_SEED,
    TOL_EQ,
    Ball,
    ConvexBody,
    as_point,
    as_points,
    exposed_points_sample,
    sphere_points,
)

MODES = ("generators", "extreme", "exposed")


class UnsoundReductionError(ValueError):
    """A reduction was requested without the property that makes it exact."""


@dataclass(frozen=True)
class Bifunction:
    """g(u, v) plus the properties its author vouches for in the second argument.

    If ``vectorized`` is set, ``fn`` must broadcast over leading axes:
    ``fn(U, V)`` with ``U``, ``V`` of shape ``(..., n)`` returns shape ``(...)``.
    Otherwise ``fn`` takes two points and returns a float.
    """

    fn: Callable
    quasiconvex: bool = False
    lsc: bool = False
    label: str = ""
    vectorized: bool = False

    def __call__(self, u, v) -> float:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.vectorized:
            return float(np.asarray(self.fn(u[None, :], v[None, :])).reshape(-1)[0])
        return float(self.fn(u, v))

    def row(self, u: np.ndarray, V: np.ndarray) -> np.ndarray:
        """g(u, v) for every row v of V."""
        if len(V) == 0:
            return np.zeros(0)
        if self.vectorized:
            return np.asarray(self.fn(u[None, :], V), dtype=float).reshape(len(V))
        return np.array([self.fn(u, v) for v in V], dtype=float)


def difference_bifunction(f: Callable, quasiconcave: bool = False, usc: bool = False,
                          label: str = "", vectorized: bool = False) -> Bifunction:
    """g(u, v) = f(u) - f(v); quasiconvex in v iff f is quasiconcave."""
    if vectorized:
        fn = lambda U, V: f(U) - f(V)
    else:
        fn = lambda u, v: f(u) - f(v)
    return Bifunction(fn, quasiconvex=quasiconcave, lsc=usc, label=label or "f(u) - f(v)",
                      vectorized=vectorized)


def vi_bifunction(T: Callable, label: str = "") -> Bifunction:
    """g(u, v) = <T(u), u - v>, affine in v."""

    def fn(u, v):
        return float(np.dot(T(u), u - v))

    return Bifunction(fn, quasiconvex=True, lsc=True, label=label or "<T(u), u - v>")


def bestapprox_bifunction(xstar) -> Bifunction:
    """g(u, v) = <v - u, x* - u>; its equilibria on convex S are P_S(x*)."""
    xstar = as_point(xstar)

    def fn(U, V):
        return np.einsum("...i,...i->...", V - U, xstar - U)

    return Bifunction(fn, quasiconvex=True, lsc=True, label=f"<v - u, {xstar.tolist()} - u>",
                      vectorized=True)


@dataclass
class EqReport:
    candidates: np.ndarray
    solutions: np.ndarray
    reduction_used: str = "none"
    checked_set_size: int = 0
    max_violation: float = 0.0
    forced: bool = False
    warning: Optional[str] = None
    reduced_min: Optional[float] = None
    candidate_min: Optional[float] = None

    @property
    def mask(self) -> np.ndarray:
        """Boolean mask of solutions over the candidate list."""
        if len(self.solutions) == 0:
            return np.zeros(len(self.candidates), dtype=bool)
        d = np.linalg.norm(self.candidates[:, None, :] - self.solutions[None, :, :], axis=2)
        return np.any(d == 0, axis=1)

    def to_dict(self) -> dict:
        out = {
            "solutions": self.solutions.tolist(),
            "solution_count": int(len(self.solutions)),
            "candidate_count": int(len(self.candidates)),
            "reduction_used": self.reduction_used,
            "checked_set_size": int(self.checked_set_size),
            "max_violation": self.max_violation,
        }
        if self.forced:
            out["forced"] = True
            out["warning"] = self.warning
        if self.reduced_min is not None:
            out["reduced_min"] = self.reduced_min
            out["candidate_min"] = self.candidate_min
        return out


def _candidates(candidates, dim: int | None = None) -> np.ndarray:
    cand = as_points(candidates, dim)
    if len(cand) == 0:
        raise ValueError("candidate list is empty")
    return cand


def eq_set(g: Bifunction, candidates, testers, tol: float = TOL_EQ) -> EqReport:
    """Candidates u with g(u, x) <= tol for all testers x.

    Raises:
        ValueError: g returned a non-finite value; the message names the pair.
    """
    cand = _candidates(candidates)
    test = as_points(testers, cand.shape[1]) if len(testers) else np.zeros((0, cand.shape[1]))
    keep = np.zeros(len(cand), dtype=bool)
    worst = 0.0
    for i, u in enumerate(cand):
        vals = g.row(u, test)
        if not np.all(np.isfinite(vals)):
            k = int(np.argmin(np.isfinite(vals)))
            raise ValueError(f"g({u.tolist()}, {test[k].tolist()}) is not finite")
        top = float(vals.max()) if len(vals) else -math.inf
        if top <= tol:
            keep[i] = True
            worst = max(worst, top)
    return EqReport(cand, cand[keep], "none", len(test), worst)


def reduced_testers(S: ConvexBody, mode: str, exposed_sample_count: int = 1024,
                    seed: int = DEFAULT_SEED) -> np.ndarray:
    if mode not in MODES:
        raise ValueError(f"unknown reduction mode {mode!r}; expected one of {MODES}")
    if isinstance(S, Ball):
        # conv, ext and exp of a ball are all the sphere
        return sphere_points(S.center, S.radius, exposed_sample_count, seed)
    if mode == "generators":
        return np.array(S.generators)
    if mode == "extreme":
        return np.array(S.vertices)
    return exposed_points_sample(S, exposed_sample_count, seed)


def eq_reduced(g: Bifunction, candidates, S: ConvexBody, mode: str = "extreme",
               tol: float = TOL_EQ, exposed_sample_count: int = 1024, *,
               open_body: bool = False, unsafe: bool = False,
               seed: int = DEFAULT_SEED) -> EqReport:
    """eq(g | candidates, S) computed against generators, ext S or exp S.

    ``open_body`` says the feasible set is the interior of ``S``; it is then
    not compact and has no extreme points, so every reduction is unsound and
    the tester set is empty. Unsound requests raise
    :class:`UnsoundReductionError` unless ``unsafe`` is set, in which case the
    report is marked forced and a warning is emitted.
    """
    if mode not in MODES:
        raise ValueError(f"unknown reduction mode {mode!r}; expected one of {MODES}")
    missing = []
    if not g.quasiconvex:
        missing.append("quasiconvex in the second argument")
    if open_body:
        missing.append("compact feasible set")
    if mode == "exposed" and not g.lsc:
        missing.append("lower semicontinuous in the second argument")

    cand = _candidates(candidates, S.dim)
    if open_body:
        testers = np.zeros((0, S.dim))
    else:
        testers = reduced_testers(S, mode, exposed_sample_count, seed)

    warning = None
    if missing:
        msg = f"reduction unsound without declared property: {', '.join(missing)} ({g.label or 'g'})"
        if not unsafe:
            raise UnsoundReductionError(msg)
        warning = msg
        warnings.warn(msg, stacklevel=2)
    report = eq_set(g, cand, testers, tol)
    report.reduction_used = mode
    report.forced = bool(missing)
    report.warning = warning
    return report


def argmin_quasiconcave(f: Callable, S: ConvexBody, candidates, tol: float = TOL_EQ,
                        exposed_sample_count: int = 1024, vectorized: bool = False,
                        seed: int = DEFAULT_SEED) -> EqReport:
    """Candidates minimizing a quasiconcave f over S, judged against ext S.

    The report carries ``reduced_min`` (min of f over the extreme points) and
    ``candidate_min``. Since the candidates lie in S, a candidate value below
    ``reduced_min - tol`` proves f is not quasiconcave on S and raises.
    """
    cand = _candidates(candidates, S.dim)
    testers = reduced_testers(S, "extreme", exposed_sample_count, seed)
    if vectorized:
        fc = np.asarray(f(cand), dtype=float)
        ft = np.asarray(f(testers), dtype=float)
    else:
        fc = np.array([f(x) for x in cand], dtype=float)
        ft = np.array([f(x) for x in testers], dtype=float)
    if not (np.all(np.isfinite(fc)) and np.all(np.isfinite(ft))):
        raise ValueError("objective returned a non-finite value")
    reduced_min = float(ft.min())
    candidate_min = float(fc.min())
    if candidate_min < reduced_min - tol:
        raise ValueError(
            f"min over candidates {candidate_min!r} is below min over extreme points "
            f"{reduced_min!r}: objective is not quasiconcave on S")
    keep = fc <= reduced_min + tol
    worst = float(np.max(fc[keep] - reduced_min)) if np.any(keep) else 0.0
    return EqReport(cand, cand[keep], "extreme", len(testers), max(0.0, worst),
                    reduced_min=reduced_min, candidate_min=candidate_min)


def solve_vi(T: Callable, S: ConvexBody, candidates, tol: float = TOL_EQ,
             exposed_sample_count: int = 1024, seed: int = DEFAULT_SEED) -> EqReport:
    """Candidates x0 with <T(x0), v - x0> >= -tol for every extreme point v."""
    cand = _candidates(candidates, S.dim)
    testers = reduced_testers(S, "extreme", exposed_sample_count, seed)
    keep = np.zeros(len(cand), dtype=bool)
    worst = 0.0
    for i, x0 in enumerate(cand):
        t = np.asarray(T(x0), dtype=float)
        if not np.all(np.isfinite(t)):
            raise ValueError(f"T({x0.tolist()}) is not finite")
        violation = float(np.max((x0 - testers) @ t))
        if violation <= tol:
            keep[i] = True
            worst = max(worst, violation)
    return EqReport(cand, cand[keep], "extreme", len(testers), max(0.0, worst))


@dataclass(frozen=True)
class QuasiconvexCheck:
    ok: bool
    witness: Optional[tuple] = None
    excess: float = 0.0

    def __bool__(self):
        return self.ok


def sample_body(S: ConvexBody, count: int, rng: np.random.Generator) -> np.ndarray:
    """Random points of S: Dirichlet mixtures of generators, or uniform in a ball."""
    if isinstance(S, Ball):
        g = rng.standard_normal((count, S.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = rng.random(count) ** (1.0 / S.dim)
        return S.center + S.radius * r[:, None] * g
    w = rng.dirichlet(np.full(len(S.generators), 0.5), size=count)
    return w @ S.generators


def check_quasiconvex(h: Callable, S: ConvexBody, segment_samples: int = 200,
                      t_samples: int = 21, seed: int = DEFAULT_SEED,
                      tol: float = TOL_EQ) -> QuasiconvexCheck:
    """Search for a segment on which h rises above the larger endpoint value.

    Endpoints are drawn from the vertices (or sphere points) and random
    points of S; t runs over a uniform grid of [0, 1]. Returns the worst
    violating ``(v1, v2, t)`` if any; passing is evidence, not proof.
    """
    if segment_samples < 1 or t_samples < 1:
        raise ValueError("segment_samples and t_samples must be positive")
    rng = np.random.default_rng(seed)
    if isinstance(S, Ball):
        anchors = sphere_points(S.center, S.radius, 16, seed)
    else:
        anchors = np.array(S.vertices)
    pool = np.vstack([anchors, sample_body(S, segment_samples, rng)])
    pairs = [(i, j) for i in range(len(anchors)) for j in range(i + 1, len(anchors))]
    idx = rng.integers(0, len(pool), size=(segment_samples, 2))
    pairs.extend(map(tuple, idx))
    ts = np.linspace(0.0, 1.0, t_samples) if t_samples > 1 else np.array([0.5])
    best = None
    best_excess = 0.0
    for i, j in pairs:
        v1, v2 = pool[i], pool[j]
        top = max(h(v1), h(v2))
        for t in ts:
            excess = h((1 - t) * v1 + t * v2) - top
            if excess > tol and excess > best_excess:
                best_excess = float(excess)
                best = (v1.copy(), v2.copy(), float(t))
    if best is None:
        return QuasiconvexCheck(True)
    return QuasiconvexCheck(False, best, best_excess)
