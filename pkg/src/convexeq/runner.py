"""
Run parsed instances: solve with the reductions, verify against the oracle.

Both entry points return plain dicts ready for JSON reports.
"""

from __future__ import annotations

import numpy as np

from convexeq.equilibrium import (
    argmin_quasiconcave,
    bestapprox_bifunction,
    difference_bifunction,
    eq_reduced,
    solve_vi,
    vi_bifunction,
)
from convexeq.families import build_objective
from convexeq.geometry import contains, farthest_points, project
from convexeq.instancefile import Instance, InstanceError
from convexeq.oracle import brute_eq, compare, make_grid
from convexeq.partition import partition_table, sample_exterior


def _header(inst: Instance, tol: float) -> dict:
    return {
        "id": inst.id,
        "kind": inst.kind,
        "seed": inst.seed,
        "tolerances": {"feas": inst.tolerances.feas, "eq": tol, "pt": inst.tolerances.pt},
    }


def _farthest_objective(inst: Instance):
    return build_objective({"type": "neg_dist", "center": list(inst.payload["xstar"])}, inst.dimension)


def _reduced(inst: Instance, mode: str | None, tol: float, unsafe: bool, candidates: np.ndarray):
    """The reduced-tester solution report for an equilibrium-type instance."""
    p = inst.payload
    if inst.kind == "equilibrium":
        return eq_reduced(inst.bifunction(), candidates, inst.body, mode or p["mode"], tol,
                          p["exposed_sample_count"], open_body=p["open"],
                          unsafe=unsafe or p["unsafe"], seed=inst.seed)
    if inst.kind == "vi":
        return solve_vi(inst.operator(), inst.body, candidates, tol, seed=inst.seed)
    if inst.kind == "argmin":
        return argmin_quasiconcave(inst.objective(), inst.body, candidates, tol, vectorized=True,
                                   seed=inst.seed)
    if inst.kind == "farthest":
        return argmin_quasiconcave(_farthest_objective(inst), inst.body, candidates, tol,
                                   p.get("count", 1024), vectorized=True, seed=inst.seed)
    raise InstanceError(f"problem.kind: {inst.kind!r} is not an equilibrium-type problem")


def _brute_bifunction(inst: Instance):
    if inst.kind == "equilibrium":
        return inst.bifunction()
    if inst.kind == "vi":
        return vi_bifunction(inst.operator())
    if inst.kind == "argmin":
        f = inst.objective()
        return difference_bifunction(f, f.quasiconcave, f.usc, vectorized=True)
    if inst.kind == "farthest":
        return difference_bifunction(_farthest_objective(inst), True, True, vectorized=True)
    raise InstanceError(f"problem.kind: {inst.kind!r} is not an equilibrium-type problem")


def _candidates(inst: Instance, resolution: float) -> np.ndarray:
    if "candidates" in inst.payload:
        return inst.candidates()
    # farthest: the grid the brute force also uses
    return make_grid(inst.body, resolution).points


def _brute(inst: Instance, candidates: np.ndarray, resolution: float, tol: float):
    return brute_eq(_brute_bifunction(inst), candidates, inst.body, resolution, tol,
                    interior=inst.payload.get("open", False))


def solve(inst: Instance, mode: str | None = None, tol: float | None = None,
          unsafe: bool = False, resolution: float | None = None) -> dict:
    """Run the instance's operation; ``mode='brute'`` swaps in the grid oracle."""
    tol = inst.tolerances.eq if tol is None else tol
    feas = inst.tolerances.feas
    resolution = resolution or inst.resolution
    out = _header(inst, tol)
    p = inst.payload
    if inst.kind == "project":
        res = project(inst.body, p["xstar"], feas)
        out.update({
            "point": res.point.tolist(),
            "residual": res.residual,
            "iterations": res.iterations,
            "xstar_in_body": contains(inst.body, p["xstar"], feas),
        })
        return out
    if inst.kind == "farthest" and mode is None:
        fp = farthest_points(inst.body, p["xstar"], tol, p.get("count", 1024), inst.seed)
        out.update({
            "points": fp.points.tolist(),
            "degenerate": fp.degenerate,
            "exposing_margins": [float(m) for m in fp.margins],
        })
        return out
    if inst.kind == "partition-figure":
        rng = np.random.default_rng(inst.seed)
        pts = sample_exterior(inst.body, p["samples"], p["window"], rng)
        rows = partition_table(inst.body, pts, feas)
        faces = sorted({r[4] for r in rows})
        out.update({"samples": len(rows), "faces": {f: sum(r[4] == f for r in rows) for f in faces}})
        return out
    candidates = _candidates(inst, resolution)
    if mode == "brute":
        report = _brute(inst, candidates, resolution, tol)
        out["resolution"] = resolution
    else:
        report = _reduced(inst, mode, tol, unsafe, candidates)
    out.update(report.to_dict())
    return out


def verify(inst: Instance, mode: str | None = None, tol: float | None = None,
           unsafe: bool = False, resolution: float | None = None,
           match_tol: float | None = None) -> dict:
    """Compare the reduced answer with the brute-force grid answer."""
    tol = inst.tolerances.eq if tol is None else tol
    resolution = resolution or inst.resolution
    match_tol = 10 * tol if match_tol is None else match_tol
    if mode == "brute":
        raise InstanceError("--mode: verify compares a reduction with brute force; pick a reduction mode")
    candidates = _candidates(inst, resolution)
    reduced = _reduced(inst, mode, tol, unsafe, candidates)
    brute = _brute(inst, candidates, resolution, tol)
    cmp = compare(reduced, brute, match_tol)
    out = _header(inst, tol)
    out.update({
        "resolution": resolution,
        "reduced": reduced.to_dict(),
        "brute": brute.to_dict(),
        "comparison": cmp.to_dict(),
    })
    if inst.kind == "vi" and inst.payload["operator"]["type"] == "residual":
        out["cross_check"] = _bestapprox_cross_check(inst, candidates, reduced, tol)
    return out


def _bestapprox_cross_check(inst: Instance, candidates, vi_report, tol: float) -> dict:
    """VI with T(x) = x - x*, the best-approximation bifunction, and projection."""
    xstar = np.asarray(inst.payload["operator"]["xstar"], dtype=float)
    eq = eq_reduced(bestapprox_bifunction(xstar), candidates, inst.body, "extreme", tol,
                    seed=inst.seed)
    point = project(inst.body, xstar, inst.tolerances.feas).point
    match = 10 * tol

    def close(sols):
        return len(sols) > 0 and bool(np.all(np.linalg.norm(sols - point, axis=1) <= match))

    consistent = close(vi_report.solutions) and close(eq.solutions)
    if not any(np.linalg.norm(candidates - point, axis=1) <= match):
        # the projection is not among the candidates: all three must come up empty
        consistent = len(vi_report.solutions) == 0 and len(eq.solutions) == 0
    return {
        "projection": point.tolist(),
        "vi_solutions": vi_report.solutions.tolist(),
        "bestapprox_solutions": eq.solutions.tolist(),
        "consistent": consistent,
    }
