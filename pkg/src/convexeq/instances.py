"""
Catalog of the worked examples and counterexamples, as instance files.

Every entry carries an ``expected`` block that :func:`replay` checks; the
same documents can be exported and fed to the command line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from convexeq.equilibrium import eq_set
from convexeq.geometry import normal_cone_contains
from convexeq.instancefile import Instance, dump, parse_instance
from convexeq.oracle import make_grid
from convexeq.runner import solve, verify

SQUARE = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]
INTERVAL = [[-1.0], [1.0]]
TRIANGLE = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
SEGMENT = [[0.0, 0.0], [1.0, 0.0]]


@dataclass
class PaperInstance:
    instance: Instance
    theorem_tags: list = field(default_factory=list)

    @property
    def id(self) -> str:
        return self.instance.id


def _square_probes() -> list[dict]:
    """Directed membership probes for the square's corner quadrants and edge rays."""
    probes = []
    corners = {(1, 1): (1, 1), (-1, 1): (-1, 1), (-1, -1): (-1, -1), (1, -1): (1, -1)}
    for corner, (sx, sy) in corners.items():
        for a, b in [(0.5, 2.0), (1.0, 0.0), (0.0, 3.0), (2.0, 0.25)]:
            probes.append({"base": list(corner), "direction": [sx * a, sy * b], "member": True})
        probes.append({"base": list(corner), "direction": [-sx * 0.5, sy * 1.0], "member": False})
        probes.append({"base": list(corner), "direction": [sx * 1.0, -sy * 0.1], "member": False})
    edges = [((0, 1), (0, 1)), ((-1, 0), (-1, 0)), ((0, -1), (0, -1)), ((1, 0), (1, 0))]
    for base, (nx, ny) in edges:
        probes.append({"base": list(base), "direction": [nx * 2.0, ny * 2.0], "member": True})
        probes.append({"base": list(base), "direction": [-nx * 1.0, -ny * 1.0], "member": False})
        probes.append({"base": list(base), "direction": [nx + 0.1 * ny, ny + 0.1 * nx], "member": False})
    probes.append({"base": [0, 1], "direction": [0.1, 1], "member": False})
    return probes


def _doc(ident: str, description: str, dim: int, body: dict, problem: dict, expected: dict,
         resolution: float = 0.01) -> dict:
    return {
        "version": 1,
        "id": ident,
        "description": description,
        "dimension": dim,
        "body": body,
        "problem": problem,
        "resolution": resolution,
        "expected": expected,
    }


def _poly(gens) -> dict:
    return {"type": "polytope", "generators": gens}


def catalog() -> list[PaperInstance]:
    docs = [
        (_doc("square-partition", "Exterior of [-1,1]^2 split into translated normal cones",
              2, _poly(SQUARE),
              {"kind": "partition-figure", "samples": 2000, "window": [-3, 3, -3, 3]},
              {"cone_probes": _square_probes()}),
         ["partition", "normal cone"]),
        (_doc("square-projection-2-2", "Projection of (2,2) onto the square", 2, _poly(SQUARE),
              {"kind": "project", "xstar": [2, 2]}, {"point": [1, 1]}),
         ["projection", "normal cone"]),
        (_doc("square-projection-0-5", "Projection of (0,5) onto the square (open top edge)", 2,
              _poly(SQUARE), {"kind": "project", "xstar": [0, 5]}, {"point": [0, 1]}),
         ["projection", "normal cone"]),
        (_doc("interval-x2", "f(x) = x^2 on [-1,1]: testing only the endpoints is unsound", 1,
              _poly(INTERVAL),
              {"kind": "equilibrium", "mode": "generators", "unsafe": True,
               "bifunction": {"type": "difference", "objective": {"type": "sq_dist", "center": [0]}},
               "candidates": {"type": "grid", "resolution": 0.01}},
              {"brute": [[0.0]], "reduced_all": True, "agree": False}),
         ["generator reduction", "counterexample"]),
        (_doc("interval-neg-x2", "f(x) = -x^2 on [-1,1]: argmin at the endpoints", 1,
              _poly(INTERVAL),
              {"kind": "equilibrium", "mode": "extreme",
               "bifunction": {"type": "difference", "objective": {"type": "neg_sq_dist", "center": [0]}},
               "candidates": {"type": "grid", "resolution": 0.01}},
              {"solutions": [[-1.0], [1.0]], "agree": True}),
         ["extreme reduction"]),
        (_doc("interval-max0x", "f(x) = max(0, x) on [-1,1]: argmin [-1, 0] strictly contains {-1}", 1,
              _poly(INTERVAL),
              {"kind": "argmin", "objective": {"type": "relu", "a": [1], "b": 0},
               "candidates": {"type": "grid", "resolution": 0.01}},
              {"solutions_interval": [-1.0, 0.0], "reduced_min": 0.0, "agree": True}),
         ["quasiconcave argmin", "counterexample"]),
        (_doc("open-interval-neg-x2", "f(x) = -x^2 on ]-1,1[: no minimizer, yet ext S is empty", 1,
              _poly(INTERVAL),
              {"kind": "equilibrium", "mode": "extreme", "open": True, "unsafe": True,
               "bifunction": {"type": "difference", "objective": {"type": "neg_sq_dist", "center": [0]}},
               "candidates": {"type": "grid", "resolution": 0.01, "interior": True}},
              {"brute_empty": True, "reduced_all": True, "agree": False,
               "refinements": [0.1, 0.05, 0.02, 0.01, 0.005]},
              resolution=0.005),
         ["extreme reduction", "compactness", "counterexample"]),
        (_doc("square-farthest", "Farthest point of the square from (0.5, 0.5)", 2, _poly(SQUARE),
              {"kind": "farthest", "xstar": [0.5, 0.5]}, {"points": [[-1, -1]], "agree": True},
              resolution=0.05),
         ["farthest point", "exposed point"]),
        (_doc("square-farthest-center", "Farthest points of the square from its center", 2,
              _poly(SQUARE), {"kind": "farthest", "xstar": [0, 0]}, {"points": SQUARE, "agree": True},
              resolution=0.05),
         ["farthest point", "exposed point"]),
        (_doc("disk-exposed-reduction", "-|x - (0.5, 0)| on the unit disk, tested on a sphere sample",
              2, {"type": "ball", "center": [0, 0], "radius": 1},
              {"kind": "equilibrium", "mode": "exposed", "exposed_sample_count": 1024,
               "bifunction": {"type": "difference", "objective": {"type": "neg_dist", "center": [0.5, 0]}},
               "candidates": {"type": "grid", "resolution": 0.02}},
              {"solutions": [[-1.0, 0.0]], "agree": True}, resolution=0.02),
         ["exposed reduction"]),
        (_doc("vi-from-projection", "VI with T(x) = x - (2,2) on the square", 2, _poly(SQUARE),
              {"kind": "vi", "operator": {"type": "residual", "xstar": [2, 2]},
               "candidates": {"type": "grid", "resolution": 0.5}},
              {"solutions": [[1.0, 1.0]], "agree": True, "consistent": True}),
         ["variational inequality", "projection"]),
        (_doc("bestapprox-equilibrium", "g(u,v) = <v - u, (2,2) - u> on the square", 2, _poly(SQUARE),
              {"kind": "equilibrium", "mode": "extreme",
               "bifunction": {"type": "bestapprox", "xstar": [2, 2]},
               "candidates": {"type": "grid", "resolution": 0.5}},
              {"solutions": [[1.0, 1.0]], "agree": True}),
         ["extreme reduction", "projection"]),
        (_doc("triangle-partition", "Partition around conv{(0,0),(1,0),(0,1)}", 2, _poly(TRIANGLE),
              {"kind": "partition-figure", "samples": 1500, "window": [-2, 3, -2, 3]},
              {"cone_probes": [
                  {"base": [0, 0], "direction": [-1, -2], "member": True},
                  {"base": [0, 0], "direction": [1, -1], "member": False},
                  {"base": [1, 0], "direction": [2, 1], "member": True},
                  {"base": [1, 0], "direction": [1, 2], "member": False},
                  {"base": [0.5, 0.5], "direction": [1, 1], "member": True},
                  {"base": [0.5, 0.5], "direction": [1, 0.9], "member": False},
                  {"base": [0.5, 0], "direction": [0, -1], "member": True},
                  {"base": [0.5, 0], "direction": [0.1, -1], "member": False}]}),
         ["partition"]),
        (_doc("segment-partition", "Partition around the segment conv{(0,0),(1,0)}", 2, _poly(SEGMENT),
              {"kind": "partition-figure", "samples": 1500, "window": [-2, 3, -2, 2]},
              {"cone_probes": [
                  {"base": [0.5, 0], "direction": [0, 1], "member": True},
                  {"base": [0.5, 0], "direction": [0, -1], "member": True},
                  {"base": [0.5, 0], "direction": [0.1, 1], "member": False},
                  {"base": [0, 0], "direction": [-1, 5], "member": True},
                  {"base": [0, 0], "direction": [0.1, 5], "member": False}]}),
         ["partition"]),
    ]
    return [PaperInstance(parse_instance(d), tags) for d, tags in docs]


def get(ident: str) -> PaperInstance:
    for pi in catalog():
        if pi.id == ident:
            return pi
    raise KeyError(ident)


def export(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for pi in catalog():
        path = directory / f"{pi.id}.json"
        dump(pi.instance, path)
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# replay


def _same_set(a, b, tol: float) -> bool:
    a = np.asarray(a, dtype=float).reshape(len(a), -1) if len(a) else np.zeros((0, 1))
    b = np.asarray(b, dtype=float).reshape(len(b), -1) if len(b) else np.zeros((0, 1))
    if len(a) == 0 or len(b) == 0:
        return len(a) == len(b)
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return bool(np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol))


def _open_interval_checks(inst: Instance, hs: list[float], tol: float) -> list[tuple]:
    """Empty brute eq at every refinement, and a strictly falling grid minimum."""
    g = inst.bifunction()
    f = inst.payload["bifunction"]["objective"]
    from convexeq.families import build_objective

    fobj = build_objective(f, inst.dimension)
    checks, mins = [], []
    for h in hs:
        cand = make_grid(inst.body, h, interior=True).points
        testers = make_grid(inst.body, h / 2, interior=True).points
        rep = eq_set(g, cand, testers, tol)
        checks.append((f"brute eq empty at h={h}", len(rep.solutions) == 0, len(rep.solutions)))
        mins.append(float(np.min(fobj(cand))))
    strictly = all(b < a for a, b in zip(mins, mins[1:]))
    checks.append(("grid minimum falls strictly as h shrinks", strictly, mins))
    return checks


def replay(pi: PaperInstance) -> list[tuple]:
    """Check an instance against its expected block; returns (name, ok, detail) triples."""
    inst = pi.instance
    exp = inst.expected
    tol = inst.tolerances.eq
    match = 10 * tol
    checks = []
    if "cone_probes" in exp:
        for pr in exp["cone_probes"]:
            got = normal_cone_contains(inst.body, pr["base"], pr["direction"], inst.tolerances.feas)
            checks.append((f"cone at {pr['base']} contains {pr['direction']}: {pr['member']}",
                           got == pr["member"], got))
    if inst.kind == "partition-figure":
        rep = solve(inst)
        checks.append(("every sampled exterior point located", rep["samples"] == inst.payload["samples"],
                       rep["faces"]))
    if "point" in exp:
        rep = solve(inst)
        ok = np.linalg.norm(np.array(rep["point"]) - exp["point"]) <= inst.tolerances.feas
        checks.append(("projection", bool(ok) and rep["residual"] <= inst.tolerances.feas, rep["point"]))
    if "points" in exp:
        rep = solve(inst)
        checks.append(("farthest points", _same_set(rep["points"], exp["points"], match), rep["points"]))
    needs_verify = {"solutions", "solutions_interval", "brute", "reduced_all", "agree", "consistent",
                    "reduced_min", "brute_empty"} & set(exp)
    if needs_verify:
        rep = verify(inst)
        red, brute = rep["reduced"], rep["brute"]
        cand = inst.candidates() if "candidates" in inst.payload else None
        if "solutions" in exp:
            checks.append(("reduced solutions", _same_set(red["solutions"], exp["solutions"], match),
                           red["solutions"]))
        if "solutions_interval" in exp:
            lo, hi = exp["solutions_interval"]
            want = cand[(cand[:, 0] >= lo - tol) & (cand[:, 0] <= hi + tol)]
            checks.append(("solutions = candidates in interval",
                           _same_set(red["solutions"], want, match), red["solution_count"]))
        if "reduced_min" in exp:
            ok = abs(red["reduced_min"] - exp["reduced_min"]) <= tol and \
                abs(red["candidate_min"] - exp["reduced_min"]) <= tol
            checks.append(("min over S = min over M", ok, (red["reduced_min"], red["candidate_min"])))
        if "brute" in exp:
            checks.append(("brute solutions", _same_set(brute["solutions"], exp["brute"], match),
                           brute["solutions"]))
        if "brute_empty" in exp:
            checks.append(("brute eq empty", (brute["solution_count"] == 0) == exp["brute_empty"],
                           brute["solution_count"]))
        if "reduced_all" in exp:
            checks.append(("reduced eq keeps every candidate",
                           (red["solution_count"] == red["candidate_count"]) == exp["reduced_all"],
                           red["solution_count"]))
        if "agree" in exp:
            checks.append(("reduction vs brute agreement", rep["comparison"]["agree"] == exp["agree"],
                           rep["comparison"]["hausdorff_gap"]))
        if "consistent" in exp:
            checks.append(("VI / best approximation / projection", rep["cross_check"]["consistent"]
                           == exp["consistent"], rep["cross_check"]["projection"]))
    if "refinements" in exp:
        checks.extend(_open_interval_checks(inst, exp["refinements"], tol))
    return checks
