"""
JSON instance files (``"version": 1``).

Layout::

    {
      "version": 1,
      "id": "square-projection-2-2",          # optional
      "description": "...",                   # optional
      "dimension": 2,
      "body": {"type": "polytope", "generators": [[1, 1], [-1, 1], ...]}
            | {"type": "ball", "center": [0, 0], "radius": 1},
      "problem": {"kind": "project" | "farthest" | "equilibrium" | "vi"
                          | "argmin" | "partition-figure", ...payload},
      "tolerances": {"feas": 1e-8, "eq": 1e-9, "pt": 1e-12},   # optional
      "seed": 42,                              # optional
      "resolution": 0.01,                      # optional, brute-force grid spacing
      "expected": {...}                        # optional, checked by the catalog runner
    }

Problem payloads:

- ``project``, ``farthest``: ``xstar``; farthest also takes ``count`` (sphere sample size).
- ``equilibrium``: ``bifunction``, ``candidates``, ``mode`` (generators | extreme |
  exposed), ``open`` (the feasible set is the interior of the body), ``unsafe``,
  ``exposed_sample_count``.
- ``vi``: ``operator``, ``candidates``.
- ``argmin``: ``objective``, ``candidates``.
- ``partition-figure``: ``samples``, ``window`` [xmin, xmax, ymin, ymax],
  ``boundary_samples``.

Candidates are ``{"type": "grid", "resolution": h, "interior": false}`` or
``{"type": "points", "points": [...]}``; either may carry ``"extra"`` points.
Errors are reported as :class:`InstanceError` with a dotted field path, or
with the line and column for malformed JSON.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from convexeq.families import SpecError, build_bifunction, build_objective, build_operator
from convexeq.geometry import DEFAULT_SEED, TOL_EQ, TOL_FEAS, TOL_PT, Ball, ConvexBody, Polytope
from convexeq.oracle import make_grid

VERSION = 1
KINDS = ("project", "farthest", "equilibrium", "vi", "argmin", "partition-figure")


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    feas: float = TOL_FEAS
    eq: float = TOL_EQ
    pt: float = TOL_PT


@dataclass
class Instance:
    dimension: int
    body: ConvexBody
    kind: str
    payload: dict
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = DEFAULT_SEED
    resolution: float = 0.01
    id: str = ""
    description: str = ""
    expected: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        if isinstance(self.body, Ball):
            body = {"type": "ball", "center": self.body.center.tolist(), "radius": self.body.radius}
        else:
            body = {"type": "polytope", "generators": self.body.generators.tolist()}
        doc = {"version": VERSION}
        if self.id:
            doc["id"] = self.id
        if self.description:
            doc["description"] = self.description
        doc.update({
            "dimension": self.dimension,
            "body": body,
            "problem": {"kind": self.kind, **copy.deepcopy(self.payload)},
            "tolerances": {"feas": self.tolerances.feas, "eq": self.tolerances.eq, "pt": self.tolerances.pt},
            "seed": self.seed,
            "resolution": self.resolution,
        })
        if self.expected:
            doc["expected"] = copy.deepcopy(self.expected)
        return doc

    # builders for the payload pieces

    def xstar(self) -> np.ndarray:
        return np.asarray(self.payload["xstar"], dtype=float)

    def bifunction(self):
        return build_bifunction(self.payload["bifunction"], self.dimension, "problem.bifunction")

    def objective(self):
        return build_objective(self.payload["objective"], self.dimension, "problem.objective")

    def operator(self):
        return build_operator(self.payload["operator"], self.dimension, "problem.operator")

    def candidates(self) -> np.ndarray:
        return build_candidates(self.payload["candidates"], self.body, "problem.candidates")


def _fail(path: str, msg: str):
    raise InstanceError(f"{path}: {msg}")


def _number_list(value, path: str, dim: int) -> list:
    if not isinstance(value, list) or len(value) != dim or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v) for v in value):
        _fail(path, f"expected a list of {dim} finite numbers")
    return [float(v) for v in value]


def _point_list(value, path: str, dim: int, allow_empty=False) -> list:
    if not isinstance(value, list) or (not value and not allow_empty):
        _fail(path, "expected a nonempty list of points")
    return [_number_list(p, f"{path}[{i}]", dim) for i, p in enumerate(value)]


def _positive(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        _fail(path, "expected a positive number")
    return float(value)


def _int(value, path: str, lo: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < lo:
        _fail(path, f"expected an integer >= {lo}")
    return value


def _bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        _fail(path, "expected true or false")
    return value


def parse_body(doc, dim: int) -> ConvexBody:
    if not isinstance(doc, dict):
        _fail("body", "expected an object")
    kind = doc.get("type")
    try:
        if kind == "polytope":
            return Polytope(np.array(_point_list(doc.get("generators"), "body.generators", dim)))
        if kind == "ball":
            return Ball(_number_list(doc.get("center"), "body.center", dim),
                        _positive(doc.get("radius"), "body.radius"))
    except InstanceError:
        raise
    except ValueError as exc:
        _fail("body", str(exc))
    _fail("body.type", f"unknown body {kind!r}; expected polytope or ball")


def _candidates_spec(doc, path: str, dim: int) -> dict:
    if not isinstance(doc, dict):
        _fail(path, "expected an object")
    kind = doc.get("type")
    out = {"type": kind}
    if kind == "grid":
        out["resolution"] = _positive(doc.get("resolution"), f"{path}.resolution")
        out["interior"] = _bool(doc.get("interior", False), f"{path}.interior")
    elif kind == "points":
        out["points"] = _point_list(doc.get("points"), f"{path}.points", dim)
    else:
        _fail(f"{path}.type", f"unknown candidates {kind!r}; expected grid or points")
    if "extra" in doc:
        out["extra"] = _point_list(doc["extra"], f"{path}.extra", dim, allow_empty=True)
    return out


def build_candidates(spec: dict, body: ConvexBody, path: str = "candidates") -> np.ndarray:
    if spec["type"] == "grid":
        try:
            pts = make_grid(body, spec["resolution"], spec.get("interior", False)).points
        except ValueError as exc:
            _fail(path, str(exc))
    else:
        pts = np.array(spec["points"], dtype=float).reshape(-1, body.dim)
    if spec.get("extra"):
        pts = np.vstack([pts, np.array(spec["extra"], dtype=float).reshape(-1, body.dim)])
    return pts


def _check_family(builder, spec, dim, path):
    try:
        builder(spec, dim, path)
    except SpecError as exc:
        raise InstanceError(str(exc)) from None
    return copy.deepcopy(spec)


def parse_problem(doc, dim: int) -> tuple[str, dict]:
    if not isinstance(doc, dict):
        _fail("problem", "expected an object")
    kind = doc.get("kind")
    if kind not in KINDS:
        _fail("problem.kind", f"unknown problem {kind!r}; expected one of {list(KINDS)}")
    p = {}
    if kind in ("project", "farthest"):
        p["xstar"] = _number_list(doc.get("xstar"), "problem.xstar", dim)
        if kind == "farthest" and "count" in doc:
            p["count"] = _int(doc["count"], "problem.count")
    elif kind == "equilibrium":
        p["bifunction"] = _check_family(build_bifunction, doc.get("bifunction"), dim, "problem.bifunction")
        p["candidates"] = _candidates_spec(doc.get("candidates"), "problem.candidates", dim)
        mode = doc.get("mode", "extreme")
        if mode not in ("generators", "extreme", "exposed"):
            _fail("problem.mode", "expected generators, extreme or exposed")
        p["mode"] = mode
        p["open"] = _bool(doc.get("open", False), "problem.open")
        p["unsafe"] = _bool(doc.get("unsafe", False), "problem.unsafe")
        p["exposed_sample_count"] = _int(doc.get("exposed_sample_count", 1024), "problem.exposed_sample_count")
    elif kind == "vi":
        p["operator"] = _check_family(build_operator, doc.get("operator"), dim, "problem.operator")
        p["candidates"] = _candidates_spec(doc.get("candidates"), "problem.candidates", dim)
    elif kind == "argmin":
        p["objective"] = _check_family(build_objective, doc.get("objective"), dim, "problem.objective")
        p["candidates"] = _candidates_spec(doc.get("candidates"), "problem.candidates", dim)
    else:
        if dim != 2:
            _fail("dimension", "partition figures need dimension 2")
        p["samples"] = _int(doc.get("samples", 2000), "problem.samples")
        window = doc.get("window", [-3.0, 3.0, -3.0, 3.0])
        w = _number_list(window, "problem.window", 4)
        if not (w[0] < w[1] and w[2] < w[3]):
            _fail("problem.window", "expected [xmin, xmax, ymin, ymax] with min < max")
        p["window"] = w
        p["boundary_samples"] = _int(doc.get("boundary_samples", 3), "problem.boundary_samples")
    unknown = set(doc) - {"kind"} - set(p) - {"count"}
    if unknown:
        _fail("problem", f"unknown field(s) {sorted(unknown)}")
    return kind, p


def parse_instance(doc) -> Instance:
    if not isinstance(doc, dict):
        _fail("<root>", "expected a JSON object")
    if doc.get("version") != VERSION:
        _fail("version", f"expected {VERSION}, got {doc.get('version')!r}")
    dim = _int(doc.get("dimension"), "dimension")
    body = parse_body(doc.get("body"), dim)
    kind, payload = parse_problem(doc.get("problem"), dim)
    tol_doc = doc.get("tolerances", {})
    if not isinstance(tol_doc, dict):
        _fail("tolerances", "expected an object")
    unknown = set(tol_doc) - {"feas", "eq", "pt"}
    if unknown:
        _fail("tolerances", f"unknown field(s) {sorted(unknown)}")
    tols = Tolerances(**{k: _positive(v, f"tolerances.{k}") for k, v in tol_doc.items()})
    seed = _int(doc.get("seed", DEFAULT_SEED), "seed", lo=0)
    resolution = _positive(doc.get("resolution", 0.01), "resolution")
    expected = doc.get("expected", {})
    if not isinstance(expected, dict):
        _fail("expected", "expected an object")
    ident = doc.get("id", "")
    desc = doc.get("description", "")
    if not isinstance(ident, str) or not isinstance(desc, str):
        _fail("id", "id and description must be strings")
    return Instance(dim, body, kind, payload, tols, seed, resolution, ident, desc, copy.deepcopy(expected))


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_instance(doc)


def load(path) -> Instance:
    return loads(Path(path).read_text())


def dumps(inst: Instance) -> str:
    # json writes floats with repr, the shortest string that round-trips exactly
    return json.dumps(inst.to_dict(), indent=2) + "\n"


def dump(inst: Instance, path) -> None:
    Path(path).write_text(dumps(inst))
