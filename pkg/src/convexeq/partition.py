"""
Planar boundary decomposition and partition-cell tables.

Each exterior point x* sits in exactly one translated cone x + N_S(x)\\{0}
with x on the boundary; the tables here record that base point and the
boundary face (vertex or open edge) it lies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from convexeq.geometry import TOL_FEAS, Polytope, locate_partition_cell
from convexeq.oracle import membership_residual


@dataclass(frozen=True)
class Face:
    label: str
    points: np.ndarray            # 1 row for a vertex, 2 rows for an edge
    cone: tuple[float, float]     # start angle and CCW sweep of the normal cone


def ordered_vertices(S: Polytope) -> np.ndarray:
    """Vertices in counter-clockwise order (2-D only)."""
    if S.dim != 2:
        raise ValueError("boundary decomposition needs a planar body")
    v = np.array(S.vertices)
    if len(v) <= 2:
        return v
    c = v.mean(axis=0)
    return v[np.argsort(np.arctan2(v[:, 1] - c[1], v[:, 0] - c[0]))]


def _angle(d) -> float:
    return math.atan2(d[1], d[0])


def boundary_faces(S: Polytope) -> list[Face]:
    """Vertices and open edges of a planar polytope with their normal cones."""
    v = ordered_vertices(S)
    if len(v) == 1:
        return [Face("v0", v[:1], (0.0, 2 * math.pi))]
    if len(v) == 2:
        t = (v[1] - v[0]) / np.linalg.norm(v[1] - v[0])
        n = np.array([-t[1], t[0]])
        return [
            Face("v0", v[:1], (_angle(n), math.pi)),
            Face("v1", v[1:], (_angle(-n), math.pi)),
            Face("e0", v.copy(), (_angle(n), 0.0)),
            Face("e0'", v.copy(), (_angle(-n), 0.0)),
        ]
    k = len(v)
    normals = []
    for i in range(k):
        d = v[(i + 1) % k] - v[i]
        normals.append(np.array([d[1], -d[0]]) / np.linalg.norm(d))
    faces = []
    for i in range(k):
        a0 = _angle(normals[i - 1])
        sweep = (_angle(normals[i]) - a0) % (2 * math.pi)
        faces.append(Face(f"v{i}", v[i:i + 1], (a0, sweep)))
    for i in range(k):
        faces.append(Face(f"e{i}", np.array([v[i], v[(i + 1) % k]]), (_angle(normals[i]), 0.0)))
    return faces


def face_of(faces: list[Face], x: np.ndarray, offset: np.ndarray, tol: float = 1e-7) -> str:
    """Label of the face holding boundary point x; ``offset`` = x* - x picks the side."""
    for f in faces:
        if len(f.points) == 1 and np.linalg.norm(f.points[0] - x) <= tol:
            return f.label
    best, best_d = None, math.inf
    for f in faces:
        if len(f.points) != 2:
            continue
        n = np.array([math.cos(f.cone[0]), math.sin(f.cone[0])])
        if offset @ n <= 0:
            continue
        a, b = f.points
        t = np.clip((x - a) @ (b - a) / ((b - a) @ (b - a)), 0.0, 1.0)
        d = np.linalg.norm(a + t * (b - a) - x)
        if d < best_d:
            best, best_d = f.label, d
    return best


def sample_exterior(S: Polytope, count: int, window, rng: np.random.Generator) -> np.ndarray:
    """``count`` uniform points of the window lying outside S."""
    xmin, xmax, ymin, ymax = window
    out = []
    while sum(len(o) for o in out) < count:
        pts = np.column_stack([rng.uniform(xmin, xmax, 2 * count), rng.uniform(ymin, ymax, 2 * count)])
        out.append(pts[membership_residual(S, pts) > TOL_FEAS])
    return np.vstack(out)[:count]


def partition_table(S: Polytope, points: np.ndarray, tol: float = TOL_FEAS) -> list[tuple]:
    """Rows ``(x, y, base_x, base_y, face)`` for each exterior point."""
    faces = boundary_faces(S)
    rows = []
    for p in points:
        base = locate_partition_cell(S, p, tol)
        rows.append((p[0], p[1], base[0], base[1], face_of(faces, base, p - base)))
    return rows


def format_csv(rows) -> str:
    lines = ["x,y,base_x,base_y,face"]
    for x, y, bx, by, face in rows:
        lines.append(f"{x:.17g},{y:.17g},{bx:.17g},{by:.17g},{face}")
    return "\n".join(lines) + "\n"
