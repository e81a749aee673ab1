"""
Serializable objectives, operators and bifunctions.

Each family is described by a plain dict (the same dict that appears in
instance files) and evaluates vectorized over the last axis. Declared
properties default to what is known analytically for the family and may be
overridden with a ``"declare"`` entry, which is how the catalog
counterexamples force an unsound reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from convexeq.equilibrium import Bifunction


class SpecError(ValueError):
    """A family description is malformed; ``field`` locates the problem."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _vec(spec: dict, key: str, field: str, dim: int | None = None) -> np.ndarray:
    if key not in spec:
        raise SpecError(f"{field}.{key}", "missing")
    try:
        arr = np.asarray(spec[key], dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise SpecError(f"{field}.{key}", "expected a list of numbers") from None
    if not np.all(np.isfinite(arr)):
        raise SpecError(f"{field}.{key}", "non-finite entry")
    if dim is not None and arr.size != dim:
        raise SpecError(f"{field}.{key}", f"expected {dim} numbers, got {arr.size}")
    return arr


def _mat(spec: dict, key: str, field: str, shape: tuple) -> np.ndarray:
    if key not in spec:
        raise SpecError(f"{field}.{key}", "missing")
    try:
        arr = np.asarray(spec[key], dtype=float)
    except (TypeError, ValueError):
        raise SpecError(f"{field}.{key}", "expected a matrix of numbers") from None
    if arr.shape != shape:
        raise SpecError(f"{field}.{key}", f"expected shape {list(shape)}, got {list(arr.shape)}")
    return arr


def _num(spec: dict, key: str, field: str, default=None) -> float:
    if key not in spec:
        if default is None:
            raise SpecError(f"{field}.{key}", "missing")
        return float(default)
    v = spec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"{field}.{key}", "expected a number")
    return float(v)


def _declared(spec: dict, field: str, names: tuple, defaults: dict) -> dict:
    out = dict(defaults)
    extra = spec.get("declare", {})
    if not isinstance(extra, dict):
        raise SpecError(f"{field}.declare", "expected an object")
    for k, v in extra.items():
        if k not in names:
            raise SpecError(f"{field}.declare.{k}", f"unknown property; expected one of {list(names)}")
        if not isinstance(v, bool):
            raise SpecError(f"{field}.declare.{k}", "expected true or false")
        out[k] = v
    return out


# ---------------------------------------------------------------------------
# objectives f : R^n -> R

OBJECTIVES = {
    # kind: (quasiconcave, usc)
    "sq_dist": (False, True),
    "neg_sq_dist": (True, True),
    "dist": (False, True),
    "neg_dist": (True, True),
    "relu": (True, True),
    "linear": (True, True),
    "constant": (True, True),
    "min_affine": (True, True),
}


@dataclass(frozen=True)
class Objective:
    fn: object
    quasiconcave: bool
    usc: bool
    label: str

    def __call__(self, X):
        return self.fn(np.asarray(X, dtype=float))


def build_objective(spec: dict, dim: int, field: str = "objective") -> Objective:
    if not isinstance(spec, dict):
        raise SpecError(field, "expected an object")
    kind = spec.get("type")
    if kind not in OBJECTIVES:
        raise SpecError(f"{field}.type", f"unknown objective {kind!r}; expected one of {sorted(OBJECTIVES)}")
    qc, usc = OBJECTIVES[kind]
    flags = _declared(spec, field, ("quasiconcave", "usc"), {"quasiconcave": qc, "usc": usc})

    if kind in ("sq_dist", "neg_sq_dist", "dist", "neg_dist"):
        c = _vec(spec, "center", field, dim)
        sign = -1.0 if kind.startswith("neg") else 1.0
        if "sq" in kind:
            fn = lambda X: sign * np.sum((X - c) ** 2, axis=-1)
        else:
            fn = lambda X: sign * np.linalg.norm(X - c, axis=-1)
        label = f"{'-' if sign < 0 else ''}|x - {c.tolist()}|{'^2' if 'sq' in kind else ''}"
    elif kind in ("relu", "linear"):
        a = _vec(spec, "a", field, dim)
        b = _num(spec, "b", field, 0.0)
        if kind == "relu":
            fn = lambda X: np.maximum(0.0, X @ a + b)
            label = f"max(0, <{a.tolist()}, x> + {b})"
        else:
            fn = lambda X: X @ a + b
            label = f"<{a.tolist()}, x> + {b}"
    elif kind == "constant":
        value = _num(spec, "value", field)
        fn = lambda X: np.full(np.shape(X)[:-1], value)
        label = f"{value}"
    else:
        pieces = spec.get("pieces")
        if not isinstance(pieces, list) or not pieces:
            raise SpecError(f"{field}.pieces", "expected a nonempty list")
        A = np.array([_vec(p, "a", f"{field}.pieces[{i}]", dim) for i, p in enumerate(pieces)])
        b = np.array([_num(p, "b", f"{field}.pieces[{i}]", 0.0) for i, p in enumerate(pieces)])
        fn = lambda X: np.min(X @ A.T + b, axis=-1)
        label = f"min of {len(pieces)} affine"
    return Objective(fn, flags["quasiconcave"], flags["usc"], label)


# ---------------------------------------------------------------------------
# operators T : R^n -> R^n


def build_operator(spec: dict, dim: int, field: str = "operator"):
    if not isinstance(spec, dict):
        raise SpecError(field, "expected an object")
    kind = spec.get("type")
    if kind == "residual":
        xs = _vec(spec, "xstar", field, dim)
        return lambda x: np.asarray(x, dtype=float) - xs
    if kind == "affine":
        A = _mat(spec, "A", field, (dim, dim))
        b = _vec(spec, "b", field, dim)
        return lambda x: A @ np.asarray(x, dtype=float) + b
    if kind == "constant":
        c = _vec(spec, "c", field, dim)
        return lambda x: c
    raise SpecError(f"{field}.type", f"unknown operator {kind!r}; expected residual, affine or constant")


# ---------------------------------------------------------------------------
# bifunctions g(u, v)


def max_affine_bifunction(pieces: list[dict], dim: int) -> Bifunction:
    """g(u, v) = max_i <a_i + B_i u, v> + <b_i, u> + c_i, convex and continuous in v."""
    a = np.array([p["a"] for p in pieces], dtype=float).reshape(len(pieces), dim)
    B = np.array([p.get("B", np.zeros((dim, dim))) for p in pieces], dtype=float).reshape(len(pieces), dim, dim)
    b = np.array([p.get("b", np.zeros(dim)) for p in pieces], dtype=float).reshape(len(pieces), dim)
    c = np.array([p.get("c", 0.0) for p in pieces], dtype=float)

    def fn(U, V):
        slope = a + np.einsum("kij,...j->...ki", B, U)          # (..., k, n)
        vals = np.einsum("...ki,...i->...k", slope, V) + U @ b.T + c
        return vals.max(axis=-1)

    return Bifunction(fn, quasiconvex=True, lsc=True, label=f"max of {len(pieces)} affine in v",
                      vectorized=True)


def build_bifunction(spec: dict, dim: int, field: str = "bifunction") -> Bifunction:
    from convexeq.equilibrium import bestapprox_bifunction, difference_bifunction, vi_bifunction

    if not isinstance(spec, dict):
        raise SpecError(field, "expected an object")
    kind = spec.get("type")
    if kind == "difference":
        f = build_objective(spec.get("objective"), dim, f"{field}.objective")
        g = difference_bifunction(f, f.quasiconcave, f.usc, label=f"f(u) - f(v), f = {f.label}",
                                  vectorized=True)
    elif kind == "vi":
        g = vi_bifunction(build_operator(spec.get("operator"), dim, f"{field}.operator"))
    elif kind == "bestapprox":
        g = bestapprox_bifunction(_vec(spec, "xstar", field, dim))
    elif kind == "max_affine":
        pieces = spec.get("pieces")
        if not isinstance(pieces, list) or not pieces:
            raise SpecError(f"{field}.pieces", "expected a nonempty list")
        for i, p in enumerate(pieces):
            pf = f"{field}.pieces[{i}]"
            _vec(p, "a", pf, dim)
            if "B" in p:
                _mat(p, "B", pf, (dim, dim))
            if "b" in p:
                _vec(p, "b", pf, dim)
            _num(p, "c", pf, 0.0)
        g = max_affine_bifunction(pieces, dim)
    else:
        raise SpecError(f"{field}.type",
                        f"unknown bifunction {kind!r}; expected difference, vi, bestapprox or max_affine")
    flags = _declared(spec, field, ("quasiconvex", "lsc"), {"quasiconvex": g.quasiconvex, "lsc": g.lsc})
    return Bifunction(g.fn, flags["quasiconvex"], flags["lsc"], g.label, g.vectorized)
