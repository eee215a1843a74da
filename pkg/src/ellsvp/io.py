"""JSON readers and writers for bodies, lattices, matrices and ellipsoids.

Body file::

    {"kind": "L_P_BALL" | "SYM_POLYTOPE" | "ELLIPSOID_BODY" | "LINEAR_IMAGE",
     "dim": n, "parameters": {...}, "sandwich_r": opt, "sandwich_R": opt}

Parameters per kind: ``L_P_BALL`` takes ``p`` (number or ``"inf"``) and
``radius``; ``SYM_POLYTOPE`` takes ``rows`` (the body is ``|<a_i, x>| <= 1``);
``ELLIPSOID_BODY`` takes ``shape`` (the body is ``shape @ B2``);
``LINEAR_IMAGE`` takes ``T`` and a nested body document ``inner``.
Matrices are row-major arrays of arrays.  Declared sandwich radii are
optional; when present they must agree with the computed ones.

Lattice file: ``{"dim": n, "basis": [[...], ...]}`` where each inner array is
one basis vector (a column of the basis matrix).  Integer entries give an
exact integer lattice.

Floats are written with ``repr`` precision so every value re-parses to the
same double.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .bodies import ConvexBody, EllipsoidBody, LinearImage, LpBall, SymPolytope
from .errors import EllSvpError
from .lattice import LatticeBasis
from .solver import Ellipsoid

SANDWICH_RTOL = 1e-6
BODY_KINDS = ("L_P_BALL", "SYM_POLYTOPE", "ELLIPSOID_BODY", "LINEAR_IMAGE")


class ParseError(EllSvpError, ValueError):
    """Malformed input; ``location`` names the file and the JSON path."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def _load(source) -> tuple[object, str]:
    """Accept a path, a JSON string or an already decoded object."""
    if isinstance(source, (dict, list)):
        return source, "<object>"
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith(("{", "["))):
        path = str(source)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ParseError(str(exc), path) from None
    else:
        path, text = "<string>", source
    try:
        return json.loads(text), path
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None


def _field(doc, key, loc):
    if not isinstance(doc, dict):
        raise ParseError("expected an object", loc)
    if key not in doc:
        raise ParseError(f"missing field '{key}'", loc)
    return doc[key]


def _number(x, loc) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {x!r}", loc)
    if not math.isfinite(x):
        raise ParseError("non-finite number", loc)
    return x


def _matrix(x, loc, rows=None, cols=None) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ParseError("expected a non-empty array of arrays", loc)
    width = len(x[0])
    for i, row in enumerate(x):
        if len(row) != width:
            raise ParseError(f"row {i} has length {len(row)}, expected {width}", f"{loc}[{i}]")
        for j, v in enumerate(row):
            _number(v, f"{loc}[{i}][{j}]")
    if rows is not None and len(x) != rows:
        raise ParseError(f"expected {rows} rows, got {len(x)}", loc)
    if cols is not None and width != cols:
        raise ParseError(f"expected {cols} columns, got {width}", loc)
    if all(isinstance(v, int) for row in x for v in row):
        return np.array(x, dtype=np.int64)
    return np.array(x, dtype=float)


def _vector(x, loc, n=None) -> np.ndarray:
    if not isinstance(x, list):
        raise ParseError("expected an array", loc)
    for i, v in enumerate(x):
        _number(v, f"{loc}[{i}]")
    if n is not None and len(x) != n:
        raise ParseError(f"expected length {n}, got {len(x)}", loc)
    return np.array(x, dtype=float)


def _dim(doc, loc) -> int:
    n = _field(doc, "dim", loc)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"dim must be a positive integer, got {n!r}", f"{loc}.dim")
    return n


def body_from_dict(doc, loc: str = "$") -> ConvexBody:
    kind = _field(doc, "kind", loc)
    if kind == "ORACLE":
        raise ParseError("membership-oracle bodies are code objects and cannot be read from a file",
                         f"{loc}.kind")
    if kind not in BODY_KINDS:
        raise ParseError(f"unknown body kind {kind!r}; expected one of {', '.join(BODY_KINDS)}",
                         f"{loc}.kind")
    n = _dim(doc, loc)
    par = _field(doc, "parameters", loc)
    ploc = f"{loc}.parameters"
    if not isinstance(par, dict):
        raise ParseError("expected an object", ploc)
    try:
        if kind == "L_P_BALL":
            p = par.get("p", 2)
            p = math.inf if p == "inf" else _number(p, f"{ploc}.p")
            radius = _number(par.get("radius", 1.0), f"{ploc}.radius")
            body = LpBall(n, float(p), float(radius))
        elif kind == "SYM_POLYTOPE":
            body = SymPolytope(_matrix(_field(par, "rows", ploc), f"{ploc}.rows", cols=n).astype(float))
        elif kind == "ELLIPSOID_BODY":
            body = EllipsoidBody(_matrix(_field(par, "shape", ploc), f"{ploc}.shape", n, n).astype(float))
        else:
            T = _matrix(_field(par, "T", ploc), f"{ploc}.T", n, n).astype(float)
            inner = body_from_dict(_field(par, "inner", ploc), f"{ploc}.inner")
            if inner.dim != n:
                raise ParseError(f"inner body has dim {inner.dim}, expected {n}", f"{ploc}.inner")
            body = LinearImage(T, inner)
    except ParseError:
        raise
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise ParseError(str(exc), ploc) from None

    for key, actual in (("sandwich_r", body.sandwich_r), ("sandwich_R", body.sandwich_R)):
        declared = doc.get(key)
        if declared is None:
            continue
        declared = _number(declared, f"{loc}.{key}")
        if abs(declared - actual) > SANDWICH_RTOL * max(1.0, abs(actual)):
            raise ParseError(f"declared {key}={declared!r} disagrees with computed {actual!r}",
                             f"{loc}.{key}")
    return body


def body_to_dict(body: ConvexBody, with_sandwich: bool = True) -> dict:
    d = body.to_dict()
    if with_sandwich:
        d["sandwich_r"] = float(body.sandwich_r)
        d["sandwich_R"] = float(body.sandwich_R)
    return d


def read_body(source) -> ConvexBody:
    doc, path = _load(source)
    return body_from_dict(doc, path)


def read_lattice(source) -> LatticeBasis:
    doc, path = _load(source)
    n = _dim(doc, path)
    cols = _matrix(_field(doc, "basis", path), f"{path}.basis", n, n)
    try:
        return LatticeBasis(cols.T)
    except ValueError as exc:
        raise ParseError(str(exc), f"{path}.basis") from None


def lattice_to_dict(basis: LatticeBasis) -> dict:
    return {"dim": basis.dim, "basis": basis.columns.tolist()}


def read_matrix(source, n: int | None = None) -> np.ndarray:
    """A bare array of arrays or ``{"matrix": [[...]]}``."""
    doc, path = _load(source)
    if isinstance(doc, dict):
        return _matrix(_field(doc, "matrix", path), f"{path}.matrix", n, n).astype(float)
    return _matrix(doc, path, n, n).astype(float)


def read_vector(source, n: int | None = None) -> np.ndarray:
    """A bare array or ``{"center": [...]}``."""
    doc, path = _load(source)
    if isinstance(doc, dict):
        return _vector(_field(doc, "center", path), f"{path}.center", n)
    return _vector(doc, path, n)


def read_ellipsoid(source, n: int | None = None) -> Ellipsoid:
    doc, path = _load(source)
    shape = _matrix(_field(doc, "shape", path), f"{path}.shape", n, n).astype(float)
    radius = _number(doc.get("radius", 1.0), f"{path}.radius")
    try:
        return Ellipsoid(shape, float(radius))
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


def ellipsoid_to_dict(E: Ellipsoid) -> dict:
    return {"shape": E.shape.tolist(), "radius": float(E.radius)}


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip float repr."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2)
