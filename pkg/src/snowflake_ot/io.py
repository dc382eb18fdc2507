"""JSON formats for metrics, measures, chains and graphs.

metric   ``{"n": int, "d": [[...]], "labels": [...]?}``
measure  ``{"dim": int, "points": [[...]], "weights": [...]}``
chain    ``{"P": [[...]], "pi": [...]}``
graph    ``{"n": int, "edges": [[u, v], ...]}``

Loaders raise :class:`MalformedInput` naming the file and the offending
field; the JSON parser's own line/column diagnostics are passed through.
"""

import json

import numpy as np

from .errors import MalformedInput
from .graphs import Graph
from .markov import validate_chain
from .metric import validate_metric
from .transport import DiscreteMeasure

__all__ = ["read_json", "dumps", "load_metric", "load_measure", "load_chain", "load_graph", "load_matrix"]


def _plain(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"{type(o).__name__} is not JSON serializable")


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True, default=_plain) + "\n"


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInput(path, "<document>", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise MalformedInput(path, "<file>", exc.strerror or str(exc)) from None


def _require(doc, key, kind, source):
    if not isinstance(doc, dict):
        raise MalformedInput(source, "<document>", "expected a JSON object")
    if key not in doc:
        raise MalformedInput(source, key, "missing")
    val = doc[key]
    if kind == "int" and (not isinstance(val, int) or isinstance(val, bool)):
        raise MalformedInput(source, key, f"expected an integer, got {type(val).__name__}")
    if kind == "matrix":
        if not isinstance(val, list) or not all(isinstance(r, list) for r in val):
            raise MalformedInput(source, key, "expected a list of rows")
        for i, row in enumerate(val):
            for j, x in enumerate(row):
                if not isinstance(x, (int, float)) or isinstance(x, bool):
                    raise MalformedInput(source, f"{key}[{i}][{j}]", "expected a number")
    if kind == "vector":
        if not isinstance(val, list):
            raise MalformedInput(source, key, "expected a list")
        for i, x in enumerate(val):
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise MalformedInput(source, f"{key}[{i}]", "expected a number")
    return val


def _doc(src):
    if isinstance(src, dict):
        return src, "<object>"
    return read_json(src), str(src)


def load_metric(src, tol=None):
    doc, name = _doc(src)
    n = _require(doc, "n", "int", name)
    d = _require(doc, "d", "matrix", name)
    if len(d) != n or any(len(r) != n for r in d):
        raise MalformedInput(name, "d", f"expected an {n}x{n} matrix")
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise MalformedInput(name, "labels", f"expected a list of {n} names")
    return validate_metric(d, tol=tol, labels=labels)


def load_measure(src):
    doc, name = _doc(src)
    dim = _require(doc, "dim", "int", name)
    pts = _require(doc, "points", "matrix", name)
    if any(len(r) != dim for r in pts):
        raise MalformedInput(name, "points", f"every point needs {dim} coordinates")
    w = doc.get("weights")
    if w is not None:
        _require(doc, "weights", "vector", name)
        if len(w) != len(pts):
            raise MalformedInput(name, "weights", "one weight per point required")
    return DiscreteMeasure(pts, w)


def load_chain(src):
    doc, name = _doc(src)
    P = _require(doc, "P", "matrix", name)
    pi = _require(doc, "pi", "vector", name)
    return validate_chain(P, pi)


def load_matrix(src, key="d"):
    doc, name = _doc(src)
    if isinstance(doc, list):
        doc = {key: doc}
    return _require(doc, key, "matrix", name)


def load_graph(src):
    doc, name = _doc(src)
    n = _require(doc, "n", "int", name)
    edges = _require(doc, "edges", "matrix", name)
    for t, e in enumerate(edges):
        if len(e) != 2 or not all(isinstance(x, int) for x in e):
            raise MalformedInput(name, f"edges[{t}]", "expected a pair of vertex indices")
    return Graph(n, [tuple(e) for e in edges])
