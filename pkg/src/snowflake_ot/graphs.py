"""Graphs, k-fold subdivisions, spectral gaps and Poincare-type bounds."""

from dataclasses import dataclass
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.sparse.linalg import eigsh

from . import config
from .errors import (
    DegreeLTTwo,
    DimensionMismatch,
    Disconnected,
    InputError,
    KZero,
    NotRegular,
    SizeLimitExceeded,
)
from .metric import FiniteMetricSpace, validate_metric

__all__ = [
    "Graph",
    "cycle_graph",
    "complete_graph",
    "random_regular_graph",
    "subdivide",
    "shortest_path_metric",
    "lambda2",
    "poincare_defect",
    "poincare_sharp_rhs",
    "SubdivisionBound",
    "subdivision_lower_bound",
]

DENSE_EIG_LIMIT = 5000


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Edges are stored once each as ``(u, v)`` with ``u < v``, in insertion
    order. ``labels`` names vertices; subdivisions label interior vertices
    ``(edge_id, position)``.
    """

    def __init__(self, n, edges, labels=None):
        if n < 1:
            raise InputError("a graph needs at least one vertex")
        seen = set()
        clean = []
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) leaves the vertex range")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise InputError(f"repeated edge {e}")
            seen.add(e)
            clean.append(e)
        self.n = n
        self.edges = clean
        self.labels = list(labels) if labels is not None else list(range(n))
        self.adj = [[] for _ in range(n)]
        for u, v in clean:
            self.adj[u].append(v)
            self.adj[v].append(u)

    @property
    def degrees(self):
        return np.array([len(a) for a in self.adj])

    def is_regular(self) -> bool:
        deg = self.degrees
        return bool(np.all(deg == deg[0]))

    @property
    def degree(self) -> int:
        if not self.is_regular():
            raise NotRegular("graph is not regular")
        return int(self.degrees[0])

    def adjacency(self):
        rows = [u for u, v in self.edges] + [v for u, v in self.edges]
        cols = [v for u, v in self.edges] + [u for u, v in self.edges]
        return csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))

    def is_connected(self) -> bool:
        return connected_components(self.adjacency(), directed=False)[0] == 1

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    def __repr__(self):
        return f"Graph(n={self.n}, edges={len(self.edges)})"


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError("a cycle needs at least three vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_regular_graph(n: int, d: int, rng, *, connected=True, max_tries=10000) -> Graph:
    """Uniform-ish random d-regular graph from the pairing model.

    ``n d`` half-edges are matched at random; matchings with loops or
    repeated edges are rejected, as are disconnected graphs when
    ``connected`` is set.
    """
    if d < 1 or d >= n or (n * d) % 2:
        raise InputError(f"no simple {d}-regular graph on {n} vertices")
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        perm = rng.permutation(stubs).reshape(-1, 2)
        if np.any(perm[:, 0] == perm[:, 1]):
            continue
        e = np.sort(perm, axis=1)
        if np.unique(e, axis=0).shape[0] != e.shape[0]:
            continue
        G = Graph(n, [tuple(x) for x in e.tolist()])
        if connected and not G.is_connected():
            continue
        return G
    raise InputError(f"pairing model failed {max_tries} times for n={n}, d={d}")


def subdivide(G: Graph, k: int) -> Graph:
    """Replace each edge by a path of k edges through k - 1 new vertices.

    Original vertices keep their indices. The interior vertex at position t
    (1..k-1, counted from the smaller endpoint) of edge number e gets index
    ``n + e (k - 1) + t - 1`` and label ``(e, t)``.
    """
    if k < 1:
        raise KZero("k must be at least 1")
    if k == 1:
        return Graph(G.n, G.edges, G.labels)
    n = G.n
    labels = list(G.labels)
    edges = []
    for e, (u, v) in enumerate(G.edges):
        inner = [n + e * (k - 1) + t for t in range(k - 1)]
        labels.extend((e, t + 1) for t in range(k - 1))
        chain = [u] + inner + [v]
        edges.extend(zip(chain[:-1], chain[1:]))
    return Graph(n + (k - 1) * len(G.edges), edges, labels)


def shortest_path_metric(G: Graph) -> FiniteMetricSpace:
    """Graph distance (BFS from every vertex)."""
    if G.n > config.max_points():
        raise SizeLimitExceeded(f"{G.n} vertices exceeds the cap of {config.max_points()}")
    D = shortest_path(G.adjacency(), method="D", directed=False, unweighted=True)
    if np.isinf(D).any():
        raise Disconnected("graph is disconnected")
    return validate_metric(D, exact=True, labels=G.labels)


def _normalized_adjacency(G):
    return G.adjacency().toarray() / G.degree


def lambda2(G: Graph, *, return_vector=False):
    """Second largest eigenvalue of ``A_G`` (adjacency divided by the degree).

    Dense symmetric eigensolver up to 5000 vertices, Lanczos beyond. The
    eigenpair residual is checked to 1e-9.
    """
    d = G.degree
    if G.n < 2:
        raise InputError("need at least two vertices")
    if G.n <= DENSE_EIG_LIMIT:
        w, V = np.linalg.eigh(_normalized_adjacency(G))
        lam, vec = float(w[-2]), V[:, -2]
        A = None
    else:
        A = G.adjacency() / d
        w, V = eigsh(A, k=2, which="LA", tol=1e-12)
        order = np.argsort(w)
        lam, vec = float(w[order[0]]), V[:, order[0]]
    M = A if A is not None else _normalized_adjacency(G)
    res = np.linalg.norm(M @ vec - lam * vec)
    if res > 1e-9 * np.linalg.norm(vec):
        raise ArithmeticError(f"eigenpair residual {res:.2e}")
    return (lam, vec) if return_vector else lam


def _embedding_values(G, g):
    g = np.asarray(g, dtype=float)
    if g.ndim == 1:
        g = g[:, None]
    if g.shape[0] != G.n:
        raise DimensionMismatch(f"map has {g.shape[0]} values for {G.n} vertices")
    return g


def _edge_energy(G, g):
    e = np.array(G.edges)
    diff = g[e[:, 0]] - g[e[:, 1]]
    return float(np.einsum("ij,ij->", diff, diff))


def poincare_defect(G: Graph, g, lam=None):
    """Both sides of the spectral-gap Poincare inequality for ``g: V -> R^k``.

    ``lhs = (1/n^2) sum_(x,y) |g(x) - g(y)|^2`` over ordered pairs and
    ``rhs = (1/(1 - lambda_2)) (2/|E|) sum_(edges) |g(x) - g(y)|^2`` over
    unordered edges. The sharp constant is half of this; see
    :func:`poincare_sharp_rhs`.
    """
    g = _embedding_values(G, g)
    lam = lambda2(G) if lam is None else lam
    n = G.n
    centred = g - g.mean(axis=0)
    lhs = 2.0 * float(np.einsum("ij,ij->", centred, centred)) / n
    rhs = (2.0 / len(G.edges)) * _edge_energy(G, g) / (1.0 - lam)
    return lhs, rhs


def poincare_sharp_rhs(G: Graph, g, lam=None) -> float:
    """``(1/(1 - lambda_2)) (1/|E|) sum_(edges) |g(x) - g(y)|^2``, attained by the lambda_2 eigenvector."""
    g = _embedding_values(G, g)
    lam = lambda2(G) if lam is None else lam
    return _edge_energy(G, g) / len(G.edges) / (1.0 - lam)


@dataclass(frozen=True)
class SubdivisionBound:
    """Constant-free branch values of the subdivision distortion bound.

    ``counting_ratio`` is ``avg_sq_root / (log n / log d)``; the counting
    argument says it stays above a universal constant.
    """

    term_a: float
    term_b: float
    avg_sq_root: float
    lambda2: float
    counting_ratio: float

    def to_json(self):
        return {
            "term_a": self.term_a,
            "term_b": self.term_b,
            "avg_sq_root": self.avg_sq_root,
            "lambda2": self.lambda2,
            "counting_ratio": self.counting_ratio,
        }


def subdivision_lower_bound(G: Graph, k: int) -> SubdivisionBound:
    """``sqrt(k log n / log d)`` and ``sqrt(1 - lambda_2) log n / log d`` for a d-regular G.

    Also returns ``sqrt((1/n^2) sum d_G(x, y)^2)`` for comparison with the
    counting bound. Needs ``d >= 2`` so that ``log d > 0``.
    """
    if k < 1:
        raise KZero("k must be at least 1")
    d = G.degree
    if d < 2:
        raise DegreeLTTwo(f"degree {d} makes log d vanish")
    n = G.n
    lam = lambda2(G)
    ratio = math.log(n) / math.log(d)
    D = shortest_path_metric(G).d
    avg = math.sqrt(float((D**2).sum()) / n**2)
    return SubdivisionBound(
        math.sqrt(k * ratio), math.sqrt(max(0.0, 1.0 - lam)) * ratio, avg, lam, avg / ratio
    )
