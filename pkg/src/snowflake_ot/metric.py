"""Validated finite metric spaces, snowflakes and canonical generators."""

from dataclasses import dataclass
import itertools
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from . import config
from .errors import (
    AlphaOutOfRange,
    Asymmetric,
    InputError,
    NegativeOrZeroOffDiagonal,
    NonzeroDiagonal,
    SinglePoint,
    SizeLimitExceeded,
    TriangleViolation,
)

__all__ = [
    "FiniteMetricSpace",
    "validate_metric",
    "symmetrize_matrix",
    "snowflake",
    "aspect_ratio",
    "aspect_distortion_bound",
    "hamming_cube",
    "path_metric",
    "euclidean_metric",
    "random_uniform_metric",
    "random_graph_metric",
    "random_tree_metric",
]


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """An n-point metric space stored as a read-only distance matrix.

    Construct through :func:`validate_metric`; the constructor itself does
    not check the metric axioms.
    """

    d: np.ndarray
    labels: tuple | None = None

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.d.max()) if self.n > 1 else 0.0

    @property
    def min_distance(self) -> float:
        if self.n < 2:
            raise SinglePoint("a single point has no positive distance")
        off = self.d[~np.eye(self.n, dtype=bool)]
        return float(off.min())

    def extremes(self, p: float) -> tuple[float, float]:
        """Return ``(m, M)``: the smallest and largest distance raised to ``1/p``."""
        return self.min_distance ** (1.0 / p), self.diameter ** (1.0 / p)

    def to_json(self) -> dict:
        out = {"n": self.n, "d": self.d.tolist()}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out


def symmetrize_matrix(raw) -> tuple[np.ndarray, float]:
    """Average ``raw`` with its transpose; also return the largest deviation removed."""
    a = np.asarray(raw, dtype=float)
    sym = 0.5 * (a + a.T)
    return sym, float(np.abs(a - sym).max()) if a.size else 0.0


def validate_metric(raw, tol=None, *, exact=False, labels=None) -> FiniteMetricSpace:
    """Check the metric axioms on ``raw`` and wrap it.

    Parameters
    ----------
    raw : array_like, shape (n, n)
        Candidate distance matrix.
    tol : float, optional
        Slack allowed in the triangle inequality. Defaults to ``1e-9 * diam``.
    exact : bool
        Use zero slack in the triangle inequality.
    labels : sequence, optional
        Point names.

    Raises
    ------
    NonzeroDiagonal, Asymmetric, NegativeOrZeroOffDiagonal, TriangleViolation
        With the indices of the first violation found (lexicographic order).
    """
    d = np.array(raw, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InputError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise InputError("distance matrix has non-finite entries")
    n = d.shape[0]
    if n == 0:
        raise InputError("empty distance matrix")
    if labels is not None and len(labels) != n:
        raise InputError("labels length does not match matrix size")

    for i in range(n):
        if d[i, i] != 0.0:
            raise NonzeroDiagonal(i)
    bad = np.argwhere(d != d.T)
    if bad.size:
        i, j = sorted(bad[0])
        raise Asymmetric(int(i), int(j))
    off = ~np.eye(n, dtype=bool)
    bad = np.argwhere((d <= 0.0) & off)
    if bad.size:
        i, j = bad[0]
        raise NegativeOrZeroOffDiagonal(int(i), int(j))

    if exact:
        slack = 0.0
    elif tol is None:
        slack = 1e-9 * float(d.max())
    else:
        slack = float(tol)
    for i in range(n):
        # through[k, j] = d[i, k] + d[k, j]
        through = d[i][:, None] + d
        viol = d[i][None, :] > through + slack
        if viol.any():
            j, k = np.argwhere(viol.T)[0]
            raise TriangleViolation(i, int(j), int(k))

    d.setflags(write=False)
    return FiniteMetricSpace(d, tuple(labels) if labels is not None else None)


def snowflake(X: FiniteMetricSpace, alpha: float) -> FiniteMetricSpace:
    """The alpha-snowflake: every distance raised to ``alpha`` in (0, 1]."""
    if not (0.0 < alpha <= 1.0):
        raise AlphaOutOfRange(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        return X
    d = X.d**alpha
    return validate_metric(d, tol=1e-12 * float(d.max()), labels=X.labels)


def aspect_ratio(X: FiniteMetricSpace) -> float:
    if X.n < 2:
        raise SinglePoint("aspect ratio needs at least two points")
    return X.diameter / X.min_distance


def aspect_distortion_bound(X: FiniteMetricSpace) -> float:
    """Square root of the aspect ratio: the distortion bound into W_2 space over R^3."""
    return math.sqrt(aspect_ratio(X))


def _check_size(n):
    cap = config.max_points()
    if n > cap:
        raise SizeLimitExceeded(f"{n} points exceeds the cap of {cap} (SNOWFLAKE_OT_MAX_POINTS)")


def hamming_cube(k: int) -> FiniteMetricSpace:
    """{0,1}^k with the Hamming metric; point ``x`` sits at index ``sum x_b 2^(k-1-b)``."""
    if k < 1:
        raise InputError("cube dimension must be positive")
    _check_size(2**k)
    idx = np.arange(2**k)
    xor = idx[:, None] ^ idx[None, :]
    d = np.zeros(xor.shape, dtype=float)
    for b in range(k):
        d += (xor >> b) & 1
    labels = tuple("".join(bits) for bits in itertools.product("01", repeat=k))
    return validate_metric(d, exact=True, labels=labels)


def path_metric(n: int) -> FiniteMetricSpace:
    """The points 1..n of the real line."""
    if n < 2:
        raise InputError("path metric needs n >= 2")
    _check_size(n)
    x = np.arange(1, n + 1, dtype=float)
    return validate_metric(np.abs(x[:, None] - x[None, :]), exact=True)


def euclidean_metric(points) -> np.ndarray:
    """Pairwise Euclidean distances of the rows of ``points`` (not validated)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def random_uniform_metric(n: int, rng, low=1.0, high=2.0) -> FiniteMetricSpace:
    """Random metric with every distance uniform in ``[low, high]``.

    Needs ``high <= 2 * low`` so the triangle inequality holds automatically;
    the aspect ratio is then at most ``high / low``.
    """
    if high > 2 * low:
        raise InputError("need high <= 2*low for an automatic metric")
    d = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    d[iu] = rng.uniform(low, high, size=len(iu[0]))
    d = d + d.T
    return validate_metric(d)


def _symmetric(D):
    # Dijkstra may sum a path in either direction; both sums are valid lengths
    return np.minimum(D, D.T)


def random_graph_metric(n: int, rng, edge_prob=0.5, wmin=0.5, wmax=2.0) -> np.ndarray:
    """Shortest-path metric of a random connected weighted graph on n vertices."""
    w = np.zeros((n, n))
    # random spanning tree keeps the graph connected
    order = rng.permutation(n)
    for t in range(1, n):
        u, v = order[t], order[rng.integers(t)]
        w[u, v] = w[v, u] = rng.uniform(wmin, wmax)
    extra = np.triu(rng.random((n, n)) < edge_prob, 1)
    extra &= w == 0
    vals = rng.uniform(wmin, wmax, size=(n, n))
    w = np.where(extra | extra.T, np.triu(vals, 1) + np.triu(vals, 1).T, w)
    return _symmetric(shortest_path(csr_matrix(w), method="D", directed=False))


def random_tree_metric(n_vertices: int, rng, wmin=0.1, wmax=1.0) -> np.ndarray:
    """All-pairs distances of a random weighted tree (a CAT(0) space)."""
    w = np.zeros((n_vertices, n_vertices))
    for v in range(1, n_vertices):
        u = rng.integers(v)
        w[u, v] = w[v, u] = rng.uniform(wmin, wmax)
    return _symmetric(shortest_path(csr_matrix(w), method="D", directed=False))
