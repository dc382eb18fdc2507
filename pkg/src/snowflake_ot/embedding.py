"""The snowflake embedding of a finite metric space into W_p over R^3.

Each point x_i becomes the uniform measure on a common cloud of N - 1
points plus one private atom on the x-axis. Transport between two such
measures has to relay mass along a staircase of five segments whose
length encodes ``d(x_i, x_j) ** (1/p)``.

Coordinates are written as ``unit * integer`` with ``unit = M / (m K)``
wherever the construction allows, so that points which coincide in exact
arithmetic also coincide bitwise.
"""

from dataclasses import dataclass, field
import csv
import io
import math

import numpy as np
from scipy.spatial import cKDTree

from . import config
from .errors import EmptyInput, InputError, PartitionGap, PEqualsOne, SizeLimitExceeded
from .metric import FiniteMetricSpace
from .transport import (
    Coupling,
    DiscreteMeasure,
    coupling_cost,
    wasserstein,
    wasserstein_one_atom_swap,
)

__all__ = [
    "SnowflakeEmbedding",
    "DistortionReport",
    "PairRecord",
    "CertificateResult",
    "min_k_for_epsilon",
    "build_snowflake_embedding",
    "audit_distortion",
    "lower_bound_certificate",
    "explicit_coupling",
    "explicit_coupling_cost",
    "embed_l2_line",
]

BAND_TOL = 1e-9


def _check_p(p):
    if p == 1:
        raise PEqualsOne("p must exceed 1")
    if not (p > 1 and math.isfinite(p)):
        raise InputError(f"p must be a finite real > 1, got {p}")


def min_k_for_epsilon(X: FiniteMetricSpace, p: float, eps: float) -> int:
    """Smallest integer K meeting the sufficient condition for distortion ``1 + eps``.

    ``K >= (5 M^p n^(2p) / (p m^p eps)) ** (1/(p-1))``. Values within 1e-9
    relative of an integer are snapped to it so that exact integer bounds are
    not pushed up by rounding.
    """
    _check_p(p)
    if not (0 < eps < 1):
        raise InputError("eps must lie in (0, 1)")
    if X.n < 2:
        raise InputError("need at least two points")
    # M^p / m^p is the aspect ratio
    base = 5.0 * (X.diameter / X.min_distance) * X.n ** (2 * p) / (p * eps)
    v = base ** (1.0 / (p - 1))
    r = round(v)
    if abs(v - r) <= 1e-9 * v:
        return int(r)
    return int(math.ceil(v))


class SnowflakeEmbedding:
    """A built embedding. Use :func:`build_snowflake_embedding` to create one.

    Attributes
    ----------
    space : FiniteMetricSpace
    p, K : the exponent and the discretisation parameter
    m, M : smallest and largest distance raised to 1/p
    pairs : list of 1-based index pairs (i, j), i < j, in lexicographic order
    Q : ndarray, shape (len(pairs), 5, K + 1, 3)
        ``Q[k, t - 1, s]`` is the point Q^t_s of pair ``pairs[k]``.
    C : ndarray, shape (N - 1, 3)
        The shared cloud, deduplicated in first-occurrence order.
    axis_points : ndarray, shape (n, 3)
    N : int
    """

    def __init__(self, space, p, K, m, M, pairs, Q, B, C, axis_points):
        self.space = space
        self.p = p
        self.K = K
        self.m = m
        self.M = M
        self.pairs = pairs
        self.Q = Q
        self.B = B
        self.C = C
        self.axis_points = axis_points
        self.N = C.shape[0] + 1
        self._measures = None

    @property
    def n(self):
        return self.space.n

    def phi(self, i, j):
        return (i - 1) * self.n + j

    def pair_index(self, i, j):
        return self.pairs.index((i, j))

    def degenerate(self, i, j) -> bool:
        """True when the third family of (i, j) is a single point.

        This happens exactly when ``M (j - i) = d_ij^(1/p)``, for instance for
        every pair of a two-point space.
        """
        k = self.pair_index(i, j)
        return bool(np.array_equal(self.Q[k, 2, 0], self.Q[k, 2, -1]))

    def pair_size(self, i, j) -> int:
        """Distinct points of the pair: 5K + 2, or 4K + 2 when degenerate."""
        return 4 * self.K + 2 if self.degenerate(i, j) else 5 * self.K + 2

    def support(self, i):
        """Atoms of f(x_i) (1-based ``i``): the cloud followed by the axis point."""
        return np.vstack([self.C, self.axis_points[i - 1]])

    def measure(self, i) -> DiscreteMeasure:
        return DiscreteMeasure(self.support(i))

    @property
    def measures(self):
        if self._measures is None:
            self._measures = [self.measure(i) for i in range(1, self.n + 1)]
        return self._measures

    def scale(self, i, j):
        """``(d(x_i, x_j) / (m^p N)) ** (1/p)``, the ideal W_p value."""
        d = self.space.d[i - 1, j - 1]
        return (d / (self.m**self.p * self.N)) ** (1.0 / self.p)

    def to_json(self, include_measures=True) -> dict:
        out = {
            "p": self.p,
            "K": self.K,
            "m": self.m,
            "M": self.M,
            "n": self.n,
            "N": self.N,
            "cloud": self.C.tolist(),
            "axis_points": self.axis_points.tolist(),
        }
        if include_measures:
            # support of f(x_i) is the cloud plus axis point i; weights uniform
            out["measures"] = [
                {"cloud": True, "extra_atom": self.axis_points[i].tolist(), "weight": 1.0 / self.N}
                for i in range(self.n)
            ]
        return out


def _pair_points(i, j, n, K, unit, step3):
    """All five families for one pair, shape (5, K + 1, 3).

    ``step3 = (M (j - i) - d_ij^(1/p)) / (m K)`` is the spacing of the third
    family. Writing its x-coordinate as ``unit K j - (K - s) step3`` makes it
    land exactly on the fourth family at s = K, and collapse to one point
    when the spacing is zero.
    """
    phi = (i - 1) * n + j
    s = np.arange(K + 1)
    out = np.zeros((5, K + 1, 3))
    out[0, :, 0] = unit * (K * i)
    out[0, :, 1] = unit * (phi * s)
    out[1, :, 0] = unit * (K * i)
    out[1, :, 1] = unit * (phi * K)
    out[1, :, 2] = unit * s
    out[2, :, 0] = unit * (K * j) - (K - s) * step3
    out[2, :, 1] = unit * (phi * K)
    out[2, :, 2] = unit * K
    out[3, :, 0] = unit * (K * j)
    out[3, :, 1] = unit * (phi * K)
    out[3, :, 2] = unit * (K - s)
    out[4, :, 0] = unit * (K * j)
    out[4, :, 1] = unit * ((K - s) * phi)
    return out


def _unique_rows(pts):
    """Bitwise-distinct rows in first-occurrence order."""
    _, first = np.unique(pts, axis=0, return_index=True)
    return pts[np.sort(first)]


def build_snowflake_embedding(X: FiniteMetricSpace, p: float, K: int) -> SnowflakeEmbedding:
    """Materialise every point family, the cloud and the measures.

    Raises
    ------
    PEqualsOne, InputError
        For ``p <= 1``, ``K < 1`` or a one-point space.
    SizeLimitExceeded
        When N would exceed ``SNOWFLAKE_OT_MAX_SUPPORT``.
    """
    _check_p(p)
    if int(K) != K or K < 1:
        raise InputError(f"K must be a positive integer, got {K}")
    K = int(K)
    n = X.n
    if n < 2:
        raise InputError("the embedding needs at least two points")
    npairs = n * (n - 1) // 2
    cap = config.max_support()
    if npairs * (5 * K + 2) > cap:
        raise SizeLimitExceeded(
            f"up to {npairs * (5 * K + 2)} support points exceeds the cap of {cap} (SNOWFLAKE_OT_MAX_SUPPORT)"
        )
    m, M = X.extremes(p)
    unit = M / (m * K)
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    Q = np.empty((npairs, 5, K + 1, 3))
    for k, (i, j) in enumerate(pairs):
        dp = X.d[i - 1, j - 1] ** (1.0 / p)
        Q[k] = _pair_points(i, j, n, K, unit, (M * (j - i) - dp) / (m * K))

    axis = np.zeros((n, 3))
    axis[:, 0] = unit * (K * np.arange(1, n + 1))
    B = _unique_rows(Q.reshape(-1, 3))
    on_axis = (B[:, 1] == 0) & (B[:, 2] == 0) & np.isin(B[:, 0], axis[:, 0])
    C = B[~on_axis]
    emb = SnowflakeEmbedding(X, p, K, m, M, pairs, Q, B, C, axis)
    _check_invariants(emb)
    return emb


def _check_invariants(emb):
    Q, K = emb.Q, emb.K
    for k, (i, j) in enumerate(emb.pairs):
        q = Q[k]
        if not (np.array_equal(q[0, K], q[1, 0]) and np.array_equal(q[2, K], q[3, 0])
                and np.array_equal(q[3, K], q[4, 0])):
            raise AssertionError(f"family endpoints do not coincide for pair {(i, j)}")
        if not (np.array_equal(q[0, 0], emb.axis_points[i - 1])
                and np.array_equal(q[4, K], emb.axis_points[j - 1])):
            raise AssertionError(f"pair {(i, j)} does not start and end on the axis")
        if _unique_rows(q.reshape(-1, 3)).shape[0] != emb.pair_size(i, j):
            raise AssertionError(f"pair {(i, j)} has an unexpected number of distinct points")
    if emb.C.shape[0] + emb.n != emb.B.shape[0]:
        raise AssertionError("axis points missing from the point set")


@dataclass(frozen=True)
class PairRecord:
    i: int
    j: int
    target_lo: float
    target_hi: float
    measured: float
    ratio: float
    in_band: bool


@dataclass
class DistortionReport:
    """Per-pair audit results plus summary figures."""

    records: list
    p: float
    K: int
    N: int
    eps: float
    solver: str

    @property
    def ratios(self):
        return np.array([r.ratio for r in self.records])

    @property
    def max_ratio(self):
        return float(self.ratios.max())

    @property
    def min_ratio(self):
        return float(self.ratios.min())

    @property
    def distortion(self):
        return self.max_ratio / self.min_ratio

    @property
    def worst_pair(self):
        r = max(self.records, key=lambda rec: rec.ratio)
        return (r.i, r.j)

    @property
    def passed(self):
        return all(r.in_band for r in self.records)

    def violations(self):
        return [r for r in self.records if not r.in_band]

    def summary(self) -> dict:
        return {
            "distortion": self.distortion,
            "max_ratio": self.max_ratio,
            "min_ratio": self.min_ratio,
            "worst_pair": list(self.worst_pair),
            "K": self.K,
            "N": self.N,
            "p": self.p,
            "eps": self.eps,
            "solver": self.solver,
            "passed": self.passed,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "target_lo", "target_hi", "measured", "ratio"])
        for r in self.records:
            w.writerow([r.i, r.j] + [repr(float(x)) for x in (r.target_lo, r.target_hi, r.measured, r.ratio)])
        return buf.getvalue()


def audit_distortion(emb: SnowflakeEmbedding, eps: float, *, generic=False) -> DistortionReport:
    """Measure W_p(f(x_i), f(x_j)) for every pair and compare with the ideal scale.

    A pair is in band when its ratio lies in ``[1 - 1e-9, 1 + eps + 1e-9]``.
    ``generic=True`` swaps the one-atom-swap solver for the full assignment
    solver; only sensible for small N.
    """
    if eps <= 0:
        raise InputError("eps must be positive")
    records = []
    for i, j in emb.pairs:
        a = emb.axis_points[i - 1]
        b = emb.axis_points[j - 1]
        if generic:
            w, _ = wasserstein(emb.measure(i), emb.measure(j), emb.p)
        else:
            w, _ = wasserstein_one_atom_swap(emb.C, a, b, emb.p, emb.N)
        s = emb.scale(i, j)
        ratio = w / s
        ok = (1.0 - BAND_TOL) <= ratio <= (1.0 + eps + BAND_TOL)
        records.append(PairRecord(i, j, s, (1.0 + eps) * s, w, ratio, ok))
    return DistortionReport(records, emb.p, emb.K, emb.N, eps, "generic" if generic else "one-atom-swap")


def _parts(emb):
    """The sets S_1..S_n as arrays of bitwise-distinct points."""
    n, K = emb.n, emb.K
    chunks = [[] for _ in range(n)]
    for k, (i, j) in enumerate(emb.pairs):
        chunks[i - 1].append(emb.Q[k, 0:2].reshape(-1, 3))
        chunks[j - 1].append(emb.Q[k, 2:5].reshape(-1, 3))
    return [_unique_rows(np.vstack(c)) for c in chunks]


@dataclass(frozen=True)
class CertificateResult:
    passed: bool
    worst_pair: tuple
    worst_ratio: float
    ratios: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "passed": self.passed,
            "worst_pair": list(self.worst_pair),
            "worst_ratio": self.worst_ratio,
            "ratios": {f"{a},{b}": r for (a, b), r in sorted(self.ratios.items())},
        }


def lower_bound_certificate(emb: SnowflakeEmbedding) -> CertificateResult:
    """Check that the parts S_a partition the point set and are far apart.

    For every a < b the closest pair (u, v) in S_a x S_b must satisfy
    ``||u - v||^p >= d(x_a, x_b) / m^p`` up to 1e-9 relative. Each pair's
    ratio of the two sides is reported; the worst one decides.

    Raises
    ------
    PartitionGap
        If some point lies in no part or in two parts.
    """
    parts = _parts(emb)
    owner = {}
    for a, S in enumerate(parts, start=1):
        for row in S:
            key = row.tobytes()
            if key in owner and owner[key] != a:
                raise PartitionGap(f"point {row.tolist()} lies in parts {owner[key]} and {a}")
            owner[key] = a
    for row in emb.B:
        if row.tobytes() not in owner:
            raise PartitionGap(f"point {row.tolist()} lies in no part")
    if len(owner) != emb.B.shape[0]:
        raise PartitionGap("parts contain points outside the point set")

    p, m = emb.p, emb.m
    ratios = {}
    trees = [cKDTree(S) for S in parts]
    for a in range(1, emb.n + 1):
        for b in range(a + 1, emb.n + 1):
            dist, _ = trees[b - 1].query(parts[a - 1], k=1)
            need = emb.space.d[a - 1, b - 1] / m**p
            ratios[(a, b)] = float(dist.min()) ** p / need
    worst = min(ratios, key=ratios.get)
    return CertificateResult(ratios[worst] >= 1.0 - 1e-9, worst, ratios[worst], ratios)


def explicit_coupling(emb: SnowflakeEmbedding, i: int, j: int):
    """The staircase coupling between f(x_i) and f(x_j), with i < j.

    Mass on the chain of 5K + 2 points of pair (i, j) moves one step forward,
    everything else stays put. Returns ``(plan, mu_i, mu_j)`` where the plan
    indexes :meth:`SnowflakeEmbedding.support`.
    """
    if not i < j:
        raise InputError("explicit_coupling needs i < j")
    q = emb.Q[emb.pair_index(i, j)]
    # the chain, dropping the duplicated endpoints of consecutive families
    chain = np.vstack([q[0], q[1, 1:], q[2], q[3, 1:], q[4, 1:]])
    # a collapsed third family repeats its point; zero-length steps go
    keep = np.ones(len(chain), dtype=bool)
    keep[1:] = np.any(chain[1:] != chain[:-1], axis=1)
    chain = chain[keep]
    C = emb.C
    index = {row.tobytes(): t for t, row in enumerate(C)}
    last = C.shape[0]

    # the axis endpoints are not in the cloud; both sit at the last index
    slots = [index.get(pt.tobytes(), last) for pt in chain]
    moved_from, moved_to = slots[:-1], slots[1:]
    on_chain = set(moved_from) | set(moved_to)
    fixed = [t for t in range(last) if t not in on_chain]
    rows = np.array(moved_from + fixed, dtype=np.int64)
    cols = np.array(moved_to + fixed, dtype=np.int64)
    mass = np.full(rows.shape[0], 1.0 / emb.N)
    assert rows.shape[0] == emb.N and len(chain) == emb.pair_size(i, j)
    mu, nu = emb.measure(i), emb.measure(j)
    return Coupling(rows, cols, mass, (emb.N, emb.N)), mu, nu


def explicit_coupling_cost(emb, i, j):
    plan, mu, nu = explicit_coupling(emb, i, j)
    return coupling_cost(plan, mu, nu, emb.p)


def embed_l2_line(points) -> list:
    """Isometric embedding of a finite subset of l_2^n into W_2 over R.

    ``x`` maps to the uniform measure on ``sqrt(n) * (x_j + M j)``, j = 1..n,
    where ``M = 1 + max |x_(j+1) - x_j|`` over all points. The offset keeps
    every atom sequence increasing, so monotone matching pairs coordinate j
    with coordinate j and ``W_2(f(x), f(y)) = ||x - y||_2``.
    """
    X = np.asarray(points, dtype=float)
    if X.size == 0:
        raise EmptyInput("no points given")
    if X.ndim == 1:
        X = X[None, :]
    n = X.shape[1]
    gaps = np.abs(np.diff(X, axis=1))
    M = 1.0 + (float(gaps.max()) if gaps.size else 0.0)
    offsets = M * np.arange(1, n + 1)
    return [DiscreteMeasure(math.sqrt(n) * (x + offsets)) for x in X]
