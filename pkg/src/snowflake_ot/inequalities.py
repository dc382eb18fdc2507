"""Quadratic metric inequalities and related four-point checks.

An (A, B) inequality asserts ``sum a_ij d_ij^2 <= sum b_ij d_ij^2``. Sums
run over ordered pairs (i, j), so a coefficient placed on cell (i, j) and
one placed on (j, i) weigh the same distance. Defects use the convention
``rhs - lhs``: nonnegative means satisfied.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .errors import (
    ConstraintViolated,
    DegenerateWeights,
    InputError,
    MissingVertex,
    NegativeEntry,
    NotAPermutation,
    ShapeMismatch,
    SizeMismatch,
    ZeroDistance,
)

__all__ = [
    "QuadraticInequality",
    "DefectReport",
    "PtolemyResult",
    "NoSquaresReport",
    "evaluate_quadratic",
    "harmonic_inequality",
    "permutation_inequality",
    "quadruple_inequality",
    "sturm_quadruple_inequality",
    "roundness2_inequality",
    "ptolemy_defect",
    "reshetnyak_defect",
    "enflo_defect",
    "aggregate_inequality",
    "no_squares_defect",
    "alexandrov_midpoint_defects",
    "lebedeva_petrunin_defect",
    "random_harmonic_data",
    "FAMILIES",
]

CONSTRAINT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QuadraticInequality:
    """Coefficient pair (A, B) with a record of how it was produced.

    ``provenance["harmonic"]`` is True for instances that come straight out
    of the harmonic recipe, which is what the factor-3 check needs.
    """

    A: np.ndarray
    B: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.A.shape != self.B.shape or self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ShapeMismatch("A and B must be square and of the same shape")
        if np.any(self.A < 0) or np.any(self.B < 0):
            raise NegativeEntry("coefficients must be nonnegative")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def folded(self):
        """Equivalent inequality with all weight on cells i < j."""
        return QuadraticInequality(_fold(self.A), _fold(self.B), dict(self.provenance))

    def same_as(self, other, tol=1e-12) -> bool:
        a, b = self.folded(), other.folded()
        return bool(np.allclose(a.A, b.A, rtol=0, atol=tol) and np.allclose(a.B, b.B, rtol=0, atol=tol))

    def to_json(self) -> dict:
        return {"A": self.A.tolist(), "B": self.B.tolist(), "provenance": self.provenance}


def _fold(X):
    return np.triu(X + X.T, 1)


@dataclass(frozen=True)
class DefectReport:
    lhs: float
    rhs: float

    @property
    def defect(self) -> float:
        return self.rhs - self.lhs

    @property
    def min_D(self) -> float:
        """Smallest D >= 1 with ``lhs <= D^2 rhs``."""
        if self.lhs <= self.rhs:
            return 1.0
        if self.rhs == 0:
            return math.inf
        return math.sqrt(self.lhs / self.rhs)

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "defect": self.defect, "min_D": self.min_D}


def _as_dist(dist, n=None):
    D = np.asarray(dist, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ShapeMismatch(f"distance matrix must be square, got {D.shape}")
    if n is not None and D.shape[0] != n:
        raise ShapeMismatch(f"expected a {n}x{n} distance matrix, got {D.shape}")
    return D


def evaluate_quadratic(ineq: QuadraticInequality, dist) -> DefectReport:
    D2 = _as_dist(dist, ineq.n) ** 2
    return DefectReport(float((ineq.A * D2).sum()), float((ineq.B * D2).sum()))


def _harmonic_mean_cells(A, B):
    S = A + B
    out = np.zeros_like(S)
    nz = S > 0
    out[nz] = A[nz] * B[nz] / S[nz]
    return out


def _probability(v, name):
    v = np.asarray(v, dtype=float).ravel()
    if np.any(v < 0):
        raise NegativeEntry(f"{name} has negative entries")
    if abs(v.sum() - 1.0) > CONSTRAINT_TOL:
        raise InputError(f"{name} must sum to 1")
    return v


def harmonic_inequality(p, q, A, B, *, tol=CONSTRAINT_TOL) -> QuadraticInequality:
    """The barycentric recipe.

    Given weights p, q and nonnegative A, B with
    ``sum_k a_ik + sum_k b_kj = p_i + q_j`` for all i, j, every Hadamard space
    satisfies ``sum a_ij b_ij/(a_ij + b_ij) d_ij^2 <= sum p_i q_j d_ij^2``.
    Cells with ``a_ij = b_ij = 0`` get coefficient 0.

    Raises
    ------
    NegativeEntry, ConstraintViolated
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.any(A < 0) or np.any(B < 0):
        raise NegativeEntry("A and B must be nonnegative")
    p = _probability(p, "p")
    q = _probability(q, "q")
    n = p.shape[0]
    if q.shape[0] != n or A.shape != (n, n) or B.shape != (n, n):
        raise ShapeMismatch("p, q, A, B sizes disagree")
    gap = A.sum(axis=1)[:, None] + B.sum(axis=0)[None, :] - (p[:, None] + q[None, :])
    bad = np.argwhere(np.abs(gap) > tol)
    if bad.size:
        i, j = bad[0]
        raise ConstraintViolated(int(i), int(j), float(gap[i, j]))
    return QuadraticInequality(
        _harmonic_mean_cells(A, B), np.outer(p, q), {"recipe": "harmonic", "harmonic": True}
    )


def permutation_inequality(p, sigma) -> QuadraticInequality:
    """``sum_i p_i p_s(i)/(p_i + p_s(i)) d(i, s(i))^2 <= sum p_i p_j d_ij^2``.

    Built through the harmonic recipe with ``a_(i, s(i)) = p_i`` and
    ``b_(i, s(i)) = p_s(i)``.
    """
    p = _probability(p, "p")
    sigma = np.asarray(sigma)
    n = p.shape[0]
    if sigma.shape != (n,) or sorted(sigma.tolist()) != list(range(n)):
        raise NotAPermutation(f"{sigma.tolist()} is not a permutation of 0..{n - 1}")
    A = np.zeros((n, n))
    B = np.zeros((n, n))
    idx = np.arange(n)
    A[idx, sigma] = p
    B[idx, sigma] = p[sigma]
    ineq = harmonic_inequality(p, p, A, B)
    return QuadraticInequality(
        ineq.A, ineq.B, {"recipe": "permutation", "sigma": sigma.tolist(), "harmonic": True}
    )


def quadruple_inequality(p1, p2, p3, p4) -> QuadraticInequality:
    """Weighted quadruple inequality with three degrees of freedom.

    Right side: the four sides 12, 23, 34, 41 with weights p1p2, p2p3, p3p4,
    p4p1. Left side: diagonal 13 with ``p1 p3 (p2 + p4)/(p1 + p3)`` and
    diagonal 24 with ``p2 p4 (p1 + p3)/(p2 + p4)``.
    """
    w = np.array([p1, p2, p3, p4], dtype=float)
    if np.any(w < 0):
        raise NegativeEntry("weights must be nonnegative")
    if w[0] + w[2] <= 0 or w[1] + w[3] <= 0:
        raise DegenerateWeights("need p1 + p3 > 0 and p2 + p4 > 0")
    A = np.zeros((4, 4))
    B = np.zeros((4, 4))
    A[0, 2] = w[0] * w[2] * (w[1] + w[3]) / (w[0] + w[2])
    A[1, 3] = w[1] * w[3] * (w[0] + w[2]) / (w[1] + w[3])
    B[0, 1] = w[0] * w[1]
    B[1, 2] = w[1] * w[2]
    B[2, 3] = w[2] * w[3]
    B[3, 0] = w[3] * w[0]
    return QuadraticInequality(A, B, {"recipe": "quadruple", "weights": w.tolist()})


def sturm_quadruple_inequality(s, t) -> QuadraticInequality:
    """The quadruple inequality with weights ``(s, t, 1 - s, 1 - t)``."""
    if not (0 <= s <= 1 and 0 <= t <= 1):
        raise InputError("s and t must lie in [0, 1]")
    ineq = quadruple_inequality(s, t, 1 - s, 1 - t)
    return QuadraticInequality(ineq.A, ineq.B, {"recipe": "sturm", "s": s, "t": t})


def roundness2_inequality() -> QuadraticInequality:
    """``d13^2 + d24^2 <= d12^2 + d23^2 + d34^2 + d41^2``."""
    A = np.zeros((4, 4))
    B = np.zeros((4, 4))
    A[0, 2] = A[1, 3] = 1.0
    B[0, 1] = B[1, 2] = B[2, 3] = B[3, 0] = 1.0
    return QuadraticInequality(A, B, {"recipe": "roundness2"})


def _quad_dists(dist):
    D = _as_dist(dist, 4)
    return D[0, 1], D[1, 2], D[2, 3], D[3, 0], D[0, 2], D[1, 3]


@dataclass(frozen=True)
class PtolemyResult:
    """Ptolemy slack, its lower bound, and the weights that produce the bound.

    ``via_quadruple`` is half the defect of the quadruple inequality at
    ``weights``; it equals ``slack - defect_lower`` in exact arithmetic.
    """

    slack: float
    defect_lower: float
    weights: tuple
    via_quadruple: float

    @property
    def reproduced_gap(self) -> float:
        return abs(self.via_quadruple - (self.slack - self.defect_lower))

    def to_json(self):
        return {
            "slack": self.slack,
            "defect_lower": self.defect_lower,
            "weights": list(self.weights),
            "via_quadruple": self.via_quadruple,
            "reproduced_gap": self.reproduced_gap,
        }


def ptolemy_defect(dist) -> PtolemyResult:
    """Ptolemy slack ``d12 d34 + d23 d41 - d13 d24`` and its quadruple lower bound."""
    d12, d23, d34, d41, d13, d24 = _quad_dists(dist)
    if min(d12, d23, d34, d41, d13, d24) <= 0:
        raise ZeroDistance("all six distances must be positive")
    slack = d12 * d34 + d23 * d41 - d13 * d24
    u = d12 * d23 + d34 * d41
    v = d12 * d41 + d23 * d34
    lower = (u * d13 - v * d24) ** 2 / (2.0 * v * u)
    r = (d23 + d41) / (d12 + d34)
    w = (
        d34 / d41 * r,
        d41 / d12 / r,
        d12 / d23 * r,
        d23 / d34 / r,
    )
    rep = evaluate_quadratic(quadruple_inequality(*w), dist)
    return PtolemyResult(float(slack), float(lower), tuple(float(x) for x in w), 0.5 * rep.defect)


def reshetnyak_defect(dist) -> float:
    """``d12^2 + d34^2 + 2 d23 d41 - d13^2 - d24^2``.

    Opposite sides 12 and 34 enter squared, the other pair as a product.
    The variant ``d12^2 + d23^2 + 2 d34 d41`` is false: with x4 = x1 it
    reduces to ``d13 <= d23``.
    """
    d12, d23, d34, d41, d13, d24 = _quad_dists(dist)
    return float(d12**2 + d34**2 + 2 * d23 * d41 - d13**2 - d24**2)


def cube_vertices(dim):
    """``{-1, 1}^dim`` in lexicographic order."""
    return list(itertools.product((-1, 1), repeat=dim))


def enflo_defect(dim: int, images, metric=None):
    """Diagonal and edge sums for a map from the cube ``{-1, 1}^dim``.

    Parameters
    ----------
    images : mapping or array_like
        Either a dict from vertex tuples to images, or a sequence indexed in
        the order of :func:`cube_vertices`.
    metric : array_like, optional
        If given, images are indices into this distance matrix. Otherwise
        they are points of R^k with the Euclidean distance.

    Returns
    -------
    (lhs, rhs) with ``lhs = sum_x d(f(x), f(-x))^2`` and
    ``rhs = sum_i sum_x d(f(x), f(x with coordinate i flipped))^2``.
    """
    if dim < 1:
        raise InputError("dim must be positive")
    verts = cube_vertices(dim)
    if isinstance(images, dict):
        missing = [v for v in verts if v not in images]
        if missing:
            raise MissingVertex(f"no image for vertex {missing[0]}")
        f = {v: images[v] for v in verts}
    else:
        seq = list(images)
        if len(seq) < len(verts):
            raise MissingVertex(f"need {len(verts)} images, got {len(seq)}")
        f = dict(zip(verts, seq))

    if metric is None:
        def d2(a, b):
            diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
            return float(diff @ diff)
    else:
        M = np.asarray(metric, dtype=float)

        def d2(a, b):
            return float(M[a, b] ** 2)

    lhs = sum(d2(f[v], f[tuple(-c for c in v)]) for v in verts)
    rhs = 0.0
    for i in range(dim):
        for v in verts:
            w = v[:i] + (-v[i],) + v[i + 1:]
            rhs += d2(f[v], f[w])
    return lhs, rhs


def aggregate_inequality(terms) -> QuadraticInequality:
    """Positive combination of inequalities with like terms collected.

    The net weight of each distance (both orientations folded onto i < j) is
    ``sum c_k (left_k - right_k)``; positive net weight goes to the new left
    side and negative net weight to the new right side.
    """
    terms = list(terms)
    if not terms:
        raise InputError("nothing to aggregate")
    n = terms[0][1].n
    net = np.zeros((n, n))
    for c, ineq in terms:
        if c <= 0:
            raise InputError("aggregation weights must be positive")
        if ineq.n != n:
            raise SizeMismatch("all inequalities must have the same size")
        net += c * (_fold(ineq.A) - _fold(ineq.B))
    return QuadraticInequality(
        np.where(net > 0, net, 0.0), np.where(net < 0, -net, 0.0), {"recipe": "aggregate", "terms": len(terms)}
    )


@dataclass(frozen=True)
class NoSquaresReport:
    report: DefectReport
    factor3_ok: bool | None

    def to_json(self):
        out = self.report.to_json()
        out["factor3_ok"] = self.factor3_ok
        return out


def no_squares_defect(ineq: QuadraticInequality, dist) -> NoSquaresReport:
    """Evaluate an inequality on first powers of the distances.

    For harmonic-recipe instances also check ``lhs <= 3 rhs + 1e-9``, which
    holds in every metric space.
    """
    D = _as_dist(dist, ineq.n)
    rep = DefectReport(float((ineq.A * D).sum()), float((ineq.B * D).sum()))
    f3 = None
    if ineq.provenance.get("harmonic"):
        f3 = rep.lhs <= 3.0 * rep.rhs + 1e-9
    return NoSquaresReport(rep, f3)


def alexandrov_midpoint_defects(dxy, dzw, dxz, dyz):
    """Curvature defects for a triangle x, y, z and a midpoint w of x, y.

    Returns ``(nonneg, nonpos)`` where ``nonneg = dxy^2 + 4 dzw^2 - 2 dxz^2 - 2 dyz^2``
    must be >= 0 under nonnegative curvature and ``nonpos = -nonneg`` must be
    >= 0 in a Hadamard space. The caller vouches that w is a midpoint.
    """
    nonneg = dxy**2 + 4 * dzw**2 - 2 * dxz**2 - 2 * dyz**2
    return float(nonneg), float(-nonneg)


def lebedeva_petrunin_defect(dist) -> float:
    """``d(x,w)^2 + d(y,w)^2 + d(z,w)^2 - (d(x,y)^2 + d(x,z)^2 + d(y,z)^2)/3`` for x, y, z, w."""
    D = _as_dist(dist, 4)
    return float(D[0, 3] ** 2 + D[1, 3] ** 2 + D[2, 3] ** 2 - (D[0, 1] ** 2 + D[0, 2] ** 2 + D[1, 2] ** 2) / 3.0)


def random_harmonic_data(n: int, rng, *, zero_frac=0.2):
    """Random ``(p, q, A, B)`` satisfying the harmonic constraint.

    Row sums of A are ``p_i + kappa`` and column sums of B are ``q_j - kappa``
    for a random shift kappa that keeps both nonnegative; some entries are
    zeroed to exercise the 0/0 convention.
    """
    p = rng.dirichlet(np.ones(n))
    q = rng.dirichlet(np.ones(n))
    kappa = rng.uniform(-p.min(), q.min())
    r = p + kappa
    c = q - kappa

    def shaped(line_sums):
        R = rng.random((n, n)) * (rng.random((n, n)) >= zero_frac)
        R[np.arange(n), rng.integers(n, size=n)] += 1e-3  # keep every row nonzero
        return R / R.sum(axis=1, keepdims=True) * line_sums[:, None]

    A = shaped(r)
    B = shaped(c).T
    return p, q, A, B


FAMILIES = {
    "roundness2": lambda **kw: roundness2_inequality(),
    "quadruple": lambda p1=1.0, p2=1.0, p3=1.0, p4=1.0, **kw: quadruple_inequality(p1, p2, p3, p4),
    "sturm": lambda s=0.5, t=0.5, **kw: sturm_quadruple_inequality(s, t),
}
