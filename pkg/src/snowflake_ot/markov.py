"""Stationary reversible Markov chains and the quantities built on them.

Every expectation here is an exact finite sum over matrix powers; nothing
is simulated.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import config
from .errors import (
    AlphaOutOfRange,
    AsymmetricPsi,
    DegenerateChain,
    EmptyCandidates,
    InputError,
    NotReversible,
    NotStationary,
    NotStochastic,
    SizeLimitExceeded,
    YOutOfRange,
)
from .transport import wasserstein

__all__ = [
    "ReversibleChain",
    "CThetaResult",
    "validate_chain",
    "random_reversible_chain",
    "markov_ratio",
    "two_point_identity_check",
    "phi_theta",
    "psi_theta",
    "phi_theta_inverse",
    "h_theta",
    "c_theta",
    "c_half_closed_form",
    "hypercube_displacement",
    "hypercube_moment",
    "snowflake_lower_bound",
    "sturm_transfer_check",
    "lss_defect",
    "theta_p",
    "moment_inequality",
]

PRINTED_C_HALF = "2.08"


@dataclass(frozen=True, eq=False)
class ReversibleChain:
    """Transition matrix ``P`` with reversible stationary law ``pi``."""

    P: np.ndarray
    pi: np.ndarray

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def power(self, t: int) -> np.ndarray:
        return np.linalg.matrix_power(self.P, t)

    def to_json(self) -> dict:
        return {"P": self.P.tolist(), "pi": self.pi.tolist()}


def validate_chain(P, pi, *, stoch_tol=1e-12, tol=1e-10) -> ReversibleChain:
    """Check stochasticity, stationarity and detailed balance.

    Raises
    ------
    NotStochastic
        Negative entries or a row sum off by more than ``stoch_tol``.
    NotStationary
        ``pi`` not a probability vector or ``pi P != pi`` beyond ``tol``.
    NotReversible
        First (i, j) in row-major order with ``|pi_i P_ij - pi_j P_ji| > tol``.
    """
    P = np.array(P, dtype=float)
    pi = np.array(pi, dtype=float).ravel()
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise InputError(f"transition matrix must be square and nonempty, got {P.shape}")
    if pi.shape[0] != P.shape[0]:
        raise InputError("stationary vector length does not match the chain")
    if not (np.all(np.isfinite(P)) and np.all(np.isfinite(pi))):
        raise InputError("chain entries must be finite")
    if np.any(P < 0):
        raise NotStochastic("negative transition probability")
    rows = P.sum(axis=1)
    bad = np.flatnonzero(np.abs(rows - 1.0) > stoch_tol)
    if bad.size:
        raise NotStochastic(f"row {bad[0]} sums to {rows[bad[0]]!r}")
    if np.any(pi < 0) or abs(pi.sum() - 1.0) > stoch_tol:
        raise NotStationary("pi is not a probability vector")
    if np.abs(pi @ P - pi).max() > tol:
        raise NotStationary("pi P differs from pi")
    flow = pi[:, None] * P
    bad = np.argwhere(np.abs(flow - flow.T) > tol)
    if bad.size:
        raise NotReversible(int(bad[0][0]), int(bad[0][1]))
    P.setflags(write=False)
    pi.setflags(write=False)
    return ReversibleChain(P, pi)


def random_reversible_chain(n: int, rng, *, sparsity=0.3) -> ReversibleChain:
    """Random walk on a random symmetric weighted graph (always reversible).

    Each off-diagonal weight is dropped with probability ``sparsity``, except
    along a random Hamiltonian path, which keeps the chain irreducible. The
    diagonal carries a random holding weight.
    """
    W = rng.random((n, n))
    W[rng.random((n, n)) < sparsity] = 0.0
    order = rng.permutation(n)
    W[order[:-1], order[1:]] = W[order[1:], order[:-1]] = rng.random(n - 1) + 1e-3
    W = np.triu(np.maximum(W, W.T), 1)
    W = W + W.T + np.diag(rng.random(n) + 1e-3)
    deg = W.sum(axis=1)
    P = W / deg[:, None]
    pi = deg / deg.sum()
    return validate_chain(P, pi)


def markov_ratio(chain: ReversibleChain, dist, p: float, m: int) -> float:
    """``E d(Z_m, Z_0)^p / (m E d(Z_1, Z_0)^p)`` for the stationary chain.

    ``dist[i, j]`` is the distance between the images of states i and j.
    """
    D = np.asarray(dist, dtype=float)
    if D.shape != chain.P.shape:
        raise InputError("distance matrix does not match the chain size")
    if m < 1:
        raise InputError("time m must be a positive integer")
    Dp = D**p
    num = float(chain.pi @ (chain.power(m) * Dp).sum(axis=1))
    den = float(chain.pi @ (chain.P * Dp).sum(axis=1))
    if den == 0.0:
        raise DegenerateChain("the chain never moves between distinct images")
    return num / (m * den)


def two_point_identity_check(chain: ReversibleChain, psi, t: int):
    """Both sides of ``E psi(Z_t, Z'_t) = E psi(Z_2t, Z_0)``.

    ``Z_t`` and ``Z'_t`` run independently for t steps from a common
    stationary start.
    """
    S = np.asarray(psi, dtype=float)
    if S.shape != chain.P.shape:
        raise InputError("psi does not match the chain size")
    if not np.array_equal(S, S.T):
        raise AsymmetricPsi("psi must be exactly symmetric")
    Pt = chain.power(t)
    lhs = float(np.einsum("i,ij,ik,jk->", chain.pi, Pt, Pt, S))
    rhs = float(np.einsum("j,jk,jk->", chain.pi, chain.power(2 * t), S))
    return lhs, rhs


def phi_theta(theta, s):
    return s**theta - (1.0 - s) ** theta


def psi_theta(theta, s):
    return (s + 1.0) ** theta - s**theta


def phi_theta_inverse(theta: float, y: float) -> float:
    """The s in [0, 1] with ``s^theta - (1 - s)^theta = y``.

    Bisection down to adjacent floating-point numbers; the better endpoint
    is returned. Near ``y = +-1`` the map is very steep for small theta,
    so the residual there is limited by float spacing in s.
    """
    if not (0 < theta <= 1):
        raise InputError("theta must lie in (0, 1]")
    if not (-1.0 <= y <= 1.0):
        raise YOutOfRange(f"y must lie in [-1, 1], got {y}")
    if y == 0:
        return 0.5
    if theta == 1:
        return (y + 1.0) / 2.0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if phi_theta(theta, mid) < y:
            lo = mid
        else:
            hi = mid
    return lo if abs(phi_theta(theta, lo) - y) <= abs(phi_theta(theta, hi) - y) else hi


def h_theta(theta: float, c: float) -> float:
    return c * psi_theta(theta, phi_theta_inverse(theta, (2.0**theta - 1.0) / c))


def c_half_closed_form() -> float:
    """``sqrt(1 + sqrt 2 + sqrt(4 sqrt 2 - 1))``, the printed closed form for c(1/2)."""
    r2 = math.sqrt(2.0)
    return math.sqrt(1.0 + r2 + math.sqrt(4.0 * r2 - 1.0))


@dataclass(frozen=True)
class CThetaResult:
    """Root of ``h_theta(c) = 1`` with diagnostics.

    For theta = 1/2 the root is compared with the printed closed form and
    with the printed decimal "2.08..."; neither comparison is asserted.
    """

    theta: float
    root: float
    residual: float
    bracket: tuple
    monotone: bool
    below_diagonal: bool
    closed_form_half: float | None = None

    @property
    def root_matches_printed(self):
        if self.closed_form_half is None:
            return None
        return f"{self.root:.10f}".startswith(PRINTED_C_HALF)

    @property
    def closed_form_matches_printed(self):
        if self.closed_form_half is None:
            return None
        return f"{self.closed_form_half:.10f}".startswith(PRINTED_C_HALF)

    @property
    def root_matches_closed_form(self):
        if self.closed_form_half is None:
            return None
        return abs(self.root - self.closed_form_half) <= 1e-9

    def to_json(self) -> dict:
        out = {
            "theta": self.theta,
            "root": self.root,
            "residual": self.residual,
            "bracket": list(self.bracket),
            "monotone": self.monotone,
            "below_diagonal": self.below_diagonal,
        }
        if self.closed_form_half is not None:
            out.update(
                closed_form_half=self.closed_form_half,
                printed_decimal=PRINTED_C_HALF + "...",
                root_matches_printed=self.root_matches_printed,
                closed_form_matches_printed=self.closed_form_matches_printed,
                root_matches_closed_form=self.root_matches_closed_form,
            )
        return out


def c_theta(theta: float, *, samples=100) -> CThetaResult:
    """Solve ``h_theta(c) = 1`` on ``[1, inf)`` by doubling and bisection.

    ``h_theta`` is increasing with ``h_theta(1) <= 1``, so doubling finds a
    bracket and bisection converges. ``monotone`` records whether h is
    strictly increasing on ``samples`` evenly spaced points of the bracket;
    ``below_diagonal`` whether ``h(c) < c`` there (expected for theta < 1).
    At theta = 1, h(c) = c and the root is 1.
    """
    if not (0 < theta <= 1):
        raise InputError("theta must lie in (0, 1]")
    closed = c_half_closed_form() if theta == 0.5 else None
    lo, hi = 1.0, 2.0
    if theta == 1:
        root, hi = 1.0, 2.0
    else:
        while h_theta(theta, hi) < 1.0:
            lo, hi = hi, 2.0 * hi
        a, b = lo, hi
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if h_theta(theta, mid) < 1.0:
                a = mid
            else:
                b = mid
        root = a if abs(h_theta(theta, a) - 1) <= abs(h_theta(theta, b) - 1) else b
        lo = 1.0
    grid = np.linspace(lo, hi, samples)
    hs = np.array([h_theta(theta, c) for c in grid])
    monotone = bool(np.all(np.diff(hs) > 0))
    below = bool(np.all(hs < grid)) if theta < 1 else bool(np.allclose(hs, grid, rtol=1e-12, atol=0))
    return CThetaResult(
        theta, root, abs(h_theta(theta, root) - 1.0), (lo, hi), monotone, below, closed
    )


def hypercube_displacement(dim: int, m: int) -> np.ndarray:
    """Law of the Hamming distance after m steps of the walk on {0,1}^dim.

    Each step flips one uniformly chosen coordinate, so the distance from
    the start performs the Ehrenfest chain ``h -> h + 1`` with probability
    ``(dim - h)/dim`` and ``h -> h - 1`` otherwise.
    """
    if dim < 1 or m < 0:
        raise InputError("need dim >= 1 and m >= 0")
    if dim + 1 > config.max_support():
        raise SizeLimitExceeded(f"dim {dim} exceeds the cap")
    h = np.arange(dim + 1)
    up = (dim - h) / dim
    down = h / dim
    dist = np.zeros(dim + 1)
    dist[0] = 1.0
    for _ in range(m):
        new = np.zeros_like(dist)
        new[1:] += dist[:-1] * up[:-1]
        new[:-1] += dist[1:] * down[1:]
        dist = new
    return dist


def hypercube_moment(dim: int, m: int, q: float) -> float:
    """``E[H_m^q]`` for the Hamming displacement H_m, any real q > 0."""
    dist = hypercube_displacement(dim, m)
    return float(dist @ np.arange(dim + 1, dtype=float) ** q)


def snowflake_lower_bound(K_target: float, p: float, theta: float, m: int, alpha: float) -> float:
    """Smallest distortion compatible with a Markov type bound on the target.

    If the target has ``M_p(Y; m) <= K m^(theta (p - 1)/p)``, any embedding of
    the alpha-snowflake of the 4m-cube into Y has distortion at least

        (E[H_m^(alpha p)] / (K^p m^(1 + theta (p - 1)))) ** (1/p),

    with H_m the exact Hamming displacement after m steps.
    """
    if K_target <= 0 or p < 1 or m < 1:
        raise InputError("need K_target > 0, p >= 1, m >= 1")
    if not (0 <= theta <= 1):
        raise InputError("theta must lie in [0, 1]")
    lo = (1.0 + theta * (p - 1.0)) / p
    if not (lo <= alpha <= 1.0):
        raise AlphaOutOfRange(f"alpha must lie in [{lo}, 1], got {alpha}")
    moment = hypercube_moment(4 * m, m, alpha * p)
    return (moment / (K_target**p * m ** (1.0 + theta * (p - 1.0)))) ** (1.0 / p)


def sturm_transfer_check(measures, q, mu, p: float, theta: float):
    """Both sides of the variance inequality lifted to W_p.

    ``lhs = sum q_i q_j W_p(mu_i, mu_j)^p`` and
    ``rhs = 2^(theta p) sum q_i W_p(mu_i, mu)^p``, each W_p computed exactly.
    """
    q = np.asarray(q, dtype=float)
    if len(measures) != q.shape[0] or len(measures) == 0:
        raise InputError("one weight per measure required")
    if np.any(q < 0) or abs(q.sum() - 1.0) > 1e-12:
        raise InputError("q must be a probability vector")
    k = len(measures)
    lhs = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            lhs += 2.0 * q[i] * q[j] * wasserstein(measures[i], measures[j], p)[0] ** p
    rhs = 2.0 ** (theta * p) * sum(q[i] * wasserstein(measures[i], mu, p)[0] ** p for i in range(k))
    return lhs, rhs


def lss_defect(dist, weights, candidate_indices) -> float:
    """``min_x 2 E d(Z, x)^2 - E d(Z, Z')^2`` over the candidate points x.

    A nonnegative value is necessary for the inequality, not sufficient,
    since the infimum is only taken over the candidates.
    """
    D = np.asarray(dist, dtype=float)
    w = np.asarray(weights, dtype=float)
    cand = list(candidate_indices)
    if not cand:
        raise EmptyCandidates("no candidate points")
    if abs(w.sum() - 1.0) > 1e-12 or np.any(w < 0):
        raise InputError("weights must be a probability vector")
    if D.shape != (w.shape[0], w.shape[0]):
        raise InputError("distance matrix does not match the weights")
    D2 = D**2
    spread = float(w @ D2 @ w)
    best = min(2.0 * float(w @ D2[:, x]) for x in cand)
    return best - spread


def theta_p(p: float) -> float:
    """``max(1/p, 1 - 1/p)``."""
    return max(1.0 / p, 1.0 - 1.0 / p)


def moment_inequality(values, weights, a: float, p: float):
    """Both sides of ``E|Z - Z'|^p <= 2^(theta_p p) E|Z - a|^p`` on the line."""
    z = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    lhs = float(w @ np.abs(z[:, None] - z[None, :]) ** p @ w)
    rhs = 2.0 ** (theta_p(p) * p) * float(w @ np.abs(z - a) ** p)
    return lhs, rhs
