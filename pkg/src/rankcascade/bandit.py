"""Online learning of personalized rankings with censored span feedback.

Purchase probabilities are linear in the vectorized outer product of product
and customer features.  Each round the learner forms optimistic estimates
(largest plausible purchase probabilities, smallest plausible failure rates),
plugs them into Best-x, fills the slate to exactly M products and updates a
ridge estimator plus per-position failure-rate counters from the censored
observation.  Filling to M keeps the feedback unambiguous: a no-purchase exit
at position k < M can only mean the attention span was exhausted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import backend
from .errors import InvalidInputError


def vectorize_features(s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Flatten the outer product s y^T row-major (s-major, then y).

    With unit-norm inputs the result has unit norm, and x . vec(Theta)
    reproduces s^T Theta y for Theta reshaped (d_p, d_c) row-major.
    """
    s = np.asarray(s, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if s.ndim != 1 or y.ndim != 1 or not s.size or not y.size:
        raise InvalidInputError("feature vectors must be nonempty 1-d arrays")
    return np.outer(s, y).ravel()


def vectorize_all(S: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row j is vectorize_features(S[j], y); shape (n, d_p * d_c)."""
    S = np.asarray(S, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if S.ndim != 2 or y.ndim != 1:
        raise InvalidInputError("expected a (n, d_p) feature matrix and a (d_c,) vector")
    return (S[:, :, None] * y[None, None, :]).reshape(S.shape[0], S.shape[1] * y.shape[0])


@dataclass(frozen=True)
class Observation:
    """Censored encoding of a customer outcome (purchase flag, exit position)."""

    psi: int
    upsilon: int
    M: int
    Y: np.ndarray
    Z: np.ndarray
    OY: np.ndarray
    OZ: np.ndarray


def encode_observation(psi: int, upsilon: int, M: int) -> Observation:
    """Encode (Psi, Upsilon) into indicator arrays and observability masks.

    No purchase: Y marks the exit position, both masks cover positions up to
    it.  Purchase: Z marks the bought position, its mask covers up to it, and
    the span mask stops one short since whether the customer would have kept
    viewing is censored.
    """
    if psi not in (0, 1):
        raise InvalidInputError(f"psi must be 0 or 1, got {psi!r}")
    if not 1 <= upsilon <= M:
        raise InvalidInputError(f"upsilon must lie in 1..{M}, got {upsilon}")
    k = np.arange(1, M + 1)
    Y = np.zeros(M, dtype=np.int8)
    Z = np.zeros(M, dtype=np.int8)
    if psi == 0:
        Y[upsilon - 1] = 1
        OY = (k <= upsilon).astype(np.int8)
        OZ = OY.copy()
    else:
        Z[upsilon - 1] = 1
        OY = (k <= upsilon - 1).astype(np.int8)
        OZ = (k <= upsilon).astype(np.int8)
    return Observation(psi=psi, upsilon=upsilon, M=M, Y=Y, Z=Z, OY=OY, OZ=OZ)


@dataclass(frozen=True)
class EstimatorState:
    """Ridge statistics and censored failure-rate counters after t rounds."""

    V: np.ndarray
    B: np.ndarray
    N: np.ndarray
    y_sum: np.ndarray
    t: int
    gamma: float

    @property
    def d(self) -> int:
        return int(self.B.shape[0])

    @property
    def M(self) -> int:
        return int(self.N.shape[0])

    @property
    def theta_hat(self) -> np.ndarray:
        return np.linalg.solve(self.V, self.B)

    @property
    def h_hat(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            out = np.where(self.N > 0, self.y_sum / np.maximum(self.N, 1), 0.0)
        return out


def init_estimator_state(d: int, M: int, gamma: float) -> EstimatorState:
    if gamma < 1.0:
        raise InvalidInputError(f"ridge weight gamma must be at least 1, got {gamma!r}")
    return EstimatorState(
        V=np.eye(d) * gamma,
        B=np.zeros(d),
        N=np.zeros(M, dtype=np.int64),
        y_sum=np.zeros(M),
        t=0,
        gamma=float(gamma),
    )


def update_estimators(
    state: EstimatorState, x_displayed: np.ndarray, obs: Observation
) -> EstimatorState:
    """Absorb one round: ridge update on observed purchase indicators, counter
    update on observed span indicators.  ``x_displayed[k]`` is the vectorized
    feature of the product shown at position k+1."""
    x_displayed = np.asarray(x_displayed, dtype=np.float64)
    if x_displayed.shape != (obs.M, state.d):
        raise InvalidInputError(
            f"expected displayed features of shape {(obs.M, state.d)}, got {x_displayed.shape}"
        )
    wz = obs.OZ.astype(np.float64)
    Xw = x_displayed * wz[:, None]
    V = state.V + Xw.T @ x_displayed
    B = state.B + x_displayed.T @ (wz * obs.Z)
    N = state.N + obs.OY
    y_sum = state.y_sum + obs.OY * obs.Y
    return EstimatorState(V=V, B=B, N=N, y_sum=y_sum, t=state.t + 1, gamma=state.gamma)


def confidence_radius(t: int, M: int, d: int, gamma: float, D: float) -> float:
    """Ellipsoid radius rho_t for the ridge estimate after t rounds.

    rho_t = 0.5 * sqrt(d ln(1 + tM/(gamma d)) + 4 ln(t+1)) + D sqrt(gamma),
    nondecreasing in t with rho_0 = D sqrt(gamma).
    """
    if t < 0:
        raise InvalidInputError(f"round count must be nonnegative, got {t}")
    if gamma < 1.0:
        raise InvalidInputError(f"gamma must be at least 1, got {gamma!r}")
    return 0.5 * math.sqrt(
        d * math.log(1.0 + t * M / (gamma * d)) + 4.0 * math.log(t + 1.0)
    ) + D * math.sqrt(gamma)


def optimistic_failure_rates(state: EstimatorState) -> np.ndarray:
    """Lower confidence bounds h^L for the failure rates at the next round.

    Uses radius sqrt(ln(t+1)/N_k) with t the upcoming round index; positions
    never yet observed get h^L = 0, the most optimistic value.
    """
    t_next = state.t + 1
    rad = np.sqrt(math.log(t_next + 1.0) / np.maximum(state.N, 1))
    hL = np.clip(state.h_hat - rad, 0.0, 1.0)
    hL[state.N == 0] = 0.0
    return hL


def optimistic_estimates(
    state: EstimatorState, X: np.ndarray, rho: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Optimistic purchase probabilities u and span tail bounds G^U.

    u_j projects x_j . theta_hat + rho * ||x_j||_{V^-1} into [0, 1];
    G^U_x = prod_{s<x} (1 - h^L_s) is nonincreasing in x with G^U_1 = 1.
    """
    X = np.asarray(X, dtype=np.float64)
    sol = np.linalg.solve(state.V, X.T)
    norms = np.sqrt(np.maximum(np.einsum("nd,dn->n", X, sol), 0.0))
    u = np.clip(X @ state.theta_hat + rho * norms, 0.0, 1.0)
    hL = optimistic_failure_rates(state)
    G_upper = np.empty(state.M, dtype=np.float64)
    G_upper[0] = 1.0
    if state.M > 1:
        np.cumprod(1.0 - hL[: state.M - 1], out=G_upper[1:])
    return u, G_upper


@dataclass(frozen=True)
class StepDetails:
    rho: float
    u: np.ndarray
    G_upper: np.ndarray
    hL: np.ndarray
    chosen_x: int


def rank_ucb_step(
    state: EstimatorState,
    prices: np.ndarray,
    X: np.ndarray,
    M: int,
    D: float,
    with_details: bool = False,
):
    """Choose the slate for the next customer under optimistic estimates.

    Builds a synthetic catalog with lambda := u, runs Best-x against G^U and
    greedy-fills to exactly M positions.  Deterministic given the state and
    features; the state itself is not modified.  Products are ordered by
    descending price, breaking ties by descending u then by position in the
    input arrays.
    """
    prices = np.asarray(prices, dtype=np.float64)
    n = prices.shape[0]
    if not 1 <= M <= n:
        raise InvalidInputError(f"slate size must lie in 1..{n}, got {M}")
    rho = confidence_radius(state.t, M, state.d, state.gamma, D)
    u, G_upper = optimistic_estimates(state, X, rho)
    order = np.lexsort((np.arange(n), -u, -prices))
    ranking_order_space, chosen_x = _best_x_fill_arrays(
        u[order], prices[order], G_upper, M
    )
    ranking = order[ranking_order_space]
    if with_details:
        return ranking, StepDetails(rho=rho, u=u, G_upper=G_upper,
                                    hL=optimistic_failure_rates(state), chosen_x=chosen_x)
    return ranking


def _best_x_fill_arrays(
    lam: np.ndarray, prices: np.ndarray, G: np.ndarray, M: int
) -> Tuple[np.ndarray, int]:
    """Best-x over pre-sorted (lambda, price) arrays, greedy-filled to M slots.

    Returns positions into the sorted arrays (display order) and the chosen x.
    Shared by the learner (u, G^U) and the informed benchmark (true lambda, G).
    """
    values, added = backend.assortopt_steps(lam, prices, int(M), backend.TIE_TOL)
    scores = values * G[:M]
    chosen_x = int(np.argmax(scores >= scores.max() - backend.TIE_TOL)) + 1
    current = [int(i) for i in np.sort(added[:chosen_x])]
    pool = np.setdiff1d(np.arange(lam.shape[0], dtype=np.int64), current)
    lr = lam * prices
    while len(current) < M and pool.shape[0]:
        cur = np.asarray(current, dtype=np.int64)
        _, ci, pos = backend.best_insertion(
            lam[cur], lr[cur], G, lam[pool], lr[pool], backend.TIE_TOL
        )
        current.insert(pos, int(pool[ci]))
        pool = np.delete(pool, ci)
    return np.asarray(current, dtype=np.int64), chosen_x
