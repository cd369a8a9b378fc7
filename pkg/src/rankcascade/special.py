"""Polynomial-time exact solvers for two special cases.

Prefix catalogs: when the k-th largest lambda*r products appear in strictly
increasing catalog-index order, the span-M optimum solves the random-span
problem outright (serve its length-x prefix to a span-x customer).

Geometric spans: with G_k = alpha^(k-1) the random-span objective regains the
recursive structure of the fixed-span problem, so a dynamic program over the
products sorted by r*lambda / (1 - alpha*(1 - lambda)) is exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import backend
from .errors import InvalidInputError, TiedScoreError
from .instances import Catalog, Ranking


def prefix_condition(catalog: Catalog, M: int) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Check whether per-span optima are prefixes of one another up to span M.

    Returns (holds, witness); the witness is the first adjacent pair of
    1-based catalog indices (i_k, i_{k+1}) that fails to increase.  Ties in
    lambda*r among the top M are indeterminate and rejected, since the
    characterization assumes strict score order.
    """
    n = len(catalog)
    if not 1 <= M <= n:
        raise InvalidInputError(f"M must lie in 1..{n}, got {M}")
    scores = catalog.lambdas * catalog.prices
    order = np.lexsort((np.arange(n), -scores))
    ranked = scores[order]
    for k in range(min(M, n - 1)):
        if abs(ranked[k] - ranked[k + 1]) <= backend.TIE_TOL:
            a, b = catalog.ids[order[k]], catalog.ids[order[k + 1]]
            raise TiedScoreError(
                f"products {a!r} and {b!r} tie in lambda*r; prefix condition is indeterminate"
            )
    top = order[:M] + 1  # 1-based catalog indices i_1..i_M
    for k in range(M - 1):
        if top[k] >= top[k + 1]:
            return False, (int(top[k]), int(top[k + 1]))
    return True, None


@dataclass(frozen=True)
class GeometricSolution:
    value: float
    ranking: Ranking
    tied_scores: bool


def geometric_rank(catalog: Catalog, alpha: float, M: int) -> GeometricSolution:
    """Exact optimal ranking for geometrically distributed spans G_k = alpha^(k-1).

    Products are re-sorted internally by descending r*lambda/(1-alpha*(1-lambda));
    score ties are broken by catalog index (deterministic) and flagged, since
    the ordering result assumes strict inequality.  For alpha = 0 only the top
    slot earns revenue; the remaining slots are filled in score order.
    """
    if not 0.0 <= alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in [0, 1), got {alpha!r}")
    n = len(catalog)
    if M < 1:
        raise InvalidInputError(f"capacity must be at least 1, got {M}")
    if M > n:
        warnings.warn(f"capacity M={M} exceeds the {n} products; clamping to {n}", stacklevel=2)
        M = n
    lam = catalog.lambdas
    lr = lam * catalog.prices
    scores = lr / (1.0 - alpha * (1.0 - lam))
    order = np.lexsort((np.arange(n), -scores))
    ranked_scores = scores[order]
    tied = bool(np.any(np.abs(np.diff(ranked_scores)) <= backend.TIE_TOL))
    a = lr[order]
    b = alpha * (1.0 - lam[order])
    H, take = backend.dp_tableau(a, b, int(M), backend.TIE_TOL)
    picked = backend.dp_extract(take, int(M))
    idx = order[picked]
    return GeometricSolution(
        value=float(H[M, 0]),
        ranking=catalog.ids_for(idx),
        tied_scores=tied,
    )
