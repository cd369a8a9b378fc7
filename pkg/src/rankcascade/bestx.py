"""The Best-x approximation for random attention spans and its audits.

Best-x evaluates the per-span optima sigma^x, picks the x maximizing the
revenue lower bound R(sigma^x, x) * G_x, and optionally fills the remaining
slots greedily.  On IFR span distributions the chosen ranking is guaranteed
at least 1/e of the clairvoyant upper bound; ``ratio_audit`` certifies that
empirically over an instance corpus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import backend
from .errors import InvalidInputError
from .fixed_span import FixedSpanSolution, assort_opt
from .instances import (
    Catalog,
    Ranking,
    SpanDistribution,
    revenue_random_span_arrays,
)

ONE_OVER_E = 1.0 / math.e


def _per_span_values(sol: FixedSpanSolution, M: int) -> np.ndarray:
    """R(sigma^x, x) for x = 1..M, repeating the full-catalog value once products run out."""
    vals = sol.values
    if M <= vals.shape[0]:
        return vals[:M]
    return np.concatenate([vals, np.full(M - vals.shape[0], vals[-1])])


def clairvoyant_bound(
    catalog: Catalog, dist: SpanDistribution, solution: Optional[FixedSpanSolution] = None
) -> float:
    """Expected revenue of a retailer who observes each realized span.

    Equals sum_x g_x R(sigma^x, x); upper-bounds every fixed ranking.
    """
    sol = solution if solution is not None else assort_opt(catalog, min(dist.capacity, len(catalog)))
    vals = _per_span_values(sol, dist.capacity)
    return float(np.dot(dist.mass_array(), vals))


@dataclass(frozen=True)
class BestXResult:
    chosen_x: int
    ranking: Ranking
    lower_bound: float
    expected_revenue: float
    clairvoyant: float
    ratio: float


def best_x(
    catalog: Catalog,
    dist: SpanDistribution,
    fill: bool = False,
    solution: Optional[FixedSpanSolution] = None,
) -> BestXResult:
    """Run Best-x; with ``fill`` the ranking is greedily extended to capacity.

    Ties in the argmax over x go to the smallest x.  ``expected_revenue`` is
    the exact value of the returned ranking under ``dist``, which is what the
    audits measure (not just the lower bound).
    """
    n = len(catalog)
    sol = solution if solution is not None else assort_opt(catalog, min(dist.capacity, n))
    spans = min(dist.capacity, n)
    G = dist.tail_array()
    scores = sol.values[:spans] * G[:spans]
    chosen_x = int(np.argmax(scores >= scores.max() - backend.TIE_TOL)) + 1
    lower_bound = float(scores[chosen_x - 1])
    idx = sol.ranking_indices_at(chosen_x)
    if fill:
        idx = _greedy_fill_indices(idx, catalog, G, min(dist.capacity, n))
    expected = revenue_random_span_arrays(catalog.lambdas[idx], catalog.prices[idx], G)
    clair = clairvoyant_bound(catalog, dist, solution=sol)
    return BestXResult(
        chosen_x=chosen_x,
        ranking=catalog.ids_for(idx),
        lower_bound=lower_bound,
        expected_revenue=expected,
        clairvoyant=clair,
        ratio=expected / clair,
    )


def _greedy_fill_indices(
    idx: np.ndarray, catalog: Catalog, G: np.ndarray, target_len: int
) -> np.ndarray:
    """Insert the best (product, position) pair until the ranking has target_len items."""
    lam = catalog.lambdas
    lr = catalog.lambdas * catalog.prices
    current = list(int(i) for i in idx)
    pool = np.setdiff1d(np.arange(len(catalog), dtype=np.int64), idx)
    while len(current) < target_len and pool.shape[0]:
        cur = np.asarray(current, dtype=np.int64)
        _, ci, pos = backend.best_insertion(
            lam[cur], lr[cur], G, lam[pool], lr[pool], backend.TIE_TOL
        )
        current.insert(pos, int(pool[ci]))
        pool = np.delete(pool, ci)
    return np.asarray(current, dtype=np.int64)


def greedy_fill(
    partial: Sequence, catalog: Catalog, dist: SpanDistribution, M: Optional[int] = None
) -> Ranking:
    """Fill a partial ranking up to M slots without reordering what is there.

    Each step inserts the (product, position) pair with the largest exact
    expected revenue; ties break toward the smallest product index, then the
    earliest position.  The result never earns less than the input.
    """
    target = dist.capacity if M is None else int(M)
    if target > dist.capacity:
        raise InvalidInputError(
            f"cannot fill to {target} slots: span distribution caps the display at {dist.capacity}"
        )
    idx = catalog.ranking_indices(partial)
    if idx.shape[0] > target:
        raise InvalidInputError(f"partial ranking longer than the {target} available slots")
    target = min(target, len(catalog))
    filled = _greedy_fill_indices(idx, catalog, dist.tail_array(), target)
    return catalog.ids_for(filled)


@dataclass(frozen=True)
class AuditRow:
    instance_id: str
    chosen_x: int
    ratio_bestx: float
    ratio_filled: float
    clairvoyant: float


@dataclass(frozen=True)
class AuditReport:
    rows: Tuple[AuditRow, ...]
    histogram_edges: Tuple[float, ...]
    histogram_bestx: Tuple[int, ...] = field(repr=False)
    histogram_filled: Tuple[int, ...] = field(repr=False)

    @property
    def min_ratio_bestx(self) -> float:
        return min(r.ratio_bestx for r in self.rows)

    @property
    def min_ratio_filled(self) -> float:
        return min(r.ratio_filled for r in self.rows)

    @property
    def mean_ratio_bestx(self) -> float:
        return float(np.mean([r.ratio_bestx for r in self.rows]))

    @property
    def mean_ratio_filled(self) -> float:
        return float(np.mean([r.ratio_filled for r in self.rows]))

    @property
    def violations(self) -> Tuple[AuditRow, ...]:
        """Instances whose unfilled Best-x ratio falls below the 1/e guarantee."""
        return tuple(r for r in self.rows if r.ratio_bestx < ONE_OVER_E)

    def summary(self) -> Dict[str, float]:
        return {
            "instances": float(len(self.rows)),
            "min_ratio_bestx": self.min_ratio_bestx,
            "mean_ratio_bestx": self.mean_ratio_bestx,
            "min_ratio_filled": self.min_ratio_filled,
            "mean_ratio_filled": self.mean_ratio_filled,
            "violations": float(len(self.violations)),
        }


def ratio_audit(
    instances: Iterable[Tuple[str, Catalog, SpanDistribution]],
    histogram_edges: Optional[Sequence[float]] = None,
) -> AuditReport:
    """Audit Best-x (and Best-x + fill) against the clairvoyant on a corpus.

    Every instance must carry an IFR span distribution, otherwise the 1/e
    guarantee does not apply and the instance is rejected with a diagnostic.
    """
    edges = np.asarray(
        histogram_edges if histogram_edges is not None else np.linspace(0.0, 1.0, 21),
        dtype=np.float64,
    )
    rows: List[AuditRow] = []
    for instance_id, catalog, dist in instances:
        if not dist.is_ifr:
            bad = [
                x + 1
                for x in range(1, dist.capacity - 1)
                if dist.tail[x + 1] * dist.tail[x - 1] > dist.tail[x] ** 2 + 1e-9
            ]
            raise InvalidInputError(
                f"instance {instance_id!r}: span distribution is not IFR "
                f"(G_(x+1) G_(x-1) > G_x^2 at x in {bad})"
            )
        sol = assort_opt(catalog, min(dist.capacity, len(catalog)))
        plain = best_x(catalog, dist, solution=sol)
        filled = best_x(catalog, dist, fill=True, solution=sol)
        rows.append(
            AuditRow(
                instance_id=str(instance_id),
                chosen_x=plain.chosen_x,
                ratio_bestx=plain.ratio,
                ratio_filled=filled.ratio,
                clairvoyant=plain.clairvoyant,
            )
        )
    if not rows:
        raise InvalidInputError("ratio audit needs at least one instance")
    hist_plain, _ = np.histogram([r.ratio_bestx for r in rows], bins=edges)
    hist_filled, _ = np.histogram([r.ratio_filled for r in rows], bins=edges)
    return AuditReport(
        rows=tuple(rows),
        histogram_edges=tuple(float(e) for e in edges),
        histogram_bestx=tuple(int(c) for c in hist_plain),
        histogram_filled=tuple(int(c) for c in hist_filled),
    )
