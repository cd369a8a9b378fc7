"""Multiple purchases: purchasing and leaving decouple via a continuation probability.

After viewing a product the customer buys it with probability lambda and,
independently of that, keeps browsing with probability c (the base model is
the special case c = 1 - lambda).  Products are ordered by descending
r*lambda/(1-c), the score that generalizes the price order, and the fixed-span
optimum comes from the same backward dynamic program with continuation
weights c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Sequence, Tuple

import numpy as np

from . import backend
from .errors import InvalidInputError, TiedScoreError
from .instances import Ranking, SpanDistribution


@dataclass(frozen=True)
class GeneralProduct:
    """Product with decoupled purchase (lambda) and continuation (c) probabilities."""

    id: Hashable
    price: float
    purchase_prob: float
    cont_prob: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.price) and self.price > 0.0):
            raise InvalidInputError(f"product {self.id!r}: price must be positive")
        if not (math.isfinite(self.purchase_prob) and 0.0 < self.purchase_prob <= 1.0):
            raise InvalidInputError(f"product {self.id!r}: purchase_prob must lie in (0, 1]")
        if not (math.isfinite(self.cont_prob) and 0.0 <= self.cont_prob < 1.0):
            raise InvalidInputError(
                f"product {self.id!r}: cont_prob must lie in [0, 1) so r*lambda/(1-c) is finite"
            )

    @property
    def score(self) -> float:
        return self.price * self.purchase_prob / (1.0 - self.cont_prob)


class GeneralCatalog:
    """Products in strictly descending r*lambda/(1-c) order; score ties are rejected."""

    def __init__(self, products: Iterable[GeneralProduct]):
        items = sorted(products, key=lambda p: -p.score)
        if not items:
            raise InvalidInputError("catalog needs at least one product")
        for prev, cur in zip(items, items[1:]):
            if abs(prev.score - cur.score) <= backend.TIE_TOL:
                raise TiedScoreError(
                    f"products {prev.id!r} and {cur.id!r} tie in r*lambda/(1-c); "
                    "the canonical order assumes strict scores"
                )
        self.products: Tuple[GeneralProduct, ...] = tuple(items)
        self.ids: Tuple[Hashable, ...] = tuple(p.id for p in items)
        self.prices = np.array([p.price for p in items], dtype=np.float64)
        self.lambdas = np.array([p.purchase_prob for p in items], dtype=np.float64)
        self.conts = np.array([p.cont_prob for p in items], dtype=np.float64)
        self._index = {p.id: i for i, p in enumerate(items)}
        if len(self._index) != len(items):
            raise InvalidInputError("duplicate product ids in catalog")

    def __len__(self) -> int:
        return len(self.products)

    def __iter__(self) -> Iterator[GeneralProduct]:
        return iter(self.products)

    def index_of(self, product_id: Hashable) -> int:
        try:
            return self._index[product_id]
        except KeyError:
            raise InvalidInputError(f"unknown product id {product_id!r}") from None

    def ranking_indices(self, ranking: Sequence[Hashable]) -> np.ndarray:
        idx = np.array([self.index_of(pid) for pid in ranking], dtype=np.int64)
        if len(set(idx.tolist())) != len(idx):
            raise InvalidInputError("ranking contains duplicate products")
        return idx

    def ids_for(self, indices: Sequence[int]) -> Ranking:
        return tuple(self.ids[int(i)] for i in indices)


def order_general(products: Iterable[GeneralProduct]) -> GeneralCatalog:
    """Arrange general products in the canonical descending-score order."""
    return GeneralCatalog(products)


def revenue_general_arrays(
    lambdas: np.ndarray, conts: np.ndarray, prices: np.ndarray, x: int
) -> float:
    m = min(int(x), lambdas.shape[0])
    if m == 0:
        return 0.0
    P = np.empty(m, dtype=np.float64)
    P[0] = 1.0
    if m > 1:
        np.cumprod(conts[: m - 1], out=P[1:])
    return float(np.dot(P, lambdas[:m] * prices[:m]))


def revenue_general(ranking: Sequence[Hashable], x: int, catalog: GeneralCatalog) -> float:
    """Expected revenue from a span-x customer who may purchase repeatedly."""
    if x < 1:
        raise InvalidInputError(f"span must be at least 1, got {x}")
    idx = catalog.ranking_indices(ranking)
    return revenue_general_arrays(catalog.lambdas[idx], catalog.conts[idx], catalog.prices[idx], x)


def revenue_general_random(
    ranking: Sequence[Hashable], dist: SpanDistribution, catalog: GeneralCatalog
) -> float:
    """Random-span wrapper: sum_x g_x * R(sigma, x) in the multi-purchase model."""
    idx = catalog.ranking_indices(ranking)
    m = idx.shape[0]
    if m > dist.capacity:
        raise InvalidInputError(
            f"ranking length {m} exceeds the display capacity {dist.capacity}"
        )
    if m == 0:
        return 0.0
    conts = catalog.conts[idx]
    P = np.empty(m, dtype=np.float64)
    P[0] = 1.0
    if m > 1:
        np.cumprod(conts[: m - 1], out=P[1:])
    G = dist.tail_array()[:m]
    return float(np.dot(P * G, catalog.lambdas[idx] * catalog.prices[idx]))


def general_span_values(catalog: GeneralCatalog, spans: int) -> Tuple[np.ndarray, list]:
    """Optimal values and rankings for every fixed span 1..spans (one DP pass)."""
    n = len(catalog)
    if not 1 <= spans <= n:
        raise InvalidInputError(f"span must lie in 1..{n}, got {spans}")
    a = catalog.lambdas * catalog.prices
    H, take = backend.dp_tableau(a, catalog.conts, int(spans), backend.TIE_TOL)
    values = H[1:, 0].copy()
    rankings = [backend.dp_extract(take, k) for k in range(1, spans + 1)]
    return values, rankings


def solve_general_fixed_span(catalog: GeneralCatalog, x: int) -> Tuple[float, Ranking]:
    """Optimal value and ranking for a fixed span in the multi-purchase model."""
    n = len(catalog)
    if not 1 <= x <= n:
        raise InvalidInputError(f"span must lie in 1..{n}, got {x}")
    a = catalog.lambdas * catalog.prices
    H, take = backend.dp_tableau(a, catalog.conts, int(x), backend.TIE_TOL)
    idx = backend.dp_extract(take, int(x))
    return float(H[x, 0]), catalog.ids_for(idx)


@dataclass(frozen=True)
class GeneralBestX:
    """Best-x selection applied to the multi-purchase model.

    Offered experimentally: the structural guarantees (nesting, decreasing
    margins) carry over, but no approximation-ratio bound is claimed here.
    """

    chosen_x: int
    ranking: Ranking
    lower_bound: float
    expected_revenue: float
    clairvoyant: float
    ratio: float


def best_x_general(catalog: GeneralCatalog, dist: SpanDistribution) -> GeneralBestX:
    spans = min(dist.capacity, len(catalog))
    values, rankings = general_span_values(catalog, spans)
    G = dist.tail_array()
    scores = values * G[:spans]
    chosen_x = int(np.argmax(scores >= scores.max() - backend.TIE_TOL)) + 1
    idx = rankings[chosen_x - 1]
    ranking = catalog.ids_for(idx)
    expected = revenue_general_random(ranking, dist, catalog)
    ext = np.concatenate([values, np.full(dist.capacity - spans, values[-1])])
    clair = float(np.dot(dist.mass_array(), ext))
    return GeneralBestX(
        chosen_x=chosen_x,
        ranking=ranking,
        lower_bound=float(scores[chosen_x - 1]),
        expected_revenue=expected,
        clairvoyant=clair,
        ratio=expected / clair,
    )
