"""Catalogs, span distributions, rankings and exact revenue evaluation.

Products are indexed canonically by descending price, breaking price ties by
descending conditional purchase probability.  Every solver in the package
relies on that order, so :class:`Catalog` establishes it at construction and
keeps the original ids so callers can map results back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError

ProductId = Hashable
Ranking = Tuple[ProductId, ...]

#: Absolute tolerance for float comparisons on revenues and tail probabilities.
FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class Product:
    """A sellable item: positive price and conditional purchase probability in (0, 1]."""

    id: ProductId
    price: float
    purchase_prob: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.price) and self.price > 0.0):
            raise InvalidInputError(f"product {self.id!r}: price must be positive, got {self.price!r}")
        if not (math.isfinite(self.purchase_prob) and 0.0 < self.purchase_prob <= 1.0):
            raise InvalidInputError(
                f"product {self.id!r}: purchase_prob must lie in (0, 1], got {self.purchase_prob!r}"
            )


class Catalog:
    """Products in canonical order (price desc, then purchase_prob desc).

    Duplicate (price, purchase_prob) pairs are rejected; perturb or dedupe
    before construction.
    """

    def __init__(self, products: Iterable[Product]):
        items = list(products)
        if not items:
            raise InvalidInputError("catalog needs at least one product")
        items.sort(key=lambda p: (-p.price, -p.purchase_prob))
        for prev, cur in zip(items, items[1:]):
            if prev.price == cur.price and prev.purchase_prob == cur.purchase_prob:
                raise InvalidInputError(
                    f"products {prev.id!r} and {cur.id!r} share price and purchase probability"
                )
        self.products: Tuple[Product, ...] = tuple(items)
        self.ids: Tuple[ProductId, ...] = tuple(p.id for p in items)
        self.prices: np.ndarray = np.array([p.price for p in items], dtype=np.float64)
        self.lambdas: np.ndarray = np.array([p.purchase_prob for p in items], dtype=np.float64)
        self._index = {p.id: i for i, p in enumerate(items)}
        if len(self._index) != len(items):
            raise InvalidInputError("duplicate product ids in catalog")

    def __len__(self) -> int:
        return len(self.products)

    def __iter__(self) -> Iterator[Product]:
        return iter(self.products)

    def __getitem__(self, i: int) -> Product:
        return self.products[i]

    def index_of(self, product_id: ProductId) -> int:
        """0-based canonical index of a product id."""
        try:
            return self._index[product_id]
        except KeyError:
            raise InvalidInputError(f"unknown product id {product_id!r}") from None

    def ranking_indices(self, ranking: Sequence[ProductId]) -> np.ndarray:
        """Validate a ranking (distinct, known ids) and map it to canonical indices."""
        idx = np.array([self.index_of(pid) for pid in ranking], dtype=np.int64)
        if len(set(idx.tolist())) != len(idx):
            raise InvalidInputError("ranking contains duplicate products")
        return idx

    def ids_for(self, indices: Sequence[int]) -> Ranking:
        return tuple(self.ids[int(i)] for i in indices)

    @property
    def max_price(self) -> float:
        return float(self.prices[0])


def index_catalog(products: Iterable[Product]) -> Catalog:
    """Arrange products in the canonical order and validate them."""
    return Catalog(products)


@dataclass(frozen=True)
class SpanDistribution:
    """Attention-span distribution via tail probabilities G_1..G_M.

    G_1 = 1, the tail is nonincreasing and G_M > 0 (trailing zeros are trimmed
    by reducing M).  ``masses[x-1]`` is Pr(X = x); ``is_ifr`` records whether
    G_{x+1} G_{x-1} <= G_x^2 holds for every interior x.
    """

    tail: Tuple[float, ...]
    masses: Tuple[float, ...] = field(init=False)
    is_ifr: bool = field(init=False)

    def __post_init__(self) -> None:
        g = [float(v) for v in self.tail]
        while g and g[-1] == 0.0:
            g.pop()
        if not g:
            raise InvalidInputError("span distribution has empty support")
        if abs(g[0] - 1.0) > FLOAT_TOL:
            raise InvalidInputError(f"tail must start at G_1 = 1, got {g[0]!r}")
        g[0] = 1.0
        for x, (hi, lo) in enumerate(zip(g, g[1:]), start=1):
            if lo > hi + FLOAT_TOL:
                raise InvalidInputError(f"tail must be nonincreasing, violated at x={x}")
        if g[-1] <= 0.0:
            raise InvalidInputError("interior tail probabilities must be positive")
        object.__setattr__(self, "tail", tuple(g))
        arr = np.asarray(g, dtype=np.float64)
        masses = np.append(arr[:-1] - arr[1:], arr[-1])
        object.__setattr__(self, "masses", tuple(float(m) for m in masses))
        ifr = all(
            g[x + 1] * g[x - 1] <= g[x] * g[x] + FLOAT_TOL for x in range(1, len(g) - 1)
        )
        object.__setattr__(self, "is_ifr", ifr)

    @property
    def capacity(self) -> int:
        return len(self.tail)

    M = capacity

    def tail_array(self) -> np.ndarray:
        return np.asarray(self.tail, dtype=np.float64)

    def mass_array(self) -> np.ndarray:
        return np.asarray(self.masses, dtype=np.float64)

    @classmethod
    def explicit(cls, tail: Sequence[float]) -> "SpanDistribution":
        return cls(tuple(float(v) for v in tail))

    @classmethod
    def geometric(cls, alpha: float, M: int) -> "SpanDistribution":
        """G_x = alpha^(x-1) truncated at M; alpha = 0 is a point mass at x = 1."""
        if not 0.0 <= alpha < 1.0:
            raise InvalidInputError(f"geometric decay must lie in [0, 1), got {alpha!r}")
        if M < 1:
            raise InvalidInputError("capacity must be at least 1")
        return cls(tuple(alpha**x for x in range(M)))

    @classmethod
    def linear_tail(cls, M: int) -> "SpanDistribution":
        """G_x = 1 - (x-1)/M for x = 1..M, i.e. a uniform span on {1..M}."""
        if M < 1:
            raise InvalidInputError("capacity must be at least 1")
        return cls(tuple(1.0 - x / M for x in range(M)))


def make_span_distribution(
    kind: str,
    M: int | None = None,
    alpha: float | None = None,
    tail: Sequence[float] | None = None,
) -> SpanDistribution:
    """Build a SpanDistribution from the serialized span spec."""
    if kind == "explicit":
        if tail is None:
            raise InvalidInputError("explicit span spec needs a tail vector")
        dist = SpanDistribution.explicit(tail)
        if M is not None and M != dist.capacity:
            raise InvalidInputError(
                f"explicit tail length {dist.capacity} does not match M={M}"
            )
        return dist
    if kind == "geometric":
        if alpha is None or M is None:
            raise InvalidInputError("geometric span spec needs alpha and M")
        return SpanDistribution.geometric(alpha, M)
    if kind == "linear_tail":
        if M is None:
            raise InvalidInputError("linear_tail span spec needs M")
        return SpanDistribution.linear_tail(M)
    raise InvalidInputError(f"unknown span distribution kind {kind!r}")


def span_from_spec(spec: dict) -> SpanDistribution:
    """Build a SpanDistribution from the serialized span object (strict keys)."""
    if not isinstance(spec, dict):
        raise InvalidInputError("span spec must be an object")
    unknown = set(spec) - {"type", "M", "alpha", "tail"}
    if unknown:
        raise InvalidInputError(f"span: unknown fields {sorted(unknown)}")
    if "type" not in spec:
        raise InvalidInputError("span needs a 'type' field")
    return make_span_distribution(
        kind=spec["type"], M=spec.get("M"), alpha=spec.get("alpha"), tail=spec.get("tail")
    )


def validate_ifr(dist: SpanDistribution) -> bool:
    """True iff G_{x+1} G_{x-1} <= G_x^2 for all interior x (within tolerance)."""
    return dist.is_ifr


def _view_probs(lambdas: np.ndarray) -> np.ndarray:
    """P[i] = probability the i-th displayed product is viewed (prefix products)."""
    P = np.empty(lambdas.shape[0], dtype=np.float64)
    P[0] = 1.0
    if lambdas.shape[0] > 1:
        np.cumprod(1.0 - lambdas[:-1], out=P[1:])
    return P


def revenue_fixed_span_arrays(lambdas: np.ndarray, prices: np.ndarray, x: int) -> float:
    m = min(int(x), lambdas.shape[0])
    if m == 0:
        return 0.0
    lam = lambdas[:m]
    P = _view_probs(lam)
    return float(np.dot(P, lam * prices[:m]))


def revenue_random_span_arrays(lambdas: np.ndarray, prices: np.ndarray, G: np.ndarray) -> float:
    m = lambdas.shape[0]
    if m == 0:
        return 0.0
    P = _view_probs(lambdas)
    return float(np.dot(P * G[:m], lambdas * prices))


def revenue_fixed_span(ranking: Sequence[ProductId], x: int, catalog: Catalog) -> float:
    """Expected revenue from a consumer who inspects at most x positions."""
    if x < 1:
        raise InvalidInputError(f"span must be at least 1, got {x}")
    idx = catalog.ranking_indices(ranking)
    return revenue_fixed_span_arrays(catalog.lambdas[idx], catalog.prices[idx], x)


def revenue_random_span(
    ranking: Sequence[ProductId], dist: SpanDistribution, catalog: Catalog
) -> float:
    """Expected revenue when the attention span is drawn from ``dist``."""
    idx = catalog.ranking_indices(ranking)
    if idx.shape[0] > dist.capacity:
        raise InvalidInputError(
            f"ranking length {idx.shape[0]} exceeds the display capacity {dist.capacity}"
        )
    return revenue_random_span_arrays(
        catalog.lambdas[idx], catalog.prices[idx], dist.tail_array()
    )
