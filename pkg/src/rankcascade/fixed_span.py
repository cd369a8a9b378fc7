"""Exact optimal rankings for fixed attention spans.

``solve_fixed_span`` runs the backward dynamic program over the canonically
indexed catalog; ``assort_opt`` grows the whole per-span family incrementally,
one inserted product per span, which keeps the outputs nested.  Both resolve
value ties toward the smaller product index, so they return the
lexicographically minimal optimal ranking and agree with each other.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import backend
from .errors import InvalidInputError
from .instances import Catalog, Ranking


@dataclass(frozen=True)
class DpTable:
    """Value table and take decisions of the fixed-span dynamic program.

    ``values[k, j]`` is the best revenue from a span-k customer when products
    are restricted to canonical indices j..n-1 (0-based; column n is the empty
    boundary).  ``take[k, j]`` records whether product j is displayed at state
    (k, j), which is what the ranking walk follows.
    """

    values: np.ndarray
    take: np.ndarray
    span: int

    @property
    def value(self) -> float:
        return float(self.values[self.span, 0])


def build_dp_table(catalog: Catalog, x: int) -> DpTable:
    if not 1 <= x <= len(catalog):
        raise InvalidInputError(
            f"span must lie in 1..{len(catalog)} (got {x}); not enough products otherwise"
        )
    a = catalog.lambdas * catalog.prices
    b = 1.0 - catalog.lambdas
    H, take = backend.dp_tableau(a, b, int(x), backend.TIE_TOL)
    return DpTable(values=H, take=take, span=int(x))


def solve_fixed_span(catalog: Catalog, x: int) -> Tuple[float, Ranking]:
    """Optimal value and lexicographically minimal optimal ranking for span x."""
    table = build_dp_table(catalog, x)
    idx = backend.dp_extract(table.take, table.span)
    return table.value, catalog.ids_for(idx)


@dataclass(frozen=True)
class FixedSpanSolution:
    """The nested family of per-span optima produced by ``assort_opt``."""

    catalog: Catalog
    values: np.ndarray
    added: np.ndarray  # product index inserted at each span step

    @property
    def capacity(self) -> int:
        return int(self.values.shape[0])

    def value_at(self, x: int) -> float:
        self._check(x)
        return float(self.values[x - 1])

    def ranking_indices_at(self, x: int) -> np.ndarray:
        self._check(x)
        return np.sort(self.added[:x])

    def ranking_at(self, x: int) -> Ranking:
        return self.catalog.ids_for(self.ranking_indices_at(x))

    def _check(self, x: int) -> None:
        if not 1 <= x <= self.capacity:
            raise InvalidInputError(f"span must lie in 1..{self.capacity}, got {x}")


def assort_opt(catalog: Catalog, M: int) -> FixedSpanSolution:
    """Per-span optimal rankings for x = 1..M by incremental insertion.

    M larger than the number of products is clamped with a warning: once the
    products run out the optimal ranking simply occupies every remaining slot.
    """
    if M < 1:
        raise InvalidInputError(f"capacity must be at least 1, got {M}")
    n = len(catalog)
    if M > n:
        warnings.warn(
            f"capacity M={M} exceeds the {n} available products; clamping to {n}",
            stacklevel=2,
        )
        M = n
    values, added = backend.assortopt_steps(
        catalog.lambdas, catalog.prices, int(M), backend.TIE_TOL
    )
    return FixedSpanSolution(catalog=catalog, values=values, added=added)
