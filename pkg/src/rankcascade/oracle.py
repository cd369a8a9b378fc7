"""Brute-force ground truth for small instances.

Enumerates every permutation of every subset up to a length cap and reports
the exact optimum together with the full set of optimal rankings, so the
dynamic programs can be certified for both value and lexicographic
minimality.  Deliberately independent of the solver kernels: the walk is
plain Python over incremental prefix revenues.  Hard budget of n <= 10
products; beyond that the request is refused, never truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import BudgetExceededError, InvalidInputError
from .instances import Catalog, Ranking, SpanDistribution
from .multi_purchase import GeneralCatalog

MAX_ORACLE_PRODUCTS = 10
_TOL = 1e-12


@dataclass(frozen=True)
class BruteForceResult:
    value: float
    optima: Tuple[Ranking, ...]
    optima_indices: Tuple[Tuple[int, ...], ...]
    node_count: int


def enumeration_count(n: int, max_len: int) -> int:
    """Number of nonempty rankings of length <= max_len over n products."""
    return sum(math.perm(n, k) for k in range(1, max_len + 1))


def _check_budget(n: int, max_len: int) -> int:
    if n > MAX_ORACLE_PRODUCTS:
        raise BudgetExceededError(
            f"brute force is limited to {MAX_ORACLE_PRODUCTS} products, got {n}; refusing"
        )
    if max_len < 1:
        raise InvalidInputError(f"max_len must be at least 1, got {max_len}")
    return min(max_len, n)


def _search_fixed(lr: np.ndarray, fac: np.ndarray, depth_limit: int):
    """Per-depth optima of the prefix revenue sum(P_i * lr_i) over all rankings."""
    n = lr.shape[0]
    used = [False] * n
    prefix: List[int] = []
    best = [-math.inf] * (depth_limit + 1)
    opts: List[List[Tuple[float, Tuple[int, ...]]]] = [[] for _ in range(depth_limit + 1)]
    nodes = 0

    def rec(depth: int, view_p: float, acc: float) -> None:
        nonlocal nodes
        nxt = depth + 1
        for j in range(n):
            if used[j]:
                continue
            nodes += 1
            val = acc + view_p * lr[j]
            prefix.append(j)
            if val > best[nxt] + _TOL:
                best[nxt] = val
                opts[nxt] = [(val, tuple(prefix))]
            elif val >= best[nxt] - _TOL:
                if val > best[nxt]:
                    best[nxt] = val
                opts[nxt].append((val, tuple(prefix)))
            if nxt < depth_limit:
                used[j] = True
                rec(nxt, view_p * fac[j], val)
                used[j] = False
            prefix.pop()

    rec(0, 1.0, 0.0)
    return best, opts, nodes


def _search_random(lr: np.ndarray, fac: np.ndarray, G: np.ndarray, depth_limit: int):
    """Global optimum of sum(P_i * lr_i * G_i) over all rankings of length <= depth_limit."""
    n = lr.shape[0]
    used = [False] * n
    prefix: List[int] = []
    best = -math.inf
    opts: List[Tuple[float, Tuple[int, ...]]] = []
    nodes = 0

    def rec(depth: int, view_p: float, acc: float) -> None:
        nonlocal nodes, best
        nxt = depth + 1
        for j in range(n):
            if used[j]:
                continue
            nodes += 1
            val = acc + view_p * lr[j] * G[depth]
            prefix.append(j)
            if val > best + _TOL:
                best = val
                opts[:] = [(val, tuple(prefix))]
            elif val >= best - _TOL:
                if val > best:
                    best = val
                opts.append((val, tuple(prefix)))
            if nxt < depth_limit:
                used[j] = True
                rec(nxt, view_p * fac[j], val)
                used[j] = False
            prefix.pop()

    rec(0, 1.0, 0.0)
    return best, opts, nodes


def _prune(best: float, opts, tol: float = _TOL):
    kept = sorted(t for v, t in opts if v >= best - tol)
    return tuple(kept)


def _result(ids, best, opts, nodes) -> BruteForceResult:
    kept = _prune(best, opts)
    return BruteForceResult(
        value=float(best),
        optima=tuple(tuple(ids[i] for i in t) for t in kept),
        optima_indices=kept,
        node_count=nodes,
    )


def _collect_span(ids, best, opts, span: int, nodes: int) -> BruteForceResult:
    value = max(best[1 : span + 1])
    merged: List[Tuple[float, Tuple[int, ...]]] = []
    for d in range(1, span + 1):
        merged.extend(opts[d])
    return _result(ids, value, merged, nodes)


def brute_force_optimal(
    catalog: Catalog,
    span: Optional[int] = None,
    dist: Optional[SpanDistribution] = None,
    max_len: Optional[int] = None,
) -> BruteForceResult:
    """Exhaustive optimum of the base model for a fixed span or a span distribution."""
    if (span is None) == (dist is None):
        raise InvalidInputError("pass exactly one of span or dist")
    n = len(catalog)
    lr = catalog.lambdas * catalog.prices
    fac = 1.0 - catalog.lambdas
    if span is not None:
        if span < 1:
            raise InvalidInputError(f"span must be at least 1, got {span}")
        limit = _check_budget(n, min(span, max_len if max_len is not None else span))
        best, opts, nodes = _search_fixed(lr, fac, limit)
        return _collect_span(catalog.ids, best, opts, limit, nodes)
    assert dist is not None
    limit = _check_budget(n, max_len if max_len is not None else dist.capacity)
    limit = min(limit, dist.capacity)
    best, opts, nodes = _search_random(lr, fac, dist.tail_array(), limit)
    return _result(catalog.ids, best, opts, nodes)


def brute_force_all_spans(catalog: Catalog, max_len: Optional[int] = None) -> List[BruteForceResult]:
    """Fixed-span optima for every span 1..max_len from one enumeration pass."""
    n = len(catalog)
    limit = _check_budget(n, max_len if max_len is not None else n)
    lr = catalog.lambdas * catalog.prices
    best, opts, nodes = _search_fixed(lr, 1.0 - catalog.lambdas, limit)
    return [_collect_span(catalog.ids, best, opts, x, nodes) for x in range(1, limit + 1)]


def brute_force_general(
    catalog: GeneralCatalog, span: int, max_len: Optional[int] = None
) -> BruteForceResult:
    """Exhaustive fixed-span optimum of the multi-purchase model."""
    if span < 1:
        raise InvalidInputError(f"span must be at least 1, got {span}")
    n = len(catalog)
    limit = _check_budget(n, min(span, max_len if max_len is not None else span))
    lr = catalog.lambdas * catalog.prices
    best, opts, nodes = _search_fixed(lr, catalog.conts, limit)
    return _collect_span(catalog.ids, best, opts, limit, nodes)


def brute_force_general_all_spans(
    catalog: GeneralCatalog, max_len: Optional[int] = None
) -> List[BruteForceResult]:
    """Fixed-span optima of the multi-purchase model for every span 1..max_len."""
    n = len(catalog)
    limit = _check_budget(n, max_len if max_len is not None else n)
    lr = catalog.lambdas * catalog.prices
    best, opts, nodes = _search_fixed(lr, catalog.conts, limit)
    return [_collect_span(catalog.ids, best, opts, x, nodes) for x in range(1, limit + 1)]
