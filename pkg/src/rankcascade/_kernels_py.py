"""Pure NumPy implementations of the hot kernels.

The compiled extension ``rankcascade._kernels`` mirrors these signatures;
``rankcascade.backend`` picks whichever is available at import time.  All four
kernels operate on plain float64 arrays so they can be shared by the base
model (cannibalization factor 1 - lambda), the geometrically discounted model
(factor alpha * (1 - lambda)) and the multi-purchase model (factor c).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def dp_tableau(a, b, spans, tol):
    """Fill the ranking DP: H[k, j] = max(a[j] + b[j] * H[k-1, j+1], H[k, j+1]).

    ``a[j]`` is the immediate yield of product j (lambda_j * r_j) and ``b[j]``
    the weight of the continuation value when j is shown first.  Returns the
    (spans+1, n+1) value table and a take matrix where take[k, j] == 1 means
    showing product j wins (ties resolved toward inclusion within ``tol``).
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    n = a.shape[0]
    H = np.zeros((spans + 1, n + 1), dtype=np.float64)
    take = np.zeros((spans + 1, n + 1), dtype=np.uint8)
    for k in range(1, spans + 1):
        cand = a + b * H[k - 1, 1:]
        # H[k, j] = max over j' >= j of cand[j'], i.e. a suffix running max.
        H[k, :n] = np.maximum.accumulate(cand[::-1])[::-1]
        take[k, :n] = cand >= H[k, 1:] - tol
    return H, take


def dp_extract(take, spans):
    """Walk the take matrix from state (spans, 0) and return chosen indices."""
    n = take.shape[1] - 1
    out = []
    k = spans
    j = 0
    while k > 0 and j < n:
        if take[k, j]:
            out.append(j)
            k -= 1
        j += 1
    return np.asarray(out, dtype=np.int64)


def assortopt_steps(lam, r, spans, tol):
    """Incremental optimal assortments for fixed spans 1..spans (base model).

    Grows the ranking one product at a time; at step x every unused product is
    scored by inserting it at its index-ordered position into the current
    ranking.  Value ties within ``tol`` are broken toward the smallest product
    index.  Returns (values, added) where ``added[x-1]`` is the product index
    inserted at step x; the span-x ranking is ``sorted(added[:x])``.
    """
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    r = np.ascontiguousarray(r, dtype=np.float64)
    n = lam.shape[0]
    lr = lam * r
    values = np.empty(spans, dtype=np.float64)
    added = np.empty(spans, dtype=np.int64)
    chosen = np.empty(0, dtype=np.int64)
    used = np.zeros(n, dtype=bool)
    for x in range(1, spans + 1):
        m = x - 1
        cl = lam[chosen]
        P = np.empty(m + 1, dtype=np.float64)
        P[0] = 1.0
        if m:
            np.cumprod(1.0 - cl, out=P[1:])
        t = P[:m] * lr[chosen]
        A = np.empty(m + 1, dtype=np.float64)
        A[0] = 0.0
        np.cumsum(t, out=A[1:])
        B = A[m] - A
        pos = np.searchsorted(chosen, np.arange(n))
        vals = A[pos] + P[pos] * lr + (1.0 - lam) * B[pos]
        vals[used] = -np.inf
        vmax = vals.max()
        j = int(np.argmax(vals >= vmax - tol))
        values[x - 1] = vals[j]
        added[x - 1] = j
        used[j] = True
        chosen = np.insert(chosen, pos[j], j)
    return values, added


def best_insertion(cur_lam, cur_lr, G, cand_lam, cand_lr, tol):
    """Best single insertion into a ranking evaluated under random spans.

    ``cur_lam``/``cur_lr`` describe the current ranking in display order,
    ``G`` holds tail probabilities G_1..G_M (len(cur) must be < M) and the
    candidate arrays must be sorted by ascending catalog index so that the
    tie rule (smallest index, then earliest position) is a row-major scan.
    Returns (value, candidate_offset, position).
    """
    cur_lam = np.ascontiguousarray(cur_lam, dtype=np.float64)
    cur_lr = np.ascontiguousarray(cur_lr, dtype=np.float64)
    G = np.ascontiguousarray(G, dtype=np.float64)
    cand_lam = np.ascontiguousarray(cand_lam, dtype=np.float64)
    cand_lr = np.ascontiguousarray(cand_lr, dtype=np.float64)
    m = cur_lam.shape[0]
    P = np.empty(m + 1, dtype=np.float64)
    P[0] = 1.0
    if m:
        np.cumprod(1.0 - cur_lam, out=P[1:])
    t = P[:m] * cur_lr
    A = np.empty(m + 1, dtype=np.float64)
    A[0] = 0.0
    np.cumsum(t * G[:m], out=A[1:])
    tails = t * G[1 : m + 1]
    B = np.empty(m + 1, dtype=np.float64)
    B[m] = 0.0
    if m:
        B[:m] = np.cumsum(tails[::-1])[::-1]
    PG = P * G[: m + 1]
    vals = A[None, :] + np.outer(cand_lr, PG) + np.outer(1.0 - cand_lam, B)
    vmax = vals.max()
    flat = int(np.argmax(vals >= vmax - tol))
    ci, pos = divmod(flat, m + 1)
    return float(vals[ci, pos]), ci, pos
