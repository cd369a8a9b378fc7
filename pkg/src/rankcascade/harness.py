"""Customer simulation, instance generation and the experiment drivers.

All randomness flows from a single config seed through named substreams
(instance, heuristic, customer, feature, ...), so identical configs produce
bit-identical reports and CSV files.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from . import backend
from .bandit import (
    encode_observation,
    init_estimator_state,
    rank_ucb_step,
    update_estimators,
    vectorize_all,
)
from .bestx import best_x, clairvoyant_bound
from .errors import InvalidInputError
from .fixed_span import assort_opt
from .instances import (
    Catalog,
    Product,
    SpanDistribution,
    revenue_random_span_arrays,
    span_from_spec,
)

# Named RNG substreams hanging off the config seed.
_S_INSTANCE = 0
_S_HEURISTIC = 1
_S_CUSTOMER = 2
_S_FEATURE = 3
_S_THETA = 4


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent, reproducible generator for a named substream of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))


# ---------------------------------------------------------------------------
# Customer simulation
# ---------------------------------------------------------------------------

def simulate_customer(
    ranking: Sequence, catalog: Catalog, x: int, rng: np.random.Generator
) -> Tuple[int, int]:
    """Walk one customer with attention span x down the ranking.

    Returns (psi, upsilon): psi = 1 with the purchase position, or psi = 0
    with the number of positions viewed before leaving.
    """
    if x < 1:
        raise InvalidInputError(f"span must be at least 1, got {x}")
    idx = catalog.ranking_indices(ranking)
    return _simulate_walk(catalog.lambdas[idx], int(x), rng)


def _simulate_walk(lam: np.ndarray, x: int, rng: np.random.Generator) -> Tuple[int, int]:
    limit = min(x, lam.shape[0])
    for k in range(limit):
        if rng.random() < lam[k]:
            return 1, k + 1
    return 0, limit


def simulate_customer_multi(
    ranking: Sequence, catalog, x: int, rng: np.random.Generator
) -> Tuple[Tuple, int]:
    """Multi-purchase walk: buy with lambda, keep viewing with independent c.

    Returns (purchased product ids, last viewed position).  Purchases and
    continuation are drawn independently; the expected revenue only depends
    on the marginals, so this is a simulation-only choice.
    """
    if x < 1:
        raise InvalidInputError(f"span must be at least 1, got {x}")
    idx = catalog.ranking_indices(ranking)
    lam = catalog.lambdas[idx]
    cont = catalog.conts[idx]
    limit = min(int(x), idx.shape[0])
    bought = []
    upsilon = 0
    for k in range(limit):
        upsilon = k + 1
        if rng.random() < lam[k]:
            bought.append(ranking[k])
        if k + 1 < limit and rng.random() >= cont[k]:
            break
    return tuple(bought), upsilon


def simulate_customers_batch(
    lam: np.ndarray,
    dist: SpanDistribution,
    count: int,
    rng: np.random.Generator,
    chunk: int = 1 << 15,
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized i.i.d. simulation of many customers on one fixed ranking.

    Returns (psi, upsilon) arrays of length ``count``.
    """
    m = lam.shape[0]
    psi = np.empty(count, dtype=np.int8)
    ups = np.empty(count, dtype=np.int64)
    masses = dist.mass_array()
    done = 0
    while done < count:
        size = min(chunk, count - done)
        spans = rng.choice(dist.capacity, size=size, p=masses) + 1
        u = rng.random((size, m))
        buy = u < lam[None, :]
        first = np.argmax(buy, axis=1) + 1
        any_buy = buy.any(axis=1)
        first = np.where(any_buy, first, m + dist.capacity + 1)
        limit = np.minimum(spans, m)
        bought = first <= limit
        psi[done : done + size] = bought
        ups[done : done + size] = np.where(bought, first, limit)
        done += size
    return psi, ups


# ---------------------------------------------------------------------------
# Instance generation
# ---------------------------------------------------------------------------

def generate_instance(
    n: int,
    M: int,
    rng: np.random.Generator,
    span: SpanDistribution | dict | None = None,
) -> Tuple[Catalog, SpanDistribution]:
    """Random instance with prices U[0,10] and purchase probabilities U[0,0.5].

    Prices and probabilities are sorted in opposite directions and paired, so
    r_j >= r_{j+1} while lambda_j <= lambda_{j+1}: the expensive products are
    the unpopular ones, which is the hard trade-off regime.  ``span`` defaults
    to the linear tail (uniform span) on {1..M}.
    """
    if n < M:
        raise InvalidInputError(f"need at least M={M} products, got n={n}")
    prices = np.sort(rng.uniform(0.0, 10.0, size=n))[::-1]
    lams = np.sort(rng.uniform(0.0, 0.5, size=n))
    prices = np.maximum(prices, 1e-9)
    lams = np.clip(lams, 1e-12, 0.5)
    catalog = Catalog(
        Product(id=j + 1, price=float(prices[j]), purchase_prob=float(lams[j]))
        for j in range(n)
    )
    if span is None:
        dist = SpanDistribution.linear_tail(M)
    elif isinstance(span, SpanDistribution):
        dist = span
    else:
        dist = span_from_spec(span)
    return catalog, dist


def random_ifr_tail(
    M: int, rng: np.random.Generator, h_lo: float = 0.02, h_hi: float = 0.35
) -> SpanDistribution:
    """Random IFR span distribution from sorted (hence increasing) failure rates."""
    h = np.sort(rng.uniform(h_lo, h_hi, size=M - 1)) if M > 1 else np.empty(0)
    tail = np.concatenate([[1.0], np.cumprod(1.0 - h)])
    return SpanDistribution.explicit(tail)


def adversarial_instance(
    alpha: float, lambda_small: float, M: int
) -> Tuple[Catalog, SpanDistribution]:
    """Worst-case family for the clairvoyant gap (ratio approaches 1/(1+alpha)).

    One sure-sale product (r=1, lambda=1) plus M near-identical cheap-chance
    products with lambda = lambda_small and r*lambda = 1 - alpha, under a
    geometric span with decay alpha.  The M copies get a 1e-9 relative price
    stagger because the catalog rejects exactly identical products; the
    perturbation is far below every audit tolerance.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not 0.0 < lambda_small <= 1.0 - alpha:
        raise InvalidInputError(
            f"lambda_small must lie in (0, 1-alpha], got {lambda_small!r}"
        )
    base_r = (1.0 - alpha) / lambda_small
    products = [Product(id=0, price=1.0, purchase_prob=1.0)]
    for j in range(1, M + 1):
        products.append(
            Product(
                id=j,
                price=base_r * (1.0 + 1e-9 * (M - j + 1)),
                purchase_prob=lambda_small,
            )
        )
    return Catalog(products), SpanDistribution.geometric(alpha, M)


# ---------------------------------------------------------------------------
# Offline benchmark (heuristics versus the clairvoyant)
# ---------------------------------------------------------------------------

HEURISTICS = ("rdm", "max_span", "max_expprofit", "hillclimb", "bestx", "bestx_fill")


@dataclass(frozen=True)
class OfflineConfig:
    instances: int
    n: int
    M: int
    span: dict
    seed: int
    threads: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "OfflineConfig":
        allowed = {"instances", "n", "M", "span", "seed", "threads"}
        unknown = set(data) - allowed
        if unknown:
            raise InvalidInputError(f"unknown offline config fields: {sorted(unknown)}")
        missing = {"instances", "n", "M", "span", "seed"} - set(data)
        if missing:
            raise InvalidInputError(f"offline config missing fields: {sorted(missing)}")
        return cls(
            instances=int(data["instances"]),
            n=int(data["n"]),
            M=int(data["M"]),
            span=dict(data["span"]),
            seed=int(data["seed"]),
            threads=int(data.get("threads", 1)),
        )


@dataclass(frozen=True)
class OfflineRow:
    instance_id: str
    clairvoyant: float
    ratios: Dict[str, float]


@dataclass(frozen=True)
class OfflineReport:
    config: OfflineConfig
    rows: Tuple[OfflineRow, ...]

    def ratios_for(self, name: str) -> np.ndarray:
        return np.array([row.ratios[name] for row in self.rows])

    def summary(self) -> Dict[str, Dict[str, float]]:
        out: Dict[str, Dict[str, float]] = {}
        for name in HEURISTICS:
            vals = self.ratios_for(name)
            out[name] = {
                "min": float(vals.min()),
                "mean": float(vals.mean()),
                "max": float(vals.max()),
            }
        return out

    def histogram(self, name: str, edges: Sequence[float]) -> np.ndarray:
        counts, _ = np.histogram(self.ratios_for(name), bins=np.asarray(edges))
        return counts


def _greedy_fill_from(
    idx: Sequence[int], lam: np.ndarray, lr: np.ndarray, G: np.ndarray, target: int
) -> np.ndarray:
    current = [int(i) for i in idx]
    pool = np.setdiff1d(np.arange(lam.shape[0], dtype=np.int64), np.asarray(current, dtype=np.int64))
    while len(current) < target and pool.shape[0]:
        cur = np.asarray(current, dtype=np.int64)
        _, ci, pos = backend.best_insertion(
            lam[cur], lr[cur], G, lam[pool], lr[pool], backend.TIE_TOL
        )
        current.insert(pos, int(pool[ci]))
        pool = np.delete(pool, ci)
    return np.asarray(current, dtype=np.int64)


def _offline_instance(args: Tuple[OfflineConfig, int]) -> OfflineRow:
    config, i = args
    rng = substream(config.seed, _S_INSTANCE, i)
    catalog, dist = generate_instance(config.n, config.M, rng, config.span)
    n = len(catalog)
    M = min(dist.capacity, n)
    lam, prices = catalog.lambdas, catalog.prices
    lr = lam * prices
    G = dist.tail_array()
    sol = assort_opt(catalog, M)
    clair = clairvoyant_bound(catalog, dist, solution=sol)

    def value_of(idx: np.ndarray) -> float:
        return revenue_random_span_arrays(lam[idx], prices[idx], G)

    rng_h = substream(config.seed, _S_HEURISTIC, i)
    rankings: Dict[str, np.ndarray] = {}
    rankings["rdm"] = rng_h.choice(n, size=M, replace=False)
    rankings["max_span"] = sol.ranking_indices_at(M)
    rankings["max_expprofit"] = np.sort(np.lexsort((np.arange(n), -lr))[:M])
    rankings["hillclimb"] = _greedy_fill_from([], lam, lr, G, M)
    plain = best_x(catalog, dist, solution=sol)
    rankings["bestx"] = catalog.ranking_indices(plain.ranking)
    rankings["bestx_fill"] = _greedy_fill_from(rankings["bestx"], lam, lr, G, M)
    ratios = {name: value_of(idx) / clair for name, idx in rankings.items()}
    return OfflineRow(instance_id=f"inst{i:04d}", clairvoyant=clair, ratios=ratios)


def run_offline_benchmark(config: OfflineConfig) -> OfflineReport:
    """Ratio-to-clairvoyant of every heuristic over a corpus of random instances."""
    jobs = [(config, i) for i in range(config.instances)]
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            rows = list(pool.map(_offline_instance, jobs, chunksize=16))
    else:
        rows = [_offline_instance(job) for job in jobs]
    return OfflineReport(config=config, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Bandit experiment (RankUCB against the informed Best-x)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BanditConfig:
    n: int
    M: int
    d_p: int
    d_c: int
    T: int
    gamma: float
    D: float
    seed: int
    span: dict
    replications: int
    track_k: Tuple[int, ...] = (1, 3, 5)
    threads: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "BanditConfig":
        allowed = {
            "n", "M", "d_p", "d_c", "T", "gamma", "D", "seed", "span",
            "replications", "track_k", "threads",
        }
        unknown = set(data) - allowed
        if unknown:
            raise InvalidInputError(f"unknown bandit config fields: {sorted(unknown)}")
        missing = {"n", "M", "d_p", "d_c", "T", "seed", "span", "replications"} - set(data)
        if missing:
            raise InvalidInputError(f"bandit config missing fields: {sorted(missing)}")
        return cls(
            n=int(data["n"]),
            M=int(data["M"]),
            d_p=int(data["d_p"]),
            d_c=int(data["d_c"]),
            T=int(data["T"]),
            gamma=float(data.get("gamma", 1.0)),
            D=float(data.get("D", 1.0)),
            seed=int(data["seed"]),
            span=dict(data["span"]),
            replications=int(data["replications"]),
            track_k=tuple(int(k) for k in data.get("track_k", (1, 3, 5))),
            threads=int(data.get("threads", 1)),
        )


@dataclass
class BanditReport:
    config: BanditConfig
    ratio: np.ndarray          # (reps, T) per-round performance ratio
    regret: np.ndarray         # (reps, T) per-round scaled regret
    h_est_err: Dict[int, np.ndarray]   # k -> (reps, T) |h_hat - h*|
    h_opt_err: Dict[int, np.ndarray]   # k -> (reps, T) |h^L - h*|
    coverage: np.ndarray       # (reps, T) optimism held for all products/spans
    h_star: np.ndarray

    @property
    def ratio_mean(self) -> np.ndarray:
        return self.ratio.mean(axis=0)

    @property
    def ratio_se(self) -> np.ndarray:
        reps = self.ratio.shape[0]
        if reps == 1:
            return np.zeros(self.ratio.shape[1])
        return self.ratio.std(axis=0, ddof=1) / math.sqrt(reps)

    @property
    def cum_regret_mean(self) -> np.ndarray:
        return np.cumsum(self.regret.mean(axis=0))


def _true_failure_rates(dist: SpanDistribution) -> np.ndarray:
    G = dist.tail_array()
    h = np.empty(dist.capacity)
    for k in range(dist.capacity - 1):
        h[k] = (G[k] - G[k + 1]) / G[k]
    h[dist.capacity - 1] = 1.0
    return h


def _bandit_replication(config: BanditConfig, theta_star: np.ndarray, rep: int):
    dist = span_from_spec(config.span)
    if dist.capacity != config.M:
        raise InvalidInputError(
            f"span capacity {dist.capacity} must equal the slate size M={config.M}"
        )
    n, M, T = config.n, config.M, config.T
    d = config.d_p * config.d_c
    G = dist.tail_array()
    masses = dist.mass_array()
    h_star = _true_failure_rates(dist)

    rng_inst = substream(config.seed, _S_INSTANCE, rep)
    prices = rng_inst.uniform(0.0, 10.0, size=n)
    S = rng_inst.normal(0.25, 1.0, size=(n, config.d_p))
    S /= np.linalg.norm(S, axis=1, keepdims=True)
    order_price = np.lexsort((np.arange(n), -prices))
    rng_cust = substream(config.seed, _S_CUSTOMER, rep)
    rng_feat = substream(config.seed, _S_FEATURE, rep)

    state = init_estimator_state(d, M, config.gamma)
    ratio = np.empty(T)
    regret = np.empty(T)
    coverage = np.empty(T, dtype=bool)
    h_est = {k: np.empty(T) for k in config.track_k}
    h_opt = {k: np.empty(T) for k in config.track_k}

    for t in range(1, T + 1):
        y = rng_feat.normal(1.0, math.sqrt(0.1), size=config.d_c)
        y /= np.linalg.norm(y)
        X = vectorize_all(S, y)
        raw = X @ theta_star
        # The Gaussian construction can yield nonpositive inner products; the
        # floor keeps lambda a valid Bernoulli parameter.
        lam_true = np.clip(raw, 1e-6, 1.0)

        sigma, details = rank_ucb_step(state, prices, X, M, config.D, with_details=True)

        lam_sorted = lam_true[order_price]
        r_sorted = prices[order_price]
        values, added = backend.assortopt_steps(lam_sorted, r_sorted, M, backend.TIE_TOL)
        scores = values * G[:M]
        bx = int(np.argmax(scores >= scores.max() - backend.TIE_TOL)) + 1
        bench_pos = _greedy_fill_from(
            np.sort(added[:bx]), lam_sorted, lam_sorted * r_sorted, G, M
        )
        bench_idx = order_price[bench_pos]

        r_alg = revenue_random_span_arrays(lam_true[sigma], prices[sigma], G)
        r_bench = revenue_random_span_arrays(lam_true[bench_idx], prices[bench_idx], G)
        clair = float(np.dot(masses, values))
        ratio[t - 1] = r_alg / r_bench
        regret[t - 1] = clair - math.e * r_alg
        # Optimism audit against the quantities the confidence regions cover:
        # the linear score projected into [0,1] (not the simulation floor).
        coverage[t - 1] = bool(
            np.all(details.u >= np.clip(raw, 0.0, 1.0) - 1e-12)
            and np.all(details.G_upper >= G - 1e-12)
        )

        span_x = int(rng_cust.choice(M, p=masses)) + 1
        psi, upsilon = _simulate_walk(lam_true[sigma], span_x, rng_cust)
        obs = encode_observation(psi, upsilon, M)
        state = update_estimators(state, X[sigma], obs)

        for k in config.track_k:
            h_est[k][t - 1] = abs(state.h_hat[k - 1] - h_star[k - 1])
            h_opt[k][t - 1] = abs(details.hL[k - 1] - h_star[k - 1])

    return ratio, regret, coverage, h_est, h_opt, h_star


def run_coverage_audit(
    n: int,
    M: int,
    d_p: int,
    d_c: int,
    T: int,
    gamma: float,
    D: float,
    seed: int,
    span: dict | SpanDistribution | None = None,
) -> np.ndarray:
    """Monte Carlo audit of the confidence-region event: u covers every true
    purchase probability and G^U covers every tail probability.

    Uses nonnegative features and a nonnegative parameter vector so every
    inner product genuinely lies in (0, 1): the purchase model is then
    well-specified, which is what the coverage guarantee presumes.  Returns a
    boolean array with one entry per round.
    """
    d = d_p * d_c
    if isinstance(span, SpanDistribution):
        dist = span
    elif span is None:
        dist = SpanDistribution.linear_tail(M)
    else:
        dist = span_from_spec(span)
    if dist.capacity != M:
        raise InvalidInputError(f"span capacity {dist.capacity} must equal M={M}")
    G = dist.tail_array()
    masses = dist.mass_array()

    rng_theta = substream(seed, _S_THETA)
    theta_star = np.abs(rng_theta.normal(0.25, 1.0, size=d))
    theta_star *= 0.906 / np.linalg.norm(theta_star)
    rng_inst = substream(seed, _S_INSTANCE, 0)
    prices = rng_inst.uniform(0.0, 10.0, size=n)
    S = np.abs(rng_inst.normal(0.25, 1.0, size=(n, d_p)))
    S /= np.linalg.norm(S, axis=1, keepdims=True)
    rng_cust = substream(seed, _S_CUSTOMER, 0)
    rng_feat = substream(seed, _S_FEATURE, 0)

    state = init_estimator_state(d, M, gamma)
    covered = np.empty(T, dtype=bool)
    for t in range(1, T + 1):
        y = np.abs(rng_feat.normal(1.0, math.sqrt(0.1), size=d_c))
        y /= np.linalg.norm(y)
        X = vectorize_all(S, y)
        lam_true = X @ theta_star
        sigma, details = rank_ucb_step(state, prices, X, M, D, with_details=True)
        covered[t - 1] = bool(
            np.all(details.u >= lam_true - 1e-12)
            and np.all(details.G_upper >= G - 1e-12)
        )
        span_x = int(rng_cust.choice(M, p=masses)) + 1
        psi, upsilon = _simulate_walk(lam_true[sigma], span_x, rng_cust)
        state = update_estimators(state, X[sigma], encode_observation(psi, upsilon, M))
    return covered


def _bandit_replication_job(args):
    return _bandit_replication(*args)


def run_bandit_experiment(config: BanditConfig) -> BanditReport:
    """Simulate RankUCB for T rounds per replication against ground truth.

    The per-round metric is the exact conditional expected revenue of the
    chosen slate over that of the informed, greedy-filled Best-x slate; the
    scaled regret uses the clairvoyant bound as the (computable) stand-in for
    the intractable optimal ranking.
    """
    for k in config.track_k:
        if not 1 <= k <= config.M:
            raise InvalidInputError(f"tracked failure-rate index {k} outside 1..{config.M}")
    d = config.d_p * config.d_c
    rng_theta = substream(config.seed, _S_THETA)
    theta_star = rng_theta.normal(0.25, 1.0, size=d)
    theta_star *= 0.906 / np.linalg.norm(theta_star)

    jobs = [(config, theta_star, rep) for rep in range(config.replications)]
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(_bandit_replication_job, jobs))
    else:
        results = [_bandit_replication(config, theta_star, rep) for rep in range(config.replications)]
    ratio = np.stack([r[0] for r in results])
    regret = np.stack([r[1] for r in results])
    coverage = np.stack([r[2] for r in results])
    h_est = {
        k: np.stack([r[3][k] for r in results]) for k in config.track_k
    }
    h_opt = {
        k: np.stack([r[4][k] for r in results]) for k in config.track_k
    }
    return BanditReport(
        config=config,
        ratio=ratio,
        regret=regret,
        h_est_err=h_est,
        h_opt_err=h_opt,
        coverage=coverage,
        h_star=results[0][5],
    )
