import json

import numpy as np
import pytest

from rankcascade import Catalog, Product, SpanDistribution
from rankcascade.multi_purchase import GeneralCatalog, GeneralProduct


@pytest.fixture
def example1_catalog() -> Catalog:
    """Three products (r, lambda) = (1,1), (9,0.1), (1.9,0.52), ids by presentation order."""
    return Catalog(
        [
            Product(id=1, price=1.0, purchase_prob=1.0),
            Product(id=2, price=9.0, purchase_prob=0.1),
            Product(id=3, price=1.9, purchase_prob=0.52),
        ]
    )


@pytest.fixture
def example1_dist() -> SpanDistribution:
    """Pr(X=1) = 0.9, Pr(X=2) = 0.1."""
    return SpanDistribution.explicit([1.0, 0.1])


def random_catalog(rng: np.random.Generator, n: int, lam_hi: float = 0.95) -> Catalog:
    """Random catalog with continuous draws, so ties have probability zero."""
    prices = rng.uniform(0.1, 10.0, size=n)
    lams = rng.uniform(0.05, lam_hi, size=n)
    return Catalog(
        Product(id=j, price=float(prices[j]), purchase_prob=float(lams[j])) for j in range(n)
    )


def random_general_catalog(rng: np.random.Generator, n: int) -> GeneralCatalog:
    prices = rng.uniform(0.1, 10.0, size=n)
    lams = rng.uniform(0.05, 0.95, size=n)
    conts = rng.uniform(0.0, 0.95, size=n)
    return GeneralCatalog(
        GeneralProduct(
            id=j, price=float(prices[j]), purchase_prob=float(lams[j]), cont_prob=float(conts[j])
        )
        for j in range(n)
    )


def hard_catalog(rng: np.random.Generator, n: int) -> Catalog:
    """Instances in the experiment regime: r and lambda sorted oppositely."""
    prices = np.sort(rng.uniform(0.0, 10.0, size=n))[::-1]
    prices = np.maximum(prices, 1e-9)
    lams = np.clip(np.sort(rng.uniform(0.0, 0.5, size=n)), 1e-12, 0.5)
    return Catalog(
        Product(id=j + 1, price=float(prices[j]), purchase_prob=float(lams[j]))
        for j in range(n)
    )


@pytest.fixture
def example1_file(tmp_path, example1_catalog, example1_dist):
    path = tmp_path / "example1.json"
    data = {
        "products": [
            {"id": 1, "price": 1.0, "lambda": 1.0},
            {"id": 2, "price": 9.0, "lambda": 0.1},
            {"id": 3, "price": 1.9, "lambda": 0.52},
        ],
        "span": {"type": "explicit", "tail": [1.0, 0.1]},
    }
    path.write_text(json.dumps(data))
    return path
