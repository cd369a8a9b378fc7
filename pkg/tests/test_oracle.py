import numpy as np
import pytest

from rankcascade import BudgetExceededError, brute_force_optimal, enumeration_count
from rankcascade.oracle import brute_force_all_spans, brute_force_general

from .conftest import random_catalog, random_general_catalog


def test_example1_random_span_optimum(example1_catalog, example1_dist):
    res = brute_force_optimal(example1_catalog, dist=example1_dist, max_len=2)
    assert res.value == pytest.approx(1.036, abs=1e-12)
    assert res.optima == ((3, 1),)


def test_fixed_span_full_set_is_price_order(example1_catalog):
    res = brute_force_optimal(example1_catalog, span=3)
    best = res.optima[0]
    assert [example1_catalog.index_of(p) for p in best] == [0, 1, 2]


def test_enumeration_count_matches_formula():
    rng = np.random.default_rng(77)
    for n, max_len in [(3, 3), (5, 2), (6, 6), (7, 4)]:
        cat = random_catalog(rng, n)
        res = brute_force_optimal(cat, span=max_len, max_len=max_len)
        assert res.node_count == enumeration_count(n, max_len)


def test_budget_refusal():
    rng = np.random.default_rng(78)
    cat = random_catalog(rng, 11)
    with pytest.raises(BudgetExceededError):
        brute_force_optimal(cat, span=2)


def test_all_spans_consistent_with_single_queries():
    rng = np.random.default_rng(79)
    cat = random_catalog(rng, 6)
    per_span = brute_force_all_spans(cat)
    for x in range(1, 7):
        single = brute_force_optimal(cat, span=x)
        assert single.value == pytest.approx(per_span[x - 1].value, abs=1e-15)
        assert single.optima == per_span[x - 1].optima


def test_general_reduction_matches_base():
    from rankcascade.multi_purchase import GeneralCatalog, GeneralProduct

    rng = np.random.default_rng(80)
    cat = random_catalog(rng, 5)
    gcat = GeneralCatalog(
        GeneralProduct(
            id=p.id, price=p.price, purchase_prob=p.purchase_prob, cont_prob=1.0 - p.purchase_prob
        )
        for p in cat.products
    )
    for x in (1, 3, 5):
        base = brute_force_optimal(cat, span=x)
        general = brute_force_general(gcat, span=x)
        assert general.value == pytest.approx(base.value, abs=1e-12)
        assert set(general.optima) == set(base.optima)


def test_single_product_general():
    rng = np.random.default_rng(81)
    gcat = random_general_catalog(rng, 1)
    res = brute_force_general(gcat, span=1)
    assert res.optima == ((gcat.ids[0],),)
