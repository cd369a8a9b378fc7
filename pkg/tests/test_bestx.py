import numpy as np
import pytest

from rankcascade import (
    InvalidInputError,
    SpanDistribution,
    best_x,
    clairvoyant_bound,
    greedy_fill,
    ratio_audit,
    revenue_random_span,
    solve_fixed_span,
)
from rankcascade.bestx import ONE_OVER_E
from rankcascade.harness import adversarial_instance, random_ifr_tail

from .conftest import hard_catalog, random_catalog


class TestClairvoyant:
    def test_example1_value(self, example1_catalog, example1_dist):
        assert clairvoyant_bound(example1_catalog, example1_dist) == pytest.approx(
            1.08, abs=1e-12
        )

    def test_point_mass_equals_fixed_span_optimum(self):
        rng = np.random.default_rng(2)
        cat = random_catalog(rng, 7)
        point = SpanDistribution.explicit([1.0] * 4)
        value, _ = solve_fixed_span(cat, 4)
        assert clairvoyant_bound(cat, point) == pytest.approx(value, abs=1e-12)

    def test_dominates_random_rankings(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            cat = random_catalog(rng, 12)
            dist = random_ifr_tail(6, rng)
            clair = clairvoyant_bound(cat, dist)
            for _ in range(100):
                m = int(rng.integers(1, 7))
                ranking = tuple(int(i) for i in rng.choice(12, size=m, replace=False))
                assert revenue_random_span(ranking, dist, cat) <= clair + 1e-9


class TestBestX:
    def test_example1_chooses_span_one(self, example1_catalog, example1_dist):
        res = best_x(example1_catalog, example1_dist)
        assert res.chosen_x == 1
        assert res.ranking == (1,)
        assert res.lower_bound == pytest.approx(1.0, abs=1e-12)
        assert res.expected_revenue == pytest.approx(1.0, abs=1e-12)

    def test_point_mass_at_capacity_reduces_to_fixed_span(self):
        rng = np.random.default_rng(4)
        cat = random_catalog(rng, 9)
        point = SpanDistribution.explicit([1.0] * 5)
        res = best_x(cat, point)
        value, ranking = solve_fixed_span(cat, 5)
        assert res.chosen_x == 5
        assert res.ranking == ranking
        assert res.expected_revenue == pytest.approx(value, abs=1e-12)

    def test_lower_bound_sandwich(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            cat = random_catalog(rng, 15)
            dist = random_ifr_tail(8, rng)
            res = best_x(cat, dist)
            assert res.lower_bound <= res.expected_revenue + 1e-12
            assert res.expected_revenue <= res.clairvoyant + 1e-12

    def test_one_over_e_on_ifr_corpus(self):
        rng = np.random.default_rng(16)
        for i in range(60):
            cat = random_catalog(rng, 20)
            dist = random_ifr_tail(10, rng)
            res = best_x(cat, dist)
            assert res.ratio >= ONE_OVER_E, f"instance {i} broke the 1/e guarantee"


class TestGreedyFill:
    def test_example1_fill_recovers_sigma_star(self, example1_catalog, example1_dist):
        filled = greedy_fill((1,), example1_catalog, example1_dist, M=2)
        assert filled == (3, 1)
        assert revenue_random_span(filled, example1_dist, example1_catalog) == pytest.approx(
            1.036, abs=1e-12
        )

    def test_example1_fill_beats_all_other_insertions(self, example1_catalog, example1_dist):
        # Enumerate the four insertion choices by hand as the oracle.
        options = []
        for pid in (2, 3):
            for pos in (0, 1):
                cand = [1]
                cand.insert(pos, pid)
                options.append(revenue_random_span(tuple(cand), example1_dist, example1_catalog))
        filled = greedy_fill((1,), example1_catalog, example1_dist, M=2)
        got = revenue_random_span(filled, example1_dist, example1_catalog)
        assert got == pytest.approx(max(options), abs=1e-12)

    def test_already_full_unchanged(self, example1_catalog, example1_dist):
        assert greedy_fill((2, 1), example1_catalog, example1_dist, M=2) == (2, 1)

    def test_fill_never_decreases_revenue_and_keeps_order(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            cat = random_catalog(rng, 12)
            dist = random_ifr_tail(8, rng)
            m = int(rng.integers(0, 5))
            partial = tuple(int(i) for i in rng.choice(12, size=m, replace=False))
            before = revenue_random_span(partial, dist, cat) if m else 0.0
            filled = greedy_fill(partial, cat, dist)
            after = revenue_random_span(filled, dist, cat)
            assert after >= before - 1e-12
            assert len(filled) == 8
            kept = [p for p in filled if p in partial]
            assert tuple(kept) == partial

    def test_partial_longer_than_capacity_rejected(self, example1_catalog):
        dist = SpanDistribution.explicit([1.0])
        with pytest.raises(InvalidInputError):
            greedy_fill((2, 1), example1_catalog, dist)


class TestRatioAudit:
    def test_single_product_ratio_one(self):
        from rankcascade import Catalog, Product

        cat = Catalog([Product(id="a", price=2.0, purchase_prob=0.5)])
        dist = SpanDistribution.explicit([1.0])
        report = ratio_audit([("solo", cat, dist)])
        assert report.rows[0].ratio_bestx == pytest.approx(1.0, abs=1e-12)
        assert not report.violations

    def test_non_ifr_rejected_with_diagnostic(self):
        rng = np.random.default_rng(33)
        cat = random_catalog(rng, 5)
        bad = SpanDistribution.explicit([1.0, 0.5, 0.45])
        with pytest.raises(InvalidInputError, match="not IFR"):
            ratio_audit([("bad", cat, bad)])

    def test_corpus_summary_and_histogram(self):
        rng = np.random.default_rng(37)
        instances = []
        for i in range(20):
            instances.append((f"i{i}", hard_catalog(rng, 30), random_ifr_tail(8, rng)))
        report = ratio_audit(instances)
        assert len(report.rows) == 20
        assert report.min_ratio_bestx >= ONE_OVER_E
        assert report.min_ratio_filled >= report.min_ratio_bestx - 1e-12
        assert sum(report.histogram_bestx) == 20
        summary = report.summary()
        assert summary["violations"] == 0.0


class TestAdversarialFamily:
    def test_moderate_alpha_clairvoyant_close_to_one_plus_alpha(self):
        cat, dist = adversarial_instance(0.5, 1e-6, 200)
        clair = clairvoyant_bound(cat, dist)
        assert abs(clair - 1.5) <= 0.01 * 1.5

    def test_ratio_lands_between_one_over_e_and_half(self):
        cat, dist = adversarial_instance(0.99, 1e-4, 500)
        res = best_x(cat, dist)
        assert res.expected_revenue == pytest.approx(1.0, rel=1e-3)
        assert ONE_OVER_E <= res.ratio <= 0.52
        assert res.ratio == pytest.approx(1.0 / (1.0 + 0.99), rel=0.02)
