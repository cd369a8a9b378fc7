import math

import numpy as np
import pytest

from rankcascade.bandit import (
    confidence_radius,
    encode_observation,
    init_estimator_state,
    optimistic_estimates,
    rank_ucb_step,
    update_estimators,
    vectorize_all,
    vectorize_features,
)
from rankcascade import backend
from rankcascade.errors import InvalidInputError


class TestVectorize:
    def test_basis_vectors_yield_single_one(self):
        x = vectorize_features(np.array([1.0, 0.0]), np.array([1.0, 0.0]))
        assert x.tolist() == [1.0, 0.0, 0.0, 0.0]

    def test_unit_norms_multiply(self):
        rng = np.random.default_rng(0)
        s = rng.normal(size=4)
        s /= np.linalg.norm(s)
        y = rng.normal(size=3)
        y /= np.linalg.norm(y)
        assert np.linalg.norm(vectorize_features(s, y)) == pytest.approx(1.0, abs=1e-12)

    def test_reproduces_bilinear_form(self):
        # x . vec(Theta) == s^T Theta y with row-major everything
        rng = np.random.default_rng(1)
        for _ in range(20):
            s = rng.normal(size=3)
            y = rng.normal(size=2)
            theta = rng.normal(size=6)
            Theta = theta.reshape(3, 2)
            assert vectorize_features(s, y) @ theta == pytest.approx(
                s @ Theta @ y, abs=1e-12
            )

    def test_vectorize_all_matches_rowwise(self):
        rng = np.random.default_rng(2)
        S = rng.normal(size=(5, 3))
        y = rng.normal(size=2)
        X = vectorize_all(S, y)
        for j in range(5):
            assert np.allclose(X[j], vectorize_features(S[j], y), atol=0)

    def test_dimension_validation(self):
        with pytest.raises(InvalidInputError):
            vectorize_features(np.zeros((2, 2)), np.zeros(2))
        with pytest.raises(InvalidInputError):
            vectorize_features(np.zeros(0), np.zeros(2))


class TestEncodeObservation:
    def test_purchase_at_three_of_five(self):
        obs = encode_observation(1, 3, 5)
        assert obs.Z.tolist() == [0, 0, 1, 0, 0]
        assert obs.OZ.tolist() == [1, 1, 1, 0, 0]
        assert obs.OY.tolist() == [1, 1, 0, 0, 0]
        assert obs.Y.tolist() == [0, 0, 0, 0, 0]

    def test_leave_at_two_of_five(self):
        obs = encode_observation(0, 2, 5)
        assert obs.Y.tolist() == [0, 1, 0, 0, 0]
        assert obs.OY.tolist() == [1, 1, 0, 0, 0]
        assert obs.OZ.tolist() == [1, 1, 0, 0, 0]
        assert obs.Z.tolist() == [0, 0, 0, 0, 0]

    def test_smallest_case(self):
        obs = encode_observation(0, 1, 1)
        assert obs.Y.tolist() == [1]
        assert obs.OY.tolist() == [1]

    def test_mask_invariants_exhaustive(self):
        for M in range(1, 6):
            for psi in (0, 1):
                for ups in range(1, M + 1):
                    obs = encode_observation(psi, ups, M)
                    # nesting of both masks
                    for k in range(1, M):
                        assert obs.OY[k] <= obs.OY[k - 1]
                        assert obs.OZ[k] <= obs.OZ[k - 1]
                    # O^Z_{k+1} = 1 implies O^Y_k = 1
                    for k in range(M - 1):
                        if obs.OZ[k + 1]:
                            assert obs.OY[k]
                    # indicators only where observable
                    assert np.all(obs.Y <= obs.OY)
                    assert np.all(obs.Z <= obs.OZ)

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            encode_observation(2, 1, 3)
        with pytest.raises(InvalidInputError):
            encode_observation(0, 4, 3)


class TestUpdateEstimators:
    def test_scalar_ridge_arithmetic(self):
        state = init_estimator_state(d=1, M=1, gamma=1.0)
        obs = encode_observation(1, 1, 1)
        state = update_estimators(state, np.array([[1.0]]), obs)
        assert state.V[0, 0] == pytest.approx(2.0, abs=1e-15)
        assert state.B[0] == pytest.approx(1.0, abs=1e-15)
        assert state.theta_hat[0] == pytest.approx(0.5, abs=1e-15)

    def test_failure_rate_counts(self):
        state = init_estimator_state(d=2, M=3, gamma=1.0)
        X = np.zeros((3, 2))
        state = update_estimators(state, X, encode_observation(0, 1, 3))
        state = update_estimators(state, X, encode_observation(0, 3, 3))
        assert state.N.tolist() == [2, 1, 1]
        assert state.h_hat[0] == pytest.approx(0.5, abs=1e-15)
        assert state.t == 2

    def test_matches_explicit_ridge_minimizer(self):
        # theta_hat == argmin sum of observed squared errors + gamma ||theta||^2
        rng = np.random.default_rng(3)
        d, M, gamma = 4, 3, 2.0
        state = init_estimator_state(d=d, M=M, gamma=gamma)
        rows, zs, ws = [], [], []
        for t in range(12):
            X = rng.normal(size=(M, d)) / math.sqrt(d)
            psi = int(rng.integers(0, 2))
            ups = int(rng.integers(1, M + 1))
            obs = encode_observation(psi, ups, M)
            state = update_estimators(state, X, obs)
            for k in range(M):
                if obs.OZ[k]:
                    rows.append(X[k])
                    zs.append(obs.Z[k])
                    ws.append(1.0)
        A = np.vstack([np.array(rows), math.sqrt(gamma) * np.eye(d)])
        b = np.concatenate([np.array(zs, dtype=float), np.zeros(d)])
        theta_ls, *_ = np.linalg.lstsq(A, b, rcond=None)
        assert np.allclose(state.theta_hat, theta_ls, atol=1e-10)

    def test_gram_matrix_stays_spd(self):
        rng = np.random.default_rng(4)
        state = init_estimator_state(d=3, M=2, gamma=1.0)
        for _ in range(20):
            X = rng.normal(size=(2, 3))
            obs = encode_observation(int(rng.integers(0, 2)), int(rng.integers(1, 3)), 2)
            state = update_estimators(state, X, obs)
        assert np.allclose(state.V, state.V.T, atol=0)
        assert np.linalg.eigvalsh(state.V).min() >= state.gamma - 1e-9


class TestConfidenceRadius:
    def test_cold_start_value(self):
        assert confidence_radius(0, M=5, d=4, gamma=2.0, D=1.5) == pytest.approx(
            1.5 * math.sqrt(2.0), abs=1e-15
        )

    def test_nondecreasing(self):
        vals = [confidence_radius(t, M=3, d=6, gamma=1.0, D=1.0) for t in range(0, 10_001, 97)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_closed_form(self):
        t, M, d, gamma, D = 17, 4, 6, 1.5, 0.9
        expected = 0.5 * math.sqrt(
            d * math.log(1 + t * M / (gamma * d)) + 4 * math.log(t + 1)
        ) + D * math.sqrt(gamma)
        assert confidence_radius(t, M, d, gamma, D) == pytest.approx(expected, abs=1e-15)


class TestOptimisticEstimates:
    def test_cold_start_tail_bound_is_one(self):
        state = init_estimator_state(d=2, M=4, gamma=1.0)
        X = np.eye(2)
        u, G_upper = optimistic_estimates(state, X, rho=confidence_radius(0, 4, 2, 1.0, 1.0))
        assert G_upper.tolist() == [1.0, 1.0, 1.0, 1.0]
        assert np.all((0.0 <= u) & (u <= 1.0))

    def test_projection_clamps_to_one(self):
        state = init_estimator_state(d=2, M=2, gamma=1.0)
        X = np.array([[1.0, 0.0]])
        u, _ = optimistic_estimates(state, X, rho=5.0)
        assert u[0] == 1.0

    def test_bounds_and_monotone_tail(self):
        rng = np.random.default_rng(5)
        state = init_estimator_state(d=3, M=5, gamma=1.0)
        for t in range(1, 60):
            X = rng.normal(size=(5, 3)) / 3.0
            obs = encode_observation(int(rng.integers(0, 2)), int(rng.integers(1, 6)), 5)
            state = update_estimators(state, X, obs)
        u, G_upper = optimistic_estimates(
            state, rng.normal(size=(8, 3)) / 3.0, rho=confidence_radius(state.t, 5, 3, 1.0, 1.0)
        )
        assert np.all((0.0 <= u) & (u <= 1.0))
        assert np.all((0.0 <= G_upper) & (G_upper <= 1.0))
        assert np.all(np.diff(G_upper) <= 1e-15)


class TestRankUcbStep:
    def test_slate_has_m_distinct_products(self):
        rng = np.random.default_rng(6)
        n, d_p, d_c, M = 12, 3, 2, 5
        state = init_estimator_state(d=d_p * d_c, M=M, gamma=1.0)
        prices = rng.uniform(1.0, 10.0, size=n)
        S = rng.normal(size=(n, d_p))
        S /= np.linalg.norm(S, axis=1, keepdims=True)
        y = rng.normal(size=d_c)
        y /= np.linalg.norm(y)
        slate = rank_ucb_step(state, prices, vectorize_all(S, y), M, D=1.0)
        assert len(slate) == M
        assert len(set(slate.tolist())) == M

    def test_single_product_slate(self):
        state = init_estimator_state(d=1, M=1, gamma=1.0)
        slate = rank_ucb_step(state, np.array([3.0]), np.array([[0.5]]), 1, D=1.0)
        assert slate.tolist() == [0]

    def test_cold_start_reduces_to_fixed_span_m_optimum(self):
        # G^U == 1 everywhere, so Best-x lands on the span-M optimum under u.
        rng = np.random.default_rng(7)
        n, M = 10, 4
        state = init_estimator_state(d=4, M=M, gamma=1.0)
        prices = rng.uniform(1.0, 10.0, size=n)
        X = rng.normal(size=(n, 4))
        X /= 2.0 * np.linalg.norm(X, axis=1, keepdims=True)  # norms 0.5
        slate, details = rank_ucb_step(state, prices, X, M, D=0.4, with_details=True)
        assert details.chosen_x == M
        assert np.all(details.G_upper == 1.0)
        order = np.lexsort((np.arange(n), -details.u, -prices))
        values, added = backend.assortopt_steps(
            details.u[order], prices[order], M, backend.TIE_TOL
        )
        expected = order[np.sort(added[:M])]
        assert slate.tolist() == expected.tolist()

    def test_deterministic_and_state_untouched(self):
        rng = np.random.default_rng(8)
        n, M = 9, 3
        state = init_estimator_state(d=4, M=M, gamma=1.0)
        prices = rng.uniform(1.0, 10.0, size=n)
        X = rng.normal(size=(n, 4)) / 4.0
        before = state.V.copy()
        s1 = rank_ucb_step(state, prices, X, M, D=1.0)
        s2 = rank_ucb_step(state, prices, X, M, D=1.0)
        assert s1.tolist() == s2.tolist()
        assert np.array_equal(state.V, before)
        assert state.t == 0
