"""The compiled extension and the pure NumPy fallback must agree exactly."""

import numpy as np
import pytest

from rankcascade import _kernels_py

try:
    from rankcascade import _kernels
except ImportError:
    _kernels = None

pytestmark = pytest.mark.skipif(_kernels is None, reason="compiled kernels unavailable")

TOL = 1e-12


def _random_case(rng, n):
    lam = rng.uniform(0.01, 0.99, size=n)
    r = rng.uniform(0.1, 10.0, size=n)
    return lam, r


def test_dp_tableau_identical():
    rng = np.random.default_rng(0)
    for _ in range(25):
        n = int(rng.integers(1, 40))
        lam, r = _random_case(rng, n)
        b = rng.uniform(0.0, 1.0, size=n)
        spans = int(rng.integers(1, n + 1))
        Hc, tc = _kernels.dp_tableau(lam * r, b, spans, TOL)
        Hp, tp = _kernels_py.dp_tableau(lam * r, b, spans, TOL)
        assert np.array_equal(Hc, Hp)
        assert np.array_equal(tc, tp)


def test_dp_extract_identical():
    # Extraction assumes the canonical order: descending a/(1-b) score.
    rng = np.random.default_rng(1)
    for _ in range(25):
        n = int(rng.integers(1, 30))
        lam, r = _random_case(rng, n)
        order = np.argsort(-r)
        lam, r = lam[order], r[order]
        spans = int(rng.integers(1, n + 1))
        _, take = _kernels.dp_tableau(lam * r, 1.0 - lam, spans, TOL)
        a = _kernels.dp_extract(take, spans)
        b = _kernels_py.dp_extract(take, spans)
        assert np.array_equal(a, b)
        assert len(a) == spans


def test_assortopt_steps_identical():
    rng = np.random.default_rng(2)
    for _ in range(25):
        n = int(rng.integers(2, 60))
        lam, r = _random_case(rng, n)
        M = int(rng.integers(1, min(n, 20) + 1))
        vc, ac = _kernels.assortopt_steps(lam, r, M, TOL)
        vp, ap = _kernels_py.assortopt_steps(lam, r, M, TOL)
        assert np.array_equal(ac, ap)
        assert np.array_equal(vc, vp)


def test_best_insertion_identical():
    rng = np.random.default_rng(3)
    for _ in range(40):
        M = int(rng.integers(2, 12))
        m = int(rng.integers(0, M))
        q = int(rng.integers(1, 30))
        cur_lam = rng.uniform(0.01, 0.99, size=m)
        cur_lr = cur_lam * rng.uniform(0.1, 10.0, size=m)
        cand_lam = rng.uniform(0.01, 0.99, size=q)
        cand_lr = cand_lam * rng.uniform(0.1, 10.0, size=q)
        G = np.concatenate([[1.0], np.sort(rng.uniform(0.01, 1.0, size=M - 1))[::-1]])
        vc, cc, pc = _kernels.best_insertion(cur_lam, cur_lr, G, cand_lam, cand_lr, TOL)
        vp, cp, pp = _kernels_py.best_insertion(cur_lam, cur_lr, G, cand_lam, cand_lr, TOL)
        assert (cc, pc) == (cp, pp)
        assert vc == vp


def test_tie_breaking_identical_on_symmetric_input():
    # Exactly tied candidates: both backends must pick the first one.
    lam = np.array([0.5, 0.5, 0.5])
    r = np.array([2.0, 2.0, 2.0])
    for mod in (_kernels, _kernels_py):
        values, added = mod.assortopt_steps(lam, r, 3, TOL)
        assert added.tolist() == [0, 1, 2]
    G = np.array([1.0, 0.5])
    for mod in (_kernels, _kernels_py):
        _, ci, pos = mod.best_insertion(
            np.array([0.5]), np.array([1.0]), G, lam, lam * r, TOL
        )
        assert (ci, pos) == (0, 0)
