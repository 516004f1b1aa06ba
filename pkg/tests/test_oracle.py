import itertools
import math

import numpy as np
import pytest

from greedycss.errors import DegenerateColumnError, GuardError
from greedycss.matcore import frobenius_sq
from greedycss.objective import coverage_of
from greedycss.oracle import (brute_force_opt, jacobi_eigvalsh, make_random_instance,
                              make_tight_example, pca_upper_bound, spectrum,
                              tight_example_coverage)
from greedycss.select import greedy


def test_brute_force_rank2(rank2):
    r2 = brute_force_opt(rank2, rank2, 2)
    assert r2.opt_set == (0, 1) and r2.opt_value == pytest.approx(6.0)
    assert r2.subsets_evaluated == 3
    assert brute_force_opt(rank2, rank2, 1).opt_value == pytest.approx(3.0)
    assert brute_force_opt(rank2, rank2, 3).opt_value == pytest.approx(6.0)


def test_brute_force_guard():
    B = np.eye(30)
    with pytest.raises(GuardError):
        brute_force_opt(B, B, 10)


def test_brute_force_dominates_enumeration_and_greedy():
    A, B = make_random_instance(7, 6, 6, 4, seed=3, noise=0.1)
    opt = brute_force_opt(A, B, 3)
    for S in itertools.combinations(range(6), 3):
        assert opt.opt_value >= coverage_of(A, B, S) - 1e-10
    assert opt.opt_value >= greedy(A, B, 3).final_coverage - 1e-9


def test_spectrum_examples():
    s = spectrum(np.eye(3), [0, 1, 2])
    assert s.sigma_min == pytest.approx(1.0) and s.sigma_max == pytest.approx(1.0)
    assert s.kappa == pytest.approx(1.0)
    dup = spectrum(np.array([[1.0, 2.0], [0.0, 0.0]]), [0, 1])
    assert dup.sigma_min == 0.0 and math.isinf(dup.kappa)
    B = np.array([[1.0, 0.5], [0.0, math.sqrt(0.75)]])
    s60 = spectrum(B, [0, 1])
    assert s60.sigma_min == pytest.approx(0.5, abs=1e-12)
    assert s60.sigma_max == pytest.approx(1.5, abs=1e-12)
    with pytest.raises(DegenerateColumnError):
        spectrum(np.array([[1.0, 0.0], [0.0, 0.0]]), [0, 1])


def test_spectrum_trace_identity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        B = rng.standard_normal((6, 8))
        S = rng.choice(8, size=int(rng.integers(1, 7)), replace=False)
        s = spectrum(B, S)
        assert sum(s.eigenvalues) == pytest.approx(len(S), abs=1e-9)
        assert 0 <= s.sigma_min <= s.sigma_max


def test_jacobi_matches_numpy():
    rng = np.random.default_rng(1)
    for n in (1, 2, 5, 12, 20):
        X = rng.standard_normal((n, n))
        M = X + X.T
        np.testing.assert_allclose(np.sort(jacobi_eigvalsh(M)), np.linalg.eigvalsh(M),
                                   atol=1e-10)


def test_tight_example_shape_and_opt():
    A, B = make_tight_example(6, 0.5)
    assert B.shape == (7, 7) and A.shape == (7, 1)
    assert coverage_of(A, B, [0, 1]) == pytest.approx(1.0)
    assert tight_example_coverage(0.5, 1) == pytest.approx(0.5)


def test_tight_example_greedy_avoids_pair():
    for theta in (0.3, 0.5, 0.7):
        A, B = make_tight_example(12, theta)
        res = greedy(A, B, 11)
        assert not set(res.chosen) & {0, 1}
        for t, c in enumerate(res.coverage_trace, start=1):
            assert c == pytest.approx(tight_example_coverage(theta, t), abs=1e-9)


def test_pca_examples(rank2):
    assert pca_upper_bound(np.eye(3), 2) == pytest.approx(2.0, abs=1e-9)
    u, v = np.arange(1.0, 5.0), np.array([1.0, -2.0, 0.5])
    R1 = np.outer(u, v)
    assert pca_upper_bound(R1, 1) == pytest.approx(frobenius_sq(R1), rel=1e-9)
    assert abs(pca_upper_bound(rank2, 2) - 6.0) <= 1e-9


def test_pca_matches_svd_and_dominates_css():
    for seed in range(5):
        A, _ = make_random_instance(9, 7, 7, 5, seed=seed, noise=0.2)
        sv = np.linalg.svd(A, compute_uv=False) ** 2
        for k in (1, 2, 3):
            p = pca_upper_bound(A, k)
            assert p == pytest.approx(sv[:k].sum(), rel=1e-8)
            assert p >= brute_force_opt(A, A, k).opt_value - 1e-8


def test_pca_guard():
    with pytest.raises(GuardError):
        pca_upper_bound(np.ones((501, 501)), 1)


def test_random_instance():
    A, B = make_random_instance(6, 5, 5, 1, seed=3)
    assert pca_upper_bound(A, 1) == pytest.approx(frobenius_sq(A), rel=1e-9)
    A2, B2 = make_random_instance(6, 5, 5, 1, seed=3)
    assert np.array_equal(A, A2) and np.array_equal(B, B2)
    A3, _ = make_random_instance(8, 6, 6, 3, seed=4)
    assert brute_force_opt(A3, A3, 3).opt_value == pytest.approx(frobenius_sq(A3), rel=1e-8)
    A4, B4 = make_random_instance(5, 3, 7, 2, seed=1, independent_b=True)
    assert A4.shape == (5, 3) and B4.shape == (5, 7)
