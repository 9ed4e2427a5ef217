import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oracles import beta_star_bruteforce, beta_star_lp, beta_star_sdp, threshold_errors_eig
from qstein.config import Config
from qstein.divergences import make_pair, psi_derivatives, relative_entropy
from qstein.errors import DimensionCapExceeded, DimensionMismatch, EpsilonOutOfRange, NotPSD
from qstein.neyman_pearson import (
    beta_star,
    fundamental_inequality_check,
    mixed_test,
    np_dominance_check,
    stein_bound,
    stein_sweep,
    threshold_test,
)
from qstein.operators import identity_test, make_test
from qstein.sampling import random_commuting_pair, random_pair, random_test


def _product(p, n):
    return np.array([np.prod(x) for x in itertools.product(p, repeat=n)])


class TestThresholdTest:
    def test_biased_coin_single_copy(self, coin):
        # rho - e^0 sigma = diag(0.25, -0.25): accept the first outcome only
        thr = threshold_test(coin, 1, 0.0)
        assert_allclose(thr.test.matrix, np.diag([1.0, 0.0]), atol=1e-14)
        assert_allclose([thr.alpha, thr.beta], [0.25, 0.5], atol=1e-14)
        assert_allclose(thr.positive_part_trace, 0.25, atol=1e-14)

    def test_very_negative_lambda_accepts_everything(self, qubit_pair):
        thr = threshold_test(qubit_pair, 2, -50.0)
        assert_allclose(thr.test.matrix, np.eye(4), atol=1e-12)
        assert thr.alpha < 1e-12

    def test_large_lambda_rejects_everything(self, qubit_pair):
        thr = threshold_test(qubit_pair, 2, 20.0)
        assert np.abs(thr.test.matrix).max() < 1e-12
        assert thr.beta < 1e-12

    def test_against_eigh_oracle(self, rng):
        for _ in range(20):
            pair = make_pair(*random_pair(rng, 2))
            n = int(rng.integers(1, 4))
            lam = float(rng.uniform(-1, 1))
            thr = threshold_test(pair, n, lam)
            ref = threshold_errors_eig(*pair.tensor(n), lam, n)
            assert_allclose([thr.alpha, thr.beta], ref, atol=1e-10)

    def test_is_projector(self, qubit_pair):
        p = threshold_test(qubit_pair, 3, 0.1).test.matrix
        assert np.abs(p @ p - p).max() < 1e-10

    def test_positive_part_matches_projector(self, qubit_pair):
        thr = threshold_test(qubit_pair, 2, 0.05)
        rho_n, sigma_n = qubit_pair.tensor(2)
        m = rho_n - np.exp(2 * 0.05) * sigma_n
        assert_allclose(thr.positive_part_trace, np.trace(m @ thr.test.matrix).real, atol=1e-12)


class TestInequalities:
    def test_dominance_random(self, rng):
        for _ in range(40):
            pair = make_pair(*random_pair(rng, 2))
            n = int(rng.integers(1, 4))
            lam = float(rng.uniform(-1, 1))
            assert np_dominance_check(pair, n, lam, random_test(rng, 2 ** n)).holds

    def test_dominance_tight_at_threshold(self, qubit_pair):
        thr = threshold_test(qubit_pair, 2, 0.1)
        res = np_dominance_check(qubit_pair, 2, 0.1, thr.test)
        assert abs(res.slack) < 1e-12

    def test_fundamental_random(self, rng):
        for _ in range(40):
            pair = make_pair(*random_pair(rng, 2))
            n = int(rng.integers(1, 4))
            d1, _ = psi_derivatives(pair, 1.0)
            lam = float(rng.uniform(-1, d1 + 1))
            assert fundamental_inequality_check(pair, n, lam, random_test(rng, 2 ** n)).holds

    def test_candidate_dimension(self, coin):
        with pytest.raises(DimensionMismatch):
            np_dominance_check(coin, 2, 0.0, identity_test(2))


class TestBetaStar:
    @pytest.mark.parametrize("eps", [0.0, 0.05, 0.25, 0.5, 0.9])
    def test_biased_coin_lp(self, coin, eps):
        for n in range(1, 7):
            p_n, q_n = _product([0.75, 0.25], n), _product([0.5, 0.5], n)
            pt = beta_star(coin, n, eps)
            assert abs(pt.beta_star - beta_star_lp(p_n, q_n, eps)) < 1e-10
            assert abs(pt.alpha - eps) < 1e-10

    def test_biased_coin_single_copy(self, coin):
        assert_allclose(beta_star(coin, 1, 0.25).beta_star, 0.5, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_bruteforce(self, rng, n):
        p = rng.dirichlet([1.0, 1.0]) * 0.96 + 0.02
        q = rng.dirichlet([1.0, 1.0]) * 0.96 + 0.02
        pair = make_pair(np.diag(p), np.diag(q))
        for eps in (0.1, 0.3):
            ref = beta_star_bruteforce(p, q, n, eps)
            assert abs(beta_star(pair, n, eps).beta_star - ref) < 1e-10

    def test_sdp(self, rng):
        for n in (1, 2):
            pair = make_pair(*random_pair(rng, 2))
            rho_n, sigma_n = pair.tensor(n)
            for eps in (0.05, 0.3):
                ref = beta_star_sdp(rho_n, sigma_n, eps)
                assert abs(beta_star(pair, n, eps).beta_star - ref) < 1e-6

    def test_dense_and_diagonal_paths_agree(self, rng):
        for _ in range(5):
            p = rng.dirichlet([1, 1, 1]) * 0.9 + 0.1 / 3
            q = rng.dirichlet([1, 1, 1]) * 0.9 + 0.1 / 3
            pair = make_pair(np.diag(p), np.diag(q))
            for n in (1, 3):
                a = beta_star(pair, n, 0.2, dense=True)
                b = beta_star(pair, n, 0.2, dense=False)
                assert abs(a.beta_star - b.beta_star) < 1e-11

    def test_rotated_commuting_pair_matches_diagonal(self, rng):
        rho, sigma = random_commuting_pair(rng, 2)
        pair = make_pair(rho, sigma)
        # sigma's spectrum, paired with rho's through rho's eigenbasis
        v = rho.eigenvectors
        diag = make_pair(np.diag(rho.eigenvalues),
                         np.diag(np.real(np.diag(v.conj().T @ sigma.matrix @ v))))
        for n in (1, 2, 3):
            assert abs(beta_star(pair, n, 0.1).beta_star
                       - beta_star(diag, n, 0.1).beta_star) < 1e-10

    def test_dual_certificate(self, rng):
        for _ in range(10):
            pair = make_pair(*random_pair(rng, 2))
            n = int(rng.integers(1, 5))
            pt = beta_star(pair, n, float(rng.uniform(0.01, 0.5)))
            # alpha may exceed epsilon by the 1e-12 bisection slack
            assert -1e-10 <= pt.dual_gap < 1e-9

    def test_mixed_test_reproduces_errors(self, qubit_pair):
        pt = beta_star(qubit_pair, 2, 0.1)
        t = mixed_test(qubit_pair, pt)
        rho_n, sigma_n = qubit_pair.tensor(2)
        assert_allclose([t.alpha(rho_n), t.beta(sigma_n)], [0.1, pt.beta_star], atol=1e-10)

    def test_identical_states(self, qubit_pair):
        pair = make_pair(qubit_pair.rho.matrix, qubit_pair.rho.matrix)
        for n in (1, 2, 3):
            assert_allclose(beta_star(pair, n, 0.2).beta_star, 0.8, atol=1e-10)

    def test_monotone_in_epsilon(self, qubit_pair):
        vals = [beta_star(qubit_pair, 2, e).beta_star for e in np.linspace(0, 0.95, 20)]
        assert np.all(np.diff(vals) <= 1e-12)

    @pytest.mark.parametrize("eps", [-0.1, 1.0, 1.5])
    def test_epsilon_range(self, coin, eps):
        with pytest.raises(EpsilonOutOfRange):
            beta_star(coin, 1, eps)

    def test_dimension_cap(self, qubit_pair):
        with pytest.raises(DimensionCapExceeded):
            beta_star(qubit_pair, 13, 0.1)
        small = make_pair(qubit_pair.rho.matrix, qubit_pair.sigma.matrix,
                          config=Config(dim_cap=8))
        with pytest.raises(DimensionCapExceeded):
            beta_star(small, 4, 0.1)


class TestStein:
    def test_identical_states(self, qubit_pair):
        pair = make_pair(qubit_pair.rho.matrix, qubit_pair.rho.matrix)
        rows = stein_sweep(pair, 0.2, 4, 0.05)
        assert_allclose([r.beta for r in rows], 0.8, atol=1e-10)

    def test_bound_and_dpi(self, coin):
        for row in stein_sweep(coin, 0.05, 10, 0.05):
            assert row.bound_holds and row.weak_converse_holds
            assert row.bound_active == np.isfinite(row.bound)
            if row.bound_active:
                assert row.log_beta_over_n >= row.bound - 1e-12

    def test_bound_formula(self, coin):
        lam = relative_entropy(coin) + 0.05
        assert stein_bound(coin, 1, 0.05, lam) < 0
        assert stein_bound(coin, 10, 0.05, lam) > 0

    def test_delta_positive(self, coin):
        with pytest.raises(ValueError):
            stein_sweep(coin, 0.05, 3, 0.0)


def test_test_matrix_validation():
    with pytest.raises(NotPSD):
        make_test(np.diag([2.0, 0.0]))
