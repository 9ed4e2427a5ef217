"""Acceptance criteria, each run at its stated tolerance.

Every test records one line into ``ACCEPTANCE``; the lines are printed in the
terminal summary.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from oracles import kl_plain, psi_direct, relative_entropy_logm, u_min_form_grid
from qstein import classical
from qstein.cli import main
from qstein.config import Config
from qstein.divergences import (
    binary_dpi_check,
    make_pair,
    psi,
    psi_bar,
    psi_derivatives,
    relative_entropy,
)
from qstein.exponents import strong_converse_exponent
from qstein.neyman_pearson import (
    beta_star,
    fundamental_inequality_check,
    np_dominance_check,
    stein_bound,
)
from qstein.sampling import random_commuting_pair, random_pair, random_test

SWEEP = 500


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    assert ok, detail


@pytest.fixture(scope="module")
def draws():
    rng = np.random.default_rng(1)
    out = []
    for _ in range(SWEEP):
        pair = make_pair(*random_pair(rng, 2))
        n = int(rng.integers(1, 4))
        d1, _ = psi_derivatives(pair, 1.0)
        lam = float(rng.uniform(-1.0, d1 + 1.0))
        out.append((pair, n, lam, random_test(rng, 2 ** n)))
    return out


def test_1_fundamental_inequality_sweep(draws):
    start = time.perf_counter()
    worst = min(fundamental_inequality_check(pair, n, lam, test).slack
                for pair, n, lam, test in draws)
    elapsed = time.perf_counter() - start
    record("1 fundamental inequality sweep", worst >= -1e-9 and elapsed < 30,
           f"{len(draws)} draws, worst slack {worst:.3e}, {elapsed:.1f} s")


def test_2_threshold_dominance_sweep(draws):
    worst = min(np_dominance_check(pair, n, lam, test).slack for pair, n, lam, test in draws)
    record("2 threshold-test dominance sweep", worst >= -1e-9,
           f"{len(draws)} draws, worst slack {worst:.3e}")


def test_3_derivative_identities():
    rng = np.random.default_rng(3)
    h = 1e-5
    w0 = w_d = w_fd1 = w_fd2 = 0.0
    for _ in range(50):
        pair = make_pair(*random_pair(rng, int(rng.integers(2, 5))))
        w0 = max(w0, abs(psi(pair, 0.0)))
        d_ref = relative_entropy_logm(pair.rho.matrix, pair.sigma.matrix)
        w_d = max(w_d, abs(psi_derivatives(pair, 0.0)[0] - d_ref),
                  abs(relative_entropy(pair) - d_ref))
        for s in rng.uniform(h, 1 - h, 3):
            d1, d2 = psi_derivatives(pair, s)
            fd1 = (psi(pair, s + h) - psi(pair, s - h)) / (2 * h)
            fd2 = (psi_derivatives(pair, s + h)[0] - psi_derivatives(pair, s - h)[0]) / (2 * h)
            w_fd1 = max(w_fd1, abs(d1 - fd1))
            w_fd2 = max(w_fd2, abs(d2 - fd2))
    ok = w0 < 1e-12 and w_d < 1e-9 and w_fd1 < 1e-6 and w_fd2 < 1e-6
    record("3 derivative identities", ok,
           f"|psi(0)| {w0:.1e}, |psi'(0)-D| {w_d:.1e}, "
           f"psi' fd {w_fd1:.1e}, psi'' fd {w_fd2:.1e}")


def test_4_representation_equivalence():
    rng = np.random.default_rng(4)
    w_rep = w_res = 0.0
    count = 0
    while count < 100:
        pair = make_pair(*random_pair(rng, 2))
        d0, _ = psi_derivatives(pair, 0.0)
        d1, _ = psi_derivatives(pair, 1.0)
        hi = 2 * d1 - psi(pair, 1.0)
        if hi - d0 < 1e-6:
            continue
        r = float(rng.uniform(d0, hi))
        res = strong_converse_exponent(pair, r)
        assert res.regime == "interior"
        w_rep = max(w_rep, abs(res.u_parametric - res.u_maxform))
        w_res = max(w_res, abs(res.residual))
        count += 1
    record("4 representation equivalence", w_rep < 1e-8 and w_res < 1e-9,
           f"100 interior draws, |u_par - u_max| {w_rep:.1e}, residual {w_res:.1e}")


def test_5_commuting_reduction():
    rng = np.random.default_rng(5)
    config = Config(dim_cap=3 ** 8)
    worst = 0.0
    for i in range(20):
        d = 2 if i % 2 == 0 else 3
        rho, sigma = random_commuting_pair(rng, d, diagonal=True)
        pair = make_pair(rho, sigma, config)
        p = np.real(np.diag(pair.rho.matrix))
        q = np.real(np.diag(pair.sigma.matrix))
        for n in range(1, 9):
            eps = float(rng.uniform(0.0, 0.5))
            quantum = beta_star(pair, n, eps).beta_star
            exact = classical.finite_n_optimal(p, q, n, epsilon=eps).value
            worst = max(worst, abs(quantum - exact))
    record("5 commuting reduction", worst < 1e-9,
           f"20 pairs x n=1..8, max |quantum - classical| {worst:.1e}")


def test_6_stein_sandwich(coin):
    eps, lam = 0.05, relative_entropy(coin) + 0.05
    big_d = relative_entropy(coin)
    values, bound_ok = [], True
    for n in range(1, 11):
        b = beta_star(coin, n, eps).beta_star
        raw = stein_bound(coin, n, eps, lam)
        if raw > 0:
            bound_ok &= b >= raw * (1 - 1e-12)
        values.append(np.log(b) / n)
    values = np.array(values)
    final_gap = abs(values[-1] + big_d)
    monotone = bool(np.all(np.diff(values[1:]) <= 0))
    ok = bound_ok and final_gap < 0.05 and monotone
    record("6 Stein sandwich (biased coin)", ok,
           f"bound holds where active: {bound_ok}; |(1/10)log beta* + D| = {final_gap:.4f} "
           f"(target 0.05); monotone after n=2: {monotone}; "
           f"sequence {np.array2string(values, precision=4)}")


def test_7_strong_converse_trend():
    p, q, r = [0.75, 0.25], [0.5, 0.5], 0.2
    start = time.perf_counter()
    target = classical.u_tilde(p, q, r).parametric
    errs = {}
    for n in (50, 100, 200):
        res = classical.finite_n_optimal(p, q, n, rate=r)
        errs[n] = abs(-res.log_accept / n - target) / target
    elapsed = time.perf_counter() - start
    improving = errs[50] > errs[100] > errs[200]
    ok = errs[200] < 0.15 and improving and elapsed < 60
    detail = ", ".join(f"n={n}: {100 * e:.1f}%" for n, e in errs.items())
    record("7 strong converse trend", ok,
           f"u~(0.2)={target:.6f}; relative error {detail} (target 15% at n=200); "
           f"improving: {improving}; {elapsed:.1f} s")


def test_8_golden_thompson():
    rng = np.random.default_rng(8)
    grid = np.linspace(0.0, 1.0, 101)
    worst, max_gap, mismatches = np.inf, 0.0, 0
    for i in range(50):
        rho, sigma = random_commuting_pair(rng, 2) if i % 5 == 0 else random_pair(rng, 2)
        pair = make_pair(rho, sigma)
        gaps = np.array([psi(pair, s) - psi_bar(pair, s) for s in grid])
        worst = min(worst, gaps.min())
        max_gap = max(max_gap, gaps.max())
        commuting = pair.commutator < 1e-10
        mismatches += commuting != (np.abs(gaps).max() < 1e-10)
    ok = worst >= -1e-12 and mismatches == 0 and max_gap > 1e-4
    record("8 Golden-Thompson ordering", ok,
           f"min gap {worst:.1e}, equality/commutation mismatches {mismatches}, "
           f"max gap {max_gap:.2e}")


def test_9_tilted_family_suite():
    rng = np.random.default_rng(9)
    pyth = 0.0
    for _ in range(100):
        k = int(rng.integers(2, 4))
        p, q, p_hat = (rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k for _ in range(3))
        res = classical.pythagorean_check(p, q, p_hat, classical.match_tilt(p, q, p_hat))
        pyth = max(pyth, abs(res.lhs - res.rhs), abs(res.lhs_p - res.rhs_p))

    # the tilted point minimizes D(.||p) on its sphere {x : D(x||q) = D(p(s)||q)}
    minimal = True
    for k, step in ((2, 1e-4), (3, 2e-3)):
        p = rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k
        q = rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k
        ticks = np.arange(0.0, 1.0 + step / 2, step)
        if k == 2:
            xs = [np.array([a, 1 - a]) for a in ticks]
        else:
            xs = [np.array([a, b, max(1 - a - b, 0.0)])
                  for a in ticks for b in ticks[ticks <= 1 - a + 1e-12]]
        for s in (0.3, 1.0, 2.0):
            pt = classical.tilted(p, q, s)
            slack = 5 * step
            near = [x for x in xs if abs(kl_plain(x, q) - pt.d_to_q) < slack]
            minimal &= bool(near) and min(kl_plain(x, p) for x in near) >= pt.d_to_p - 2 * slack

    p, q = [0.75, 0.25], [0.5, 0.5]
    u = classical.u_tilde(p, q, 0.2)
    grid = u_min_form_grid(p, q, 0.2, 1e-4)
    par_max = abs(u.parametric - u.max_form)
    par_grid = abs(u.parametric - grid)
    ok = pyth < 1e-8 and minimal and par_max < 1e-7 and par_grid < 2e-4
    record("9 tilted-family suite", ok,
           f"Pythagorean {pyth:.1e} over 100 draws; sphere minimality {minimal}; "
           f"|par - max| {par_max:.1e}; |par - grid| {par_grid:.1e}")


def test_10_binary_dpi(draws):
    bad = 0
    for pair, n, _, test in draws:
        res = binary_dpi_check(pair, test, n)
        bad += not (res.holds and res.weak_converse_holds)
    record("10 binary data processing", bad == 0,
           f"{len(draws)} tests, {bad} violations")


def test_11_verify_across_seeds(tmp_path, capsys):
    start = time.perf_counter()
    codes = [main(["verify", "--seed", str(seed), "--counterexample",
                   str(tmp_path / f"ce{seed}.json")]) for seed in range(10)]
    capsys.readouterr()
    elapsed = time.perf_counter() - start
    record("11 verify across seeds", all(c == 0 for c in codes),
           f"exit codes {codes}, {elapsed:.1f} s")
