"""Randomized property sweeps over the inequalities and identities of the library.

Each suite draws its own instances from a seeded generator and reports the
worst slack (non-negative means the property held). A failing draw is kept
as a JSON-serializable counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import classical
from .divergences import (
    StatePair,
    binary_dpi_check,
    make_pair,
    psi,
    psi_bar,
    psi_derivatives,
    relative_entropy,
)
from .exponents import strong_converse_exponent
from .neyman_pearson import beta_star, fundamental_inequality_check, np_dominance_check
from .operators import matrix_to_dict
from .sampling import (
    random_commuting_pair,
    random_distribution,
    random_pair,
    random_test,
)


@dataclass
class SuiteResult:
    name: str
    count: int = 0
    worst_slack: float = np.inf
    tolerance: float = 0.0
    counterexample: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def record(self, slack: float, witness) -> None:
        self.count += 1
        self.worst_slack = min(self.worst_slack, slack)
        if slack < -self.tolerance and self.counterexample is None:
            self.counterexample = {"suite": self.name, "slack": slack, **witness()}


def _pair_doc(pair: StatePair) -> dict:
    return {"rho": matrix_to_dict(pair.rho.matrix), "sigma": matrix_to_dict(pair.sigma.matrix)}


def _lambda_range(pair: StatePair, rng) -> float:
    d1, _ = psi_derivatives(pair, 1.0)
    return float(rng.uniform(-1.0, d1 + 1.0))


def suite_np_tests(rng, count: int, sign: float = 1.0) -> list[SuiteResult]:
    """Threshold-test dominance, the error-tradeoff inequality and binary data
    processing on shared random (pair, test, lam, n) draws."""
    dominance = SuiteResult("threshold_dominance", tolerance=1e-9)
    tradeoff = SuiteResult("error_tradeoff", tolerance=1e-9)
    dpi = SuiteResult("binary_dpi", tolerance=1e-9)
    for _ in range(count):
        pair = make_pair(*random_pair(rng, 2))
        n = int(rng.integers(1, 4))
        lam = _lambda_range(pair, rng)
        test = random_test(rng, 2 ** n)

        def witness(pair=pair, n=n, lam=lam, test=test):
            return {**_pair_doc(pair), "n": n, "lambda": lam, "test": matrix_to_dict(test.matrix)}

        dominance.record(sign * np_dominance_check(pair, n, lam, test).slack, witness)
        tradeoff.record(sign * fundamental_inequality_check(pair, n, lam, test).slack, witness)
        res = binary_dpi_check(pair, test, n)
        wc = res.weak_converse_lhs - res.weak_converse_rhs
        dpi.record(sign * min(res.lhs - res.rhs, wc), witness)
    return [dominance, tradeoff, dpi]


def suite_golden_thompson(rng, count: int, sign: float = 1.0) -> SuiteResult:
    out = SuiteResult("golden_thompson", tolerance=1e-10)
    grid = np.linspace(0.0, 1.0, 101)
    max_gap = 0.0
    for i in range(count):
        rho, sigma = random_commuting_pair(rng, 2) if i % 5 == 0 else random_pair(rng, 2)
        pair = make_pair(rho, sigma)
        gaps = np.array([psi(pair, s) - psi_bar(pair, s) for s in grid])
        commuting = pair.commutator < 1e-10
        equal = float(np.max(np.abs(gaps))) < 1e-10
        max_gap = max(max_gap, float(gaps.max()))
        # equality on the grid exactly for commuting pairs
        mismatch = -1.0 if commuting != equal else 0.0
        out.record(sign * min(float(gaps.min()), mismatch),
                   lambda pair=pair: {**_pair_doc(pair), "grid": "101 points on [0, 1]"})
    out.extra["max_gap"] = max_gap
    return out


def suite_additivity(rng, count: int, sign: float = 1.0) -> SuiteResult:
    out = SuiteResult("additivity", tolerance=0.0)
    for _ in range(count):
        pair = make_pair(*random_pair(rng, 2))
        n = int(rng.integers(2, 5))
        s = float(rng.uniform(0, 1))
        big = make_pair(*pair.tensor(n))
        err = abs(psi(big, s) - n * psi(pair, s))
        out.record(sign * (1e-8 * n - err),
                   lambda pair=pair, n=n, s=s: {**_pair_doc(pair), "n": n, "s": s})
    return out


def suite_commuting_reduction(rng, count: int, n_max: int = 6,
                              sign: float = 1.0) -> SuiteResult:
    out = SuiteResult("commuting_reduction", tolerance=0.0)
    for i in range(count):
        d = 2 if i % 2 == 0 else 3
        p = random_distribution(rng, d, floor=0.02)
        q = random_distribution(rng, d, floor=0.02)
        pair = make_pair(np.diag(p), np.diag(q))
        n = int(rng.integers(1, n_max + 1))
        eps = float(rng.uniform(0.0, 0.5))
        quantum = beta_star(pair, n, eps).beta_star
        exact = classical.finite_n_optimal(p, q, n, epsilon=eps).value
        out.record(sign * (1e-9 - abs(quantum - exact)),
                   lambda p=p, q=q, n=n, eps=eps: {"p": p.tolist(), "q": q.tolist(),
                                                  "n": n, "epsilon": eps})
    return out


def suite_pythagorean(rng, count: int, sign: float = 1.0) -> SuiteResult:
    out = SuiteResult("pythagorean", tolerance=0.0)
    for _ in range(count):
        k = int(rng.integers(2, 4))
        p = random_distribution(rng, k, floor=0.05)
        q = random_distribution(rng, k, floor=0.05)
        p_hat = random_distribution(rng, k, floor=0.05)
        t = classical.match_tilt(p, q, p_hat)
        res = classical.pythagorean_check(p, q, p_hat, t)
        err = max(abs(res.lhs - res.rhs), abs(res.lhs_p - res.rhs_p))
        out.record(sign * (1e-8 - err),
                   lambda p=p, q=q, p_hat=p_hat, t=t: {"p": p.tolist(), "q": q.tolist(),
                                                      "p_hat": p_hat.tolist(), "t": t})
    return out


def suite_representation(rng, count: int, sign: float = 1.0) -> SuiteResult:
    """Max form against parametric form of the strong-converse exponent, plus the
    fixed-point residual, at interior rates."""
    out = SuiteResult("representation", tolerance=0.0)
    for _ in range(count):
        pair = make_pair(*random_pair(rng, 2))
        d0, _ = psi_derivatives(pair, 0.0)
        d1, _ = psi_derivatives(pair, 1.0)
        hi = 2 * d1 - psi(pair, 1.0)
        r = float(rng.uniform(d0, hi))
        res = strong_converse_exponent(pair, r)
        slack = min(1e-8 - abs(res.u_parametric - res.u_maxform), 1e-9 - abs(res.residual))
        out.record(sign * slack, lambda pair=pair, r=r: {**_pair_doc(pair), "r": r})
    return out


def run_all(seed: int = 0, count: int = 40, corrupt: bool = False) -> list[SuiteResult]:
    """Run every suite. ``corrupt`` negates all slacks (harness self-test)."""
    rng = np.random.default_rng(seed)
    sign = -1.0 if corrupt else 1.0
    results = suite_np_tests(rng, count, sign)
    results.append(suite_golden_thompson(rng, count, sign))
    results.append(suite_additivity(rng, count, sign))
    results.append(suite_commuting_reduction(rng, max(count // 2, 1), sign=sign))
    results.append(suite_pythagorean(rng, count, sign))
    results.append(suite_representation(rng, count, sign))
    return results


def relative_entropy_crosscheck(pair: StatePair) -> float:
    """``|D - psi'(0)|``."""
    return abs(relative_entropy(pair) - psi_derivatives(pair, 0.0)[0])
