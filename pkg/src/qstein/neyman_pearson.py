"""Finite-n threshold tests and the optimal type-II error.

The threshold test ``S_n(lam)`` projects onto the non-negative eigenspace of
``rho^{(x)n} - e^{n lam} sigma^{(x)n}``. Optimal tests under a type-I budget
``epsilon`` are mixtures of two threshold tests on either side of the
critical ``lam``; the value is certified by the lower bound
``beta >= (1 - epsilon - Tr(rho^n - t sigma^n)_+) / t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Config
from .divergences import StatePair, binary_dpi_from_errors, relative_entropy
from .errors import DimensionMismatch, EpsilonOutOfRange
from .exponents import bisect, phi
from .operators import BinaryTest, _frozen, check_dim, dagger, spectral, tensor_power

ALPHA_SLACK = 1e-12
# eigenvalues of rho^n - t sigma^n within this many ulps of ||rho^n|| + t ||sigma^n||
# count as zero and belong to the accepting projector
ZERO_ULPS = 64


@dataclass(frozen=True)
class ThresholdTest:
    n: int
    lam: float
    test: BinaryTest
    alpha: float
    beta: float
    positive_part_trace: float


@dataclass(frozen=True)
class TradeoffPoint:
    n: int
    epsilon: float
    beta_star: float
    alpha: float
    lambda_lo: float
    lambda_hi: float
    mix_weight: float
    dual_bound: float
    dual_gap: float


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    slack: float
    holds: bool


class _DenseFamily:
    """``rho^n - t sigma^n`` as dense matrices."""

    def __init__(self, pair: StatePair, n: int):
        self.config: Config = pair.config
        self.rho_n, self.sigma_n = pair.tensor(n)
        self.dim = self.rho_n.shape[0]
        self.rho_norm = float(pair.rho_eigs.max() ** n)
        self.sigma_norm = float(pair.sigma_eigs.max() ** n)

    def zero_tol(self, t: float) -> float:
        return ZERO_ULPS * np.finfo(float).eps * (self.rho_norm + t * self.sigma_norm)

    def shifted(self, t: float) -> np.ndarray:
        m = self.rho_n - t * self.sigma_n
        return (m + dagger(m)) / 2

    def projector(self, t: float):
        tol = self.zero_tol(t)
        dec = spectral(self.shifted(t), degeneracy_tol=tol, config=self.config)
        keep = dec.eigenvalues >= -tol
        v = dec.select(keep)
        pos = float(np.sum(dec.eigenvalues[keep] * dec.multiplicities[keep]))
        return v, pos

    def errors(self, t: float) -> tuple[float, float, float]:
        v, pos = self.projector(t)
        accept_rho = float(np.real(np.einsum("ij,ik,kj->", v.conj(), self.rho_n, v)))
        accept_sigma = float(np.real(np.einsum("ij,ik,kj->", v.conj(), self.sigma_n, v)))
        return _clip01(1.0 - accept_rho), _clip01(accept_sigma), pos

    def positive_part(self, t: float) -> float:
        w = np.linalg.eigvalsh(self.shifted(t))
        return float(np.sum(w[w > 0]))


class _DiagonalFamily:
    """Same interface for jointly diagonal ``rho`` and ``sigma``; never densifies."""

    def __init__(self, pair: StatePair, n: int):
        self.config = pair.config
        check_dim(pair.dim ** n, pair.config.dim_cap)
        p = np.real(np.diag(pair.rho.matrix))
        q = np.real(np.diag(pair.sigma.matrix))
        self.p_n = tensor_power(p, n, pair.config.dim_cap)
        self.q_n = tensor_power(q, n, pair.config.dim_cap)
        self.dim = self.p_n.size
        self.rho_norm = float(self.p_n.max())
        self.sigma_norm = float(self.q_n.max())

    zero_tol = _DenseFamily.zero_tol

    def errors(self, t: float) -> tuple[float, float, float]:
        mu = self.p_n - t * self.q_n
        keep = mu >= -self.zero_tol(t)
        return (_clip01(1.0 - self.p_n[keep].sum()), _clip01(self.q_n[keep].sum()),
                float(mu[keep].sum()))

    def positive_part(self, t: float) -> float:
        mu = self.p_n - t * self.q_n
        return float(mu[mu > 0].sum())


def _clip01(x: float) -> float:
    return float(min(max(x, 0.0), 1.0))


def _family(pair: StatePair, n: int, dense: bool | None = None):
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if dense is None:
        dense = not (pair.rho.is_diagonal(1e-14) and pair.sigma.is_diagonal(1e-14))
    return _DenseFamily(pair, n) if dense else _DiagonalFamily(pair, n)


def threshold_test(pair: StatePair, n: int, lam: float) -> ThresholdTest:
    fam = _DenseFamily(pair, n)
    t = np.exp(n * lam)
    v, pos = fam.projector(t)
    proj = v @ dagger(v)
    test = BinaryTest(_frozen((proj + dagger(proj)) / 2))
    return ThresholdTest(n, lam, test, test.alpha(fam.rho_n), test.beta(fam.sigma_n), pos)


def _check_candidate(pair: StatePair, n: int, candidate: BinaryTest) -> None:
    d = pair.dim ** n
    if candidate.dim != d:
        raise DimensionMismatch(f"candidate acts on {candidate.dim} dims, expected {d}")


def np_dominance_check(pair: StatePair, n: int, lam: float, candidate: BinaryTest,
                       tol: float = 1e-9) -> InequalityCheck:
    """``Tr M S_n(lam) >= Tr M A`` for ``M = rho^n - e^{n lam} sigma^n``."""
    _check_candidate(pair, n, candidate)
    thr = threshold_test(pair, n, lam)
    rho_n, sigma_n = pair.tensor(n)
    m = rho_n - np.exp(n * lam) * sigma_n
    rhs = float(np.real(np.trace(m @ candidate.matrix)))
    lhs = thr.positive_part_trace
    return InequalityCheck(lhs, rhs, lhs - rhs, lhs >= rhs - tol)


def fundamental_inequality_check(pair: StatePair, n: int, lam: float, candidate: BinaryTest,
                                 tol: float = 1e-9) -> InequalityCheck:
    """``1 - alpha <= exp(-n phi(lam)) + exp(n lam) beta``."""
    _check_candidate(pair, n, candidate)
    rho_n, sigma_n = pair.tensor(n)
    lhs = 1.0 - candidate.alpha(rho_n)
    rhs = float(np.exp(-n * phi(pair, lam).phi) + np.exp(n * lam) * candidate.beta(sigma_n))
    return InequalityCheck(lhs, rhs, rhs - lhs, rhs - lhs >= -tol)


def _log_range(pair: StatePair) -> float:
    tol = pair.config.support_tol
    a = pair.rho_eigs[pair.rho_eigs > tol]
    b = pair.sigma_eigs[pair.sigma_eigs > tol]
    return float(np.max(np.abs(np.log(a))) + np.max(np.abs(np.log(b))) + 1.0)


def beta_star(pair: StatePair, n: int, epsilon: float, dual_grid: int = 64,
              dense: bool | None = None) -> TradeoffPoint:
    """Smallest type-II error over all tests with type-I error at most ``epsilon``.

    ``dense=None`` picks the diagonal fast path when both states are diagonal.
    """
    if not 0.0 <= epsilon < 1.0:
        raise EpsilonOutOfRange(f"epsilon must lie in [0, 1), got {epsilon}")
    fam = _family(pair, n, dense)
    cache: dict[float, tuple[float, float, float]] = {}

    def at(lam: float):
        if lam not in cache:
            cache[lam] = fam.errors(float(np.exp(n * lam)))
        return cache[lam]

    width = _log_range(pair)
    lo, hi = -width, width
    while at(lo)[0] > epsilon + ALPHA_SLACK:
        lo -= width
        width *= 2
    while at(hi)[0] <= epsilon + ALPHA_SLACK:
        hi += width
        width *= 2
    grid_lo, grid_hi = lo, hi
    lo, hi = bisect(lambda lam: at(lam)[0] - epsilon - ALPHA_SLACK, lo, hi,
                    pair.config.root_tol)

    a_lo, b_lo, _ = at(lo)
    a_hi, b_hi, _ = at(hi)
    if a_hi - a_lo > 0:
        w = float(np.clip((a_hi - epsilon) / (a_hi - a_lo), 0.0, 1.0))
    else:
        w = 1.0
    alpha = w * a_lo + (1 - w) * a_hi
    beta = w * b_lo + (1 - w) * b_hi

    lams = np.concatenate([np.linspace(grid_lo, grid_hi, dual_grid), [lo, hi, 0.5 * (lo + hi)]])
    bound = -np.inf
    for lam in lams:
        t = float(np.exp(n * lam))
        bound = max(bound, (1.0 - epsilon - fam.positive_part(t)) / t)
    return TradeoffPoint(n, epsilon, beta, alpha, lo, hi, w, bound, beta - bound)


def mixed_test(pair: StatePair, point: TradeoffPoint) -> BinaryTest:
    """Dense operator of the randomized test behind ``point``."""
    s_lo = threshold_test(pair, point.n, point.lambda_lo).test.matrix
    s_hi = threshold_test(pair, point.n, point.lambda_hi).test.matrix
    return BinaryTest(_frozen(point.mix_weight * s_lo + (1 - point.mix_weight) * s_hi))


def stein_bound(pair: StatePair, n: int, epsilon: float, lam: float) -> float:
    """``e^{-n lam} (1 - epsilon - e^{-n phi(lam)})``; may be non-positive."""
    return float(np.exp(-n * lam) * (1.0 - epsilon - np.exp(-n * phi(pair, lam).phi)))


@dataclass(frozen=True)
class SteinRow:
    n: int
    alpha: float
    beta: float
    log_beta_over_n: float
    bound: float  # (1/n) log of the lower bound, nan when the bound is vacuous
    bound_active: bool
    bound_holds: bool
    weak_converse_holds: bool
    dual_gap: float


def stein_sweep(pair: StatePair, epsilon: float, n_max: int, delta: float,
                dense: bool | None = None) -> list[SteinRow]:
    """Exact ``(1/n) log beta*_n(epsilon)`` for ``n = 1..n_max`` beside its lower bound
    evaluated at ``lam = D + delta``."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    big_d = relative_entropy(pair)
    lam = big_d + delta
    rows = []
    for n in range(1, n_max + 1):
        pt = beta_star(pair, n, epsilon, dense=dense)
        raw = stein_bound(pair, n, epsilon, lam)
        active = raw > 0
        log_beta = np.log(pt.beta_star) / n if pt.beta_star > 0 else -np.inf
        log_bound = np.log(raw) / n if active else np.nan
        holds = (not active) or pt.beta_star >= raw * (1 - 1e-9) - 1e-15
        dpi = binary_dpi_from_errors(big_d, pt.alpha, pt.beta_star, n)
        rows.append(SteinRow(n, pt.alpha, pt.beta_star, float(log_beta), float(log_bound),
                             bool(active), bool(holds), dpi.weak_converse_holds and dpi.holds,
                             pt.dual_gap))
    return rows
