"""Relative entropy and the cumulant-type function psi(s) of a state pair.

With eigen-decompositions ``rho = sum_j a_j |u_j><u_j|`` and
``sigma = sum_k b_k |v_k><v_k|`` and overlaps ``W_jk = |<u_j|v_k>|^2``,

    Tr rho^{1+s} sigma^{-s} = sum_jk a_j^{1+s} b_k^{-s} W_jk,

so psi(s) is a log-sum-exp of functions linear in ``s`` and its derivatives
are the mean and variance of ``log a_j - log b_k`` under the normalized
weights. Natural logarithms throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .config import DEFAULT, Config
from .errors import DimensionMismatch, SupportViolation
from .operators import (
    BinaryTest,
    DensityOperator,
    as_density,
    commutator_norm,
    dagger,
    support_condition,
    tensor_power,
)


def logsumexp(x: np.ndarray) -> float:
    # scipy.special.logsumexp costs ~100x more on the tiny arrays used here
    m = np.max(x)
    return float(m + np.log(np.sum(np.exp(x - m))))


@dataclass(frozen=True, eq=False)
class StatePair:
    """Null hypothesis ``rho`` against alternative ``sigma``.

    Construction refuses pairs where the range of ``rho`` is not contained in
    the range of ``sigma``.
    """

    rho: DensityOperator
    sigma: DensityOperator
    config: Config = field(default=DEFAULT)

    def __post_init__(self):
        rho = as_density(self.rho, self.config)
        sigma = as_density(self.sigma, self.config)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "sigma", sigma)
        if rho.dim != sigma.dim:
            raise DimensionMismatch(f"rho is {rho.dim}-dimensional, sigma {sigma.dim}")
        if not support_condition(rho, sigma, self.config):
            raise SupportViolation("support of rho is not contained in support of sigma")

    @property
    def dim(self) -> int:
        return self.rho.dim

    @property
    def rho_eigs(self) -> np.ndarray:
        return self.rho.eigenvalues

    @property
    def sigma_eigs(self) -> np.ndarray:
        return self.sigma.eigenvalues

    @cached_property
    def overlap(self) -> np.ndarray:
        return np.abs(dagger(self.rho.eigenvectors) @ self.sigma.eigenvectors) ** 2

    @cached_property
    def _terms(self):
        # (coefficient log, slope) for every (j, k) with a_j, b_k and W_jk on support
        tol = self.config.support_tol
        a, b, w = self.rho_eigs, self.sigma_eigs, self.overlap
        ja = np.flatnonzero(a > tol)
        kb = np.flatnonzero(b > tol)
        ww = w[np.ix_(ja, kb)]
        keep = ww > 0
        la = np.log(a[ja])[:, None]
        lb = np.log(b[kb])[None, :]
        base = np.broadcast_to(la + np.log(np.where(keep, ww, 1.0)), ww.shape)[keep]
        lr = np.broadcast_to(la - lb, ww.shape)[keep]
        return base, lr

    def weights(self, s: float) -> tuple[np.ndarray, np.ndarray, float]:
        """Normalized weights ``w_jk(s)``, log-ratios ``l_jk`` and ``psi(s)``."""
        base, lr = self._terms
        t = base + s * lr
        lse = float(logsumexp(t))
        return np.exp(t - lse), lr, lse

    @cached_property
    def commutator(self) -> float:
        return commutator_norm(self.rho.matrix, self.sigma.matrix)

    def tensor(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        cap = self.config.dim_cap
        return tensor_power(self.rho.matrix, n, cap), tensor_power(self.sigma.matrix, n, cap)


def make_pair(rho, sigma, config: Config = DEFAULT) -> StatePair:
    return StatePair(as_density(rho, config), as_density(sigma, config), config)


def relative_entropy(pair: StatePair) -> float:
    """``D(rho||sigma) = Tr rho (log rho - log sigma)`` in nats."""
    tol = pair.config.support_tol
    a, b, w = pair.rho_eigs, pair.sigma_eigs, pair.overlap
    ja = a > tol
    kb = b > tol
    neg_entropy = float(np.sum(a[ja] * np.log(a[ja])))
    cross = float(np.sum(w[np.ix_(ja, kb)] * a[ja, None] * np.log(b[kb])[None, :]))
    return max(neg_entropy - cross, 0.0)


def _check_s(s: float, s_max: float) -> None:
    if not -1e-12 <= s <= s_max + 1e-12:
        raise ValueError(f"s={s} outside [0, {s_max}]; pass a larger s_max for diagnostics")


def psi(pair: StatePair, s: float, s_max: float = 1.0) -> float:
    """``log Tr rho^{1+s} sigma^{-s}`` (inverse powers on the support)."""
    _check_s(s, s_max)
    return pair.weights(s)[2]


def psi_derivatives(pair: StatePair, s: float, s_max: float = 1.0) -> tuple[float, float]:
    """Exact ``(psi'(s), psi''(s))``."""
    _check_s(s, s_max)
    w, lr, _ = pair.weights(s)
    mean = float(np.dot(w, lr))
    var = float(np.dot(w, (lr - mean) ** 2))
    return mean, var


def _restricted_logs(pair: StatePair):
    """``log rho`` and ``log sigma`` on the common support, in sigma's eigenbasis."""
    tol = pair.config.support_tol
    ra = pair.rho.support_mask(tol)
    kb = pair.sigma.support_mask(tol)
    if ra.sum() != kb.sum():
        raise SupportViolation("psi_bar needs rho and sigma to share one support")
    v = pair.sigma.eigenvectors[:, kb]
    u = pair.rho.eigenvectors[:, ra]
    # rho's support basis expressed in sigma's support basis
    c = dagger(v) @ u
    log_rho = (c * np.log(pair.rho_eigs[ra])) @ dagger(c)
    log_sigma = np.diag(np.log(pair.sigma_eigs[kb]))
    return (log_rho + dagger(log_rho)) / 2, log_sigma


def psi_bar(pair: StatePair, s: float, s_max: float = 1.0) -> float:
    """``log Tr exp((1+s) log rho - s log sigma)``."""
    _check_s(s, s_max)
    log_rho, log_sigma = _restricted_logs(pair)
    h = (1 + s) * log_rho - s * log_sigma
    return float(logsumexp(np.linalg.eigvalsh((h + dagger(h)) / 2)))


@dataclass(frozen=True)
class DPIResult:
    lhs: float
    rhs: float
    holds: bool
    weak_converse_lhs: float
    weak_converse_rhs: float
    weak_converse_holds: bool


def _xlogy_ratio(x: float, y: float) -> float:
    if x <= 0:
        return 0.0
    if y <= 0:
        return np.inf
    return x * np.log(x / y)


def binary_dpi_from_errors(divergence: float, alpha: float, beta: float, n: int,
                           tol: float = 1e-9) -> DPIResult:
    """Data processing of ``n D`` through the two-outcome measurement.

    Also reports ``(1 - alpha) (1/n) log beta >= -(log 2)/n - D``.
    """
    lhs = n * divergence
    rhs = _xlogy_ratio(alpha, 1 - beta) + _xlogy_ratio(1 - alpha, beta)
    if 1 - alpha <= 0:
        wc_lhs = 0.0
    elif beta <= 0:
        wc_lhs = -np.inf
    else:
        wc_lhs = (1 - alpha) * np.log(beta) / n
    wc_rhs = -np.log(2) / n - divergence
    return DPIResult(lhs, rhs, bool(lhs >= rhs - tol), wc_lhs, wc_rhs, bool(wc_lhs >= wc_rhs - tol))


def binary_dpi_check(pair: StatePair, test: BinaryTest, n: int) -> DPIResult:
    d = pair.dim ** n
    if test.dim != d:
        raise DimensionMismatch(f"test acts on {test.dim} dims, expected {d}")
    rho_n, sigma_n = pair.tensor(n)
    return binary_dpi_from_errors(relative_entropy(pair), test.alpha(rho_n),
                                  test.beta(sigma_n), n)
