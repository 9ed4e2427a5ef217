"""Finite-alphabet hypothesis testing: tilted families and exact type-class tests.

The tilted family through ``p`` away from ``q`` is

    p(s)_j = exp(-psi(s)) p_j^{1+s} q_j^{-s},   psi(s) = log sum_j p_j^{1+s} q_j^{-s},

with ``psi'(s) = eta(s) = E_{p(s)} log(p/q)``. The strong-converse exponent
``u(r)`` has a parametric form at the root of ``D(p(s)||q) = r`` and a max
form over ``s >= 0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb, exp, log
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from .config import DEFAULT, Config
from .errors import (
    DegenerateFamily,
    ExpectationMismatch,
    InvalidDistribution,
    RateUnreachable,
    SupportViolation,
    TypeCapExceeded,
)
from .divergences import logsumexp
from .exponents import bisect


def distribution(probs, tol: float = 1e-12) -> np.ndarray:
    """Validate a probability vector; returns a float copy."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistribution(f"expected a non-empty 1-d vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidDistribution(f"non-finite entry in {p}")
    if np.any(p < 0):
        raise InvalidDistribution(f"negative probability in {p}")
    if abs(p.sum() - 1.0) > tol:
        raise InvalidDistribution(f"probabilities sum to {p.sum()!r}")
    return p


def load_distribution(source) -> np.ndarray:
    """A JSON array given inline or as a file path."""
    text = str(source)
    if not text.lstrip().startswith("["):
        text = Path(source).read_text()
    return distribution(json.loads(text))


def _support_pair(p, q):
    p, q = distribution(p), distribution(q)
    if p.size != q.size:
        raise InvalidDistribution(f"alphabet sizes {p.size} and {q.size} differ")
    if np.any((p > 0) & (q == 0)):
        raise SupportViolation("p is not absolutely continuous with respect to q")
    return p, q


def kl(p, q) -> float:
    """``sum_j p_j log(p_j / q_j)`` with ``0 log 0 = 0``."""
    p, q = _support_pair(p, q)
    m = p > 0
    return max(float(np.sum(p[m] * np.log(p[m] / q[m]))), 0.0)


@dataclass(frozen=True)
class TiltedPoint:
    s: float
    probs: np.ndarray
    psi_tilde: float
    eta: float
    eta_prime: float
    d_to_q: float
    d_to_p: float


def _tilt(p: np.ndarray, q: np.ndarray, s: float) -> TiltedPoint:
    m = p > 0
    lr = np.log(p[m]) - np.log(q[m])
    t = np.log(p[m]) + s * lr
    lse = float(logsumexp(t))
    w = np.exp(t - lse)
    probs = np.zeros_like(p)
    probs[m] = w
    eta = float(np.dot(w, lr))
    var = float(np.dot(w, (lr - eta) ** 2))
    return TiltedPoint(s, probs, lse, eta, var, kl(probs, q), kl(probs, p))


def tilted(p, q, s: float) -> TiltedPoint:
    if s < 0:
        raise ValueError(f"tilt parameter must be non-negative, got {s}")
    p, q = _support_pair(p, q)
    return _tilt(p, q, s)


def _log_ratio_spread(p, q) -> float:
    m = p > 0
    lr = np.log(p[m] / q[m])
    return float(lr.max() - lr.min())


def solve_rate(p, q, r: float, config: Config = DEFAULT) -> TiltedPoint:
    """Tilted point with ``D(p(s)||q) = r``, ``s >= 0``."""
    p, q = _support_pair(p, q)
    base = _tilt(p, q, 0.0)
    if abs(r - base.d_to_q) <= 1e-12:
        return base
    if r < base.d_to_q:
        raise RateUnreachable(f"r={r} is below D(p||q)={base.d_to_q}")
    if _log_ratio_spread(p, q) <= 1e-14:
        raise DegenerateFamily("log(p/q) is constant on the support of p")

    def excess(s):
        return _tilt(p, q, s).d_to_q - r

    hi = 1.0
    while excess(hi) < 0:
        if hi >= config.s_cap:
            raise RateUnreachable(
                f"D(p(s)||q) stays below r={r} up to s_cap={config.s_cap}")
        hi = min(2 * hi, config.s_cap)
    lo, hi = bisect(excess, 0.0, hi, 0.0)
    pt = min((_tilt(p, q, lo), _tilt(p, q, hi)), key=lambda x: abs(x.d_to_q - r))
    return pt


@dataclass(frozen=True)
class UTilde:
    r: float
    s: float
    min_form: float
    parametric: float
    max_form: float
    supremum_not_attained: bool = False


def u_max_form(p, q, r: float, s_upper: float | None = None,
               config: Config = DEFAULT) -> tuple[float, float]:
    """``max_{0 <= s <= s_upper} (s r - psi(s)) / (1 + s)`` and its maximizer.

    Uses the stationarity condition ``r + psi(s) - (1+s) psi'(s) = 0``, whose
    left side decreases in ``s``.
    """
    p, q = _support_pair(p, q)

    def g(s):
        return (s * r - _tilt(p, q, s).psi_tilde) / (1 + s)

    def h(s):
        pt = _tilt(p, q, s)
        return r + pt.psi_tilde - (1 + s) * pt.eta

    cap = config.s_cap if s_upper is None else s_upper
    if h(0.0) <= 0:
        return g(0.0), 0.0
    if h(cap) >= 0:
        return g(cap), cap
    lo, hi = bisect(h, 0.0, cap, 0.0, increasing=False)
    s = 0.5 * (lo + hi)
    return g(s), s


def u_tilde(p, q, r: float, config: Config = DEFAULT) -> UTilde:
    """Three evaluations of the classical strong-converse exponent at rate ``r``.

    ``min_form`` evaluates ``D(p'||p) + r - D(p'||q)`` at the tilted point,
    ``parametric`` is ``s eta(s) - psi(s)`` and ``max_form`` maximizes over
    ``s >= 0``. When ``log(p/q)`` is constant the family does not move and the
    max form is a supremum approached as ``s -> inf``.
    """
    p, q = _support_pair(p, q)
    if _log_ratio_spread(p, q) <= 1e-14:
        c = float(np.log(p[p > 0][0] / q[p > 0][0]))
        if r < c - 1e-12:
            raise RateUnreachable(f"r={r} is below D(p||q)={c}")
        value = max(r - c, 0.0)
        return UTilde(r, np.inf, value, np.nan, value, supremum_not_attained=value > 0)
    pt = solve_rate(p, q, r, config)
    min_form = kl(pt.probs, p) + r - kl(pt.probs, q)
    parametric = pt.s * pt.eta - pt.psi_tilde
    mx, _ = u_max_form(p, q, r, config=config)
    return UTilde(r, pt.s, min_form, parametric, mx)


def match_tilt(p, q, p_hat) -> float:
    """The ``t`` (any sign) with ``eta(t) = E_{p_hat} log(p/q)``."""
    p, q = _support_pair(p, q)
    p_hat = distribution(p_hat)
    if np.any((p_hat > 0) & (p == 0)):
        raise SupportViolation("p_hat is not absolutely continuous with respect to p")
    m = p > 0
    target = float(np.dot(p_hat[m], np.log(p[m] / q[m])))

    def f(t):
        return _tilt(p, q, t).eta - target

    lo, hi = -1.0, 1.0
    while f(lo) > 0:
        lo *= 2
        if lo < -1e4:
            raise ExpectationMismatch("target expectation sits at the edge of the family")
    while f(hi) < 0:
        hi *= 2
        if hi > 1e4:
            raise ExpectationMismatch("target expectation sits at the edge of the family")
    lo, hi = bisect(f, lo, hi, 0.0)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PythagoreanResult:
    lhs: float
    rhs: float
    holds: bool
    lhs_p: float
    rhs_p: float
    holds_p: bool


def pythagorean_check(p, q, p_hat, t: float, tol: float = 1e-8) -> PythagoreanResult:
    """``D(p'||q) = D(p'||p(t)) + D(p(t)||q)`` and the same with ``q`` replaced
    by ``p``, valid when ``p'`` and ``p(t)`` give ``log(p/q)`` the same mean."""
    p, q = _support_pair(p, q)
    p_hat = distribution(p_hat)
    if np.any((p_hat > 0) & (p == 0)):
        raise SupportViolation("p_hat is not absolutely continuous with respect to p")
    pt = _tilt(p, q, t)
    m = p > 0
    e_hat = float(np.dot(p_hat[m], np.log(p[m] / q[m])))
    if abs(e_hat - pt.eta) > 1e-8:
        raise ExpectationMismatch(f"E_p_hat log(p/q) = {e_hat} but eta({t}) = {pt.eta}")
    d_hat_t = kl(p_hat, pt.probs)
    lhs, rhs = kl(p_hat, q), d_hat_t + pt.d_to_q
    lhs_p, rhs_p = kl(p_hat, p), d_hat_t + pt.d_to_p
    return PythagoreanResult(lhs, rhs, abs(lhs - rhs) < tol, lhs_p, rhs_p, abs(lhs_p - rhs_p) < tol)


# --- exact finite-n optimal tests over type classes --------------------------

def _compositions(n: int, k: int):
    """All ``k``-part compositions of ``n`` (stars and bars)."""
    for bars in combinations(range(n + k - 1), k - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + k - 1 - prev - 1)
        yield out


def type_classes(p, q, n: int, config: Config = DEFAULT):
    """Counts, log p^n-mass and log q^n-mass of every type class of length ``n``."""
    p, q = _support_pair(p, q)
    k = p.size
    if k > 4:
        raise TypeCapExceeded(f"alphabet size {k} exceeds 4")
    count = comb(n + k - 1, k - 1)
    if count > config.type_cap:
        raise TypeCapExceeded(f"{count} type classes exceed type_cap={config.type_cap}")
    types = np.array(list(_compositions(n, k)), dtype=float)
    log_mult = gammaln(n + 1) - gammaln(types + 1).sum(axis=1)
    with np.errstate(divide="ignore"):
        lp, lq = np.log(p), np.log(q)
    lp_mass = log_mult + _dot_log(types, lp)
    lq_mass = log_mult + _dot_log(types, lq)
    return types.astype(int), lp_mass, lq_mass


def _dot_log(types: np.ndarray, logs: np.ndarray) -> np.ndarray:
    # 0 * log 0 = 0
    terms = np.where(types > 0, types * np.where(np.isfinite(logs), logs, 0.0), 0.0)
    bad = ((types > 0) & ~np.isfinite(logs)[None, :]).any(axis=1)
    out = terms.sum(axis=1)
    out[bad] = -np.inf
    return out


@dataclass(frozen=True)
class FiniteNResult:
    n: int
    constraint: str  # "epsilon" or "rate"
    value: float  # beta* for epsilon, alpha* for rate
    log_accept: float  # log(1 - alpha) of the optimal test
    alpha: float
    beta: float
    boundary_type: tuple
    boundary_weight: float
    log_ratio_threshold: float


def finite_n_optimal(p, q, n: int, epsilon: float | None = None, rate: float | None = None,
                     config: Config = DEFAULT) -> FiniteNResult:
    """Exact optimal randomized test over ``X^n`` for i.i.d. ``p`` against ``q``.

    With ``epsilon``: minimal ``beta`` subject to ``alpha <= epsilon``.
    With ``rate``: minimal ``alpha`` subject to ``beta <= exp(-n rate)``.
    Types are admitted in decreasing likelihood-ratio order, the boundary type
    fractionally.
    """
    if (epsilon is None) == (rate is None):
        raise ValueError("give exactly one of epsilon and rate")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    types, lp, lq = type_classes(p, q, n, config)
    live = np.isfinite(lq) & np.isfinite(lp)
    types, lp, lq = types[live], lp[live], lq[live]
    with np.errstate(invalid="ignore"):
        ratio = lp - lq
    order = np.lexsort((np.arange(len(ratio)), -ratio))

    if epsilon is not None:
        if not 0.0 <= epsilon < 1.0:
            raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
        return _greedy(n, "epsilon", types, lp, lq, ratio, order, lp, 1.0 - epsilon)
    if rate < 0:
        raise ValueError(f"rate must be non-negative, got {rate}")
    return _greedy(n, "rate", types, lp, lq, ratio, order, lq, exp(-n * rate))


def _greedy(n, kind, types, lp, lq, ratio, order, budget_logs, budget):
    # fill the budget on one measure; p-side accumulates while the q-side is capped
    # or vice versa; log-domain sums keep tiny acceptance masses exact
    acc_p, acc_q = [], []
    used = 0.0
    b_type, b_w, b_ratio = (), 1.0, float("nan")
    for i in order:
        mass = exp(budget_logs[i])
        if kind == "epsilon":
            stop = used + mass >= budget
        else:
            stop = used + mass > budget
        if stop:
            w = (budget - used) / mass if mass > 0 else 0.0
            w = min(max(w, 0.0), 1.0)
            if w > 0:
                acc_p.append(lp[i] + log(w))
                acc_q.append(lq[i] + log(w))
            b_type, b_w, b_ratio = tuple(int(x) for x in types[i]), w, float(ratio[i])
            break
        used += mass
        acc_p.append(lp[i])
        acc_q.append(lq[i])
    log_accept = float(logsumexp(acc_p)) if acc_p else -np.inf
    log_beta = float(logsumexp(acc_q)) if acc_q else -np.inf
    alpha = max(0.0, -float(np.expm1(log_accept))) if np.isfinite(log_accept) else 1.0
    beta = exp(log_beta) if np.isfinite(log_beta) else 0.0
    value = beta if kind == "epsilon" else alpha
    return FiniteNResult(n, kind, value, log_accept, alpha, beta, b_type, b_w, b_ratio)
