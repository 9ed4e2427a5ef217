"""Legendre transform of psi and the strong-converse exponent.

``phi(lam) = max_{0<=s<=1} (lam*s - psi(s))``. For a rate ``r`` the
strong-converse exponent is ``phi(lam*)`` at the fixed point
``phi(lam*) = r - lam*``; it also equals ``max_{0<=s<=1} g(s)`` with
``g(s) = (s r - psi(s)) / (1 + s)``.

All root finding is bisection on functions that are monotone because psi is
convex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .divergences import StatePair, psi, psi_derivatives, relative_entropy
from .errors import InternalInconsistency, NegativeRate


def bisect(f, lo: float, hi: float, tol: float, increasing: bool = True,
           max_iter: int = 400) -> tuple[float, float]:
    """Shrink ``[lo, hi]`` around the sign change of a monotone ``f``.

    Returns the final bracket. ``f(lo) <= 0 <= f(hi)`` is maintained for an
    increasing ``f`` (reversed for a decreasing one).
    """
    sign = 1.0 if increasing else -1.0
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sign * f(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


@dataclass(frozen=True)
class PhiResult:
    lam: float
    phi: float
    s_star: float
    regime: str  # interior | clamped_at_0 | clamped_at_1


@dataclass(frozen=True)
class ExponentResult:
    r: float
    lambda_star: float
    s_star: float
    phi_star: float
    regime: str  # below_D | interior | high_rate
    u_parametric: float
    u_maxform: float
    residual: float
    flat_psi: bool = False


def phi(pair: StatePair, lam: float) -> PhiResult:
    tol = pair.config.root_tol
    d0, _ = psi_derivatives(pair, 0.0)
    if lam <= d0:
        return PhiResult(lam, 0.0, 0.0, "clamped_at_0")
    d1, _ = psi_derivatives(pair, 1.0)
    if lam >= d1:
        return PhiResult(lam, lam - psi(pair, 1.0), 1.0, "clamped_at_1")
    lo, hi = bisect(lambda s: psi_derivatives(pair, s)[0] - lam, 0.0, 1.0, tol)
    s = 0.5 * (lo + hi)
    return PhiResult(lam, max(s * lam - psi(pair, s), 0.0), s, "interior")


def g(pair: StatePair, r: float, s: float) -> float:
    """``s/(1+s) r - psi(s)/(1+s)``."""
    return (s * r - psi(pair, s)) / (1 + s)


def g_prime_numerator(pair: StatePair, r: float, s: float) -> float:
    """``h(s) = r + psi(s) - (1+s) psi'(s)``; ``g'(s) = h(s) / (1+s)^2``."""
    return r + psi(pair, s) - (1 + s) * psi_derivatives(pair, s)[0]


def max_form(pair: StatePair, r: float) -> float:
    """``max_{0<=s<=1} g(s)`` by bounded scalar search, endpoints included."""
    res = minimize_scalar(lambda s: -g(pair, r, s), bounds=(0.0, 1.0), method="bounded",
                          options={"xatol": 1e-12})
    return max(-float(res.fun), g(pair, r, 0.0), g(pair, r, 1.0))


def strong_converse_exponent(pair: StatePair, r: float) -> ExponentResult:
    if r < 0:
        raise NegativeRate(f"rate must be non-negative, got {r}")
    tol = pair.config.root_tol
    big_d = relative_entropy(pair)

    lo = min(big_d, r)
    lo, hi = bisect(lambda lam: phi(pair, lam).phi + lam - r, lo, r, tol)
    lam_star = 0.5 * (lo + hi)
    phi_star = phi(pair, lam_star).phi

    d0, _ = psi_derivatives(pair, 0.0)
    d1, dd1 = psi_derivatives(pair, 1.0)
    psi1 = psi(pair, 1.0)
    flat = dd1 <= 0.0 and psi_derivatives(pair, 0.0)[1] <= 0.0
    if r <= d0:
        regime, s_star, u_par = "below_D", 0.0, 0.0
    elif r >= 2 * d1 - psi1:
        regime, s_star, u_par = "high_rate", 1.0, 0.5 * (r - psi1)
    else:
        regime = "interior"
        s_lo, s_hi = bisect(lambda s: g_prime_numerator(pair, r, s), 0.0, 1.0, tol,
                            increasing=False)
        s_star = 0.5 * (s_lo + s_hi)
        dpsi, _ = psi_derivatives(pair, s_star)
        u_par = s_star * dpsi - psi(pair, s_star)
    return ExponentResult(
        r=r, lambda_star=lam_star, s_star=s_star, phi_star=phi_star, regime=regime,
        u_parametric=u_par, u_maxform=max_form(pair, r),
        residual=phi_star + lam_star - r, flat_psi=flat,
    )


def strong_converse_predicate(pair: StatePair, r: float) -> bool:
    """Whether rate ``r`` forces ``1 - alpha_n`` to vanish exponentially.

    Decided by ``r > D`` and cross-checked against ``phi(lam*) > 0``.
    """
    big_d = relative_entropy(pair)
    by_rate = r > big_d + 1e-12
    phi_star = strong_converse_exponent(pair, r).phi_star
    # near r = D the exponent is O((r - D)^2) and drowns in rounding
    if by_rate and phi_star <= 0 and r > big_d + 1e-6:
        raise InternalInconsistency(f"r={r} > D={big_d} but phi(lam*)={phi_star}")
    if not by_rate and phi_star > 1e-10:
        raise InternalInconsistency(f"r={r} <= D={big_d} but phi(lam*)={phi_star}")
    return by_rate


def phi_curve(pair: StatePair, lams) -> np.ndarray:
    return np.array([phi(pair, float(x)).phi for x in lams])
