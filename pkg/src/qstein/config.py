"""Numerical tolerances and size caps shared by every constructor."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    """One record of knobs threaded through the library.

    Attributes
    ----------
    hermiticity_tol : float
        Largest elementwise deviation of ``M`` from ``M^H`` that is silently
        symmetrized away.
    psd_tol : float
        Eigenvalues down to ``-psd_tol`` are clipped to zero.
    trace_tol : float
        Allowed ``|Tr M - 1|`` before renormalization is refused.
    support_tol : float
        Eigenvalues at or below this count as kernel.
    degeneracy_tol : float
        Eigenvalue gaps below this are merged into one cluster.
    root_tol : float
        Bracket width at which bisections stop.
    dim_cap : int
        Largest dense dimension ``d**n`` that may be formed.
    s_cap : float
        Upper limit for the tilt parameter when bracketing classical rates.
    type_cap : int
        Largest number of type classes enumerated.
    """

    hermiticity_tol: float = 1e-12
    psd_tol: float = 1e-10
    trace_tol: float = 1e-8
    support_tol: float = 1e-10
    degeneracy_tol: float = 1e-9
    root_tol: float = 1e-12
    dim_cap: int = 4096
    s_cap: float = 50.0
    type_cap: int = 10**6

    def __post_init__(self):
        for name in ("hermiticity_tol", "psd_tol", "trace_tol", "support_tol",
                     "degeneracy_tol", "root_tol", "s_cap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.dim_cap < 4:
            raise ValueError(f"dim_cap must be at least 4, got {self.dim_cap}")
        if self.type_cap < 1:
            raise ValueError(f"type_cap must be positive, got {self.type_cap}")

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)


DEFAULT = Config()
