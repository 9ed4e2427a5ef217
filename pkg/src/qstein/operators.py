"""Hermitian linear algebra: density operators, tests, spectral clusters.

Every object here is immutable once built; the arrays they hold are
flagged read-only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import DEFAULT, Config
from .errors import (
    DimensionCapExceeded,
    DimensionMismatch,
    NegativePowerOfKernel,
    NotHermitian,
    NotPSD,
    TraceNotOne,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _square(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def hermitian(matrix, config: Config = DEFAULT) -> np.ndarray:
    """Return ``(M + M^H) / 2`` after checking that ``M`` is Hermitian to tolerance."""
    m = _square(matrix)
    dev = np.max(np.abs(m - m.conj().T))
    if dev >= config.hermiticity_tol:
        raise NotHermitian(f"max |M - M^H| = {dev:.3e} >= {config.hermiticity_tol:.1e}")
    return (m + m.conj().T) / 2


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def unitarity_defect(v: np.ndarray) -> float:
    return float(np.max(np.abs(dagger(v) @ v - np.eye(v.shape[1]))))


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm of ``AB - BA``."""
    return float(np.max(np.abs(a @ b - b @ a)))


@dataclass(frozen=True)
class DensityOperator:
    """Validated density operator with its eigendecomposition cached.

    ``eigenvalues`` are sorted in descending order and ``eigenvectors`` holds
    the matching orthonormal columns.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def support_mask(self, tol: float) -> np.ndarray:
        return self.eigenvalues > tol

    def kernel_projector(self, tol: float) -> np.ndarray:
        v = self.eigenvectors[:, ~self.support_mask(tol)]
        return v @ dagger(v)

    def is_diagonal(self, tol: float = 0.0) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.max(np.abs(off)) <= tol)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def make_density(matrix, normalize: bool = False, config: Config = DEFAULT) -> DensityOperator:
    """Validate ``matrix`` as a density operator.

    Negative eigenvalues within ``psd_tol`` are clipped and the trace is
    renormalized to exactly one. A trace further than ``trace_tol`` from one
    is refused unless ``normalize`` is set.
    """
    m = hermitian(matrix, config)
    w, v = np.linalg.eigh(m)
    if w[0] < -config.psd_tol:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} < -{config.psd_tol:.1e}")
    tr = float(np.sum(w))
    if abs(tr - 1.0) > config.trace_tol and not normalize:
        raise TraceNotOne(f"trace {tr!r} differs from 1 by more than {config.trace_tol:.1e}")
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if total <= 0:
        raise TraceNotOne("matrix has no positive spectrum to normalize")
    w = w / total
    w, v = w[::-1], v[:, ::-1]
    rebuilt = (v * w) @ dagger(v)
    return DensityOperator(_frozen((rebuilt + dagger(rebuilt)) / 2), _frozen(w), _frozen(v))


def as_density(obj, config: Config = DEFAULT) -> DensityOperator:
    if isinstance(obj, DensityOperator):
        return obj
    return make_density(obj, config=config)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalue clusters ``mu_j`` with orthogonal projectors ``E_j``.

    ``vectors[j]`` holds orthonormal columns spanning the range of ``E_j``.
    Clusters are ordered by increasing eigenvalue.
    """

    eigenvalues: np.ndarray
    vectors: tuple

    @property
    def projectors(self) -> list[np.ndarray]:
        return [v @ dagger(v) for v in self.vectors]

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([v.shape[1] for v in self.vectors])

    def reconstruct(self) -> np.ndarray:
        return sum(mu * e for mu, e in zip(self.eigenvalues, self.projectors))

    def select(self, mask) -> np.ndarray:
        """Orthonormal columns spanning the clusters picked by ``mask``."""
        picked = [v for v, keep in zip(self.vectors, mask) if keep]
        if not picked:
            dim = self.vectors[0].shape[0]
            return np.zeros((dim, 0), dtype=complex)
        return np.hstack(picked)


def spectral(op, degeneracy_tol: float | None = None,
             config: Config = DEFAULT) -> SpectralDecomposition:
    """Cluster the spectrum of a Hermitian operator.

    Consecutive sorted eigenvalues closer than ``degeneracy_tol`` share a
    cluster; the cluster value is their mean.
    """
    tol = config.degeneracy_tol if degeneracy_tol is None else degeneracy_tol
    m = hermitian(op, config)
    w, v = np.linalg.eigh(m)
    breaks = np.flatnonzero(np.diff(w) >= tol) + 1
    groups = np.split(np.arange(len(w)), breaks)
    mus = np.array([w[g].mean() for g in groups])
    vecs = tuple(_frozen(v[:, g]) for g in groups)
    return SpectralDecomposition(_frozen(mus), vecs)


def check_dim(dim: int, cap: int) -> None:
    if dim > cap:
        raise DimensionCapExceeded(dim, cap)


def tensor_power(op, n: int, dim_cap: int | None = None) -> np.ndarray:
    """Kronecker ``n``-th power of a square matrix (or of a vector)."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    m = np.asarray(op)
    cap = DEFAULT.dim_cap if dim_cap is None else dim_cap
    check_dim(m.shape[0] ** n, cap)
    out = m
    for _ in range(n - 1):
        out = np.kron(out, m)
    return out


def matrix_power(op, exponent: float, support_only: bool = False,
                 config: Config = DEFAULT) -> np.ndarray:
    """Raise a density operator to a real power in its eigenbasis.

    Negative powers need ``support_only``: they are taken on the support and
    the kernel maps to zero.
    """
    rho = as_density(op, config)
    w = rho.eigenvalues
    on_support = w > config.support_tol
    if exponent < 0 and not support_only and not on_support.all():
        raise NegativePowerOfKernel(
            f"exponent {exponent} with {np.count_nonzero(~on_support)} kernel eigenvalue(s)")
    powered = np.zeros_like(w)
    if exponent == 0:
        powered = on_support.astype(float) if support_only else np.ones_like(w)
    else:
        mask = on_support if (support_only or exponent < 0) else w > 0
        powered[mask] = w[mask] ** exponent
    v = rho.eigenvectors
    out = (v * powered) @ dagger(v)
    return (out + dagger(out)) / 2


def support_condition(rho, sigma, config: Config = DEFAULT) -> bool:
    """True iff the range of ``rho`` sits inside the range of ``sigma``."""
    rho, sigma = as_density(rho, config), as_density(sigma, config)
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dims {rho.dim} and {sigma.dim} differ")
    p = sigma.kernel_projector(config.support_tol)
    return bool(np.max(np.abs(p @ rho.matrix @ p)) < config.support_tol)


@dataclass(frozen=True)
class BinaryTest:
    """Two-outcome measurement ``{A, 1 - A}`` with ``0 <= A <= 1``."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def alpha(self, rho_n: np.ndarray) -> float:
        return float(np.clip(1.0 - np.real(np.trace(rho_n @ self.matrix)), 0.0, 1.0))

    def beta(self, sigma_n: np.ndarray) -> float:
        return float(np.clip(np.real(np.trace(sigma_n @ self.matrix)), 0.0, 1.0))


def make_test(matrix, config: Config = DEFAULT) -> BinaryTest:
    """Validate ``0 <= A <= 1`` (to ``psd_tol``) and clip the spectrum into [0, 1]."""
    m = hermitian(matrix, config)
    w, v = np.linalg.eigh(m)
    if w[0] < -config.psd_tol or w[-1] > 1 + config.psd_tol:
        raise NotPSD(f"test spectrum [{w[0]:.3e}, {w[-1]:.3e}] leaves [0, 1]")
    if w[0] < 0 or w[-1] > 1:
        w = np.clip(w, 0.0, 1.0)
        m = (v * w) @ dagger(v)
        m = (m + dagger(m)) / 2
    return BinaryTest(_frozen(m))


def identity_test(dim: int) -> BinaryTest:
    return BinaryTest(_frozen(np.eye(dim, dtype=complex)))


def zero_test(dim: int) -> BinaryTest:
    return BinaryTest(_frozen(np.zeros((dim, dim), dtype=complex)))


# --- matrix JSON: {"dim": d, "re": [[...]], "im": [[...]]} -------------------

def matrix_from_dict(doc: dict) -> np.ndarray:
    d = int(doc["dim"])
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc["im"], dtype=float) if doc.get("im") is not None else np.zeros_like(re)
    if re.shape != (d, d) or im.shape != (d, d):
        raise DimensionMismatch(f"declared dim {d} but got re {re.shape}, im {im.shape}")
    return re + 1j * im


def matrix_to_dict(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}


def load_matrix(path) -> np.ndarray:
    return matrix_from_dict(json.loads(Path(path).read_text()))


def dump_matrix(m, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(m)))
