"""Random states, tests and distributions for the verification sweeps."""

from __future__ import annotations

import numpy as np

from .operators import BinaryTest, DensityOperator, _frozen, dagger, make_density


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(rng: np.random.Generator, d: int, rank: int | None = None,
                   floor: float = 0.0) -> DensityOperator:
    """Ginibre state; ``floor > 0`` mixes in white noise so every eigenvalue is at least ``floor``."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ dagger(g)
    m = m / np.trace(m).real
    if floor > 0:
        m = (1 - d * floor) * m + floor * np.eye(d)
    return make_density(m)


def random_spectrum(rng: np.random.Generator, d: int, floor: float = 0.0) -> np.ndarray:
    w = rng.dirichlet(np.ones(d))
    if floor > 0:
        w = (w + floor) / (1 + d * floor)
    return w


def random_pair(rng: np.random.Generator, d: int = 2) -> tuple[DensityOperator, DensityOperator]:
    """Full-rank, generically non-commuting pair.

    The eigenvalue floor keeps small tensor powers clear of the support tolerance.
    """
    return random_density(rng, d, floor=0.02), random_density(rng, d, floor=0.02)


def random_commuting_pair(rng: np.random.Generator, d: int = 2, diagonal: bool = False):
    u = np.eye(d) if diagonal else random_unitary(rng, d)
    a = random_spectrum(rng, d, floor=0.02)
    b = random_spectrum(rng, d, floor=0.02)
    rho = make_density((u * a) @ dagger(u))
    sigma = make_density((u * b) @ dagger(u))
    return rho, sigma


def random_test(rng: np.random.Generator, dim: int) -> BinaryTest:
    """Hermitian operator with Haar eigenbasis and spectrum uniform on [0, 1]."""
    u = random_unitary(rng, dim)
    w = rng.uniform(0.0, 1.0, dim)
    m = (u * w) @ dagger(u)
    return BinaryTest(_frozen((m + dagger(m)) / 2))


def random_distribution(rng: np.random.Generator, k: int, floor: float = 0.0) -> np.ndarray:
    return random_spectrum(rng, k, floor)
