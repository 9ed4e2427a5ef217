"""Quantum hypothesis-testing exponents and exact finite-n tests."""

from .config import DEFAULT, Config
from .divergences import (
    StatePair,
    binary_dpi_check,
    make_pair,
    psi,
    psi_bar,
    psi_derivatives,
    relative_entropy,
)
from .exponents import phi, strong_converse_exponent, strong_converse_predicate
from .neyman_pearson import (
    beta_star,
    fundamental_inequality_check,
    np_dominance_check,
    stein_sweep,
    threshold_test,
)
from .operators import (
    BinaryTest,
    DensityOperator,
    make_density,
    make_test,
    matrix_power,
    spectral,
    support_condition,
    tensor_power,
)

__version__ = "0.1.0"
