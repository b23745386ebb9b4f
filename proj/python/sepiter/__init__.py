"""Maximal separability eigenvalues and entanglement witnesses."""

from ._core import (
    DegenerateProjection,
    DomainError,
    NoConvergenceError,
    OracleConfig,
    ProductState,
    SpiConfig,
    StartStrategy,
    StructuralError,
    build_witness,
    horodecki_state,
    max_separability_eigenvalue,
    oracle_gmax,
    random_operator,
    smolin_state,
    spi_solve,
    swap_operator,
    test_state,
)

__all__ = [
    "DegenerateProjection",
    "DomainError",
    "NoConvergenceError",
    "OracleConfig",
    "ProductState",
    "SpiConfig",
    "StartStrategy",
    "StructuralError",
    "build_witness",
    "horodecki_state",
    "max_separability_eigenvalue",
    "oracle_gmax",
    "random_operator",
    "smolin_state",
    "spi_solve",
    "swap_operator",
    "test_state",
]
