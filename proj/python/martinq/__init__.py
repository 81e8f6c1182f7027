"""Killed Green functions, Martin profiles and h-transforms on example chains.

States are strings: "3" on Z, "1,2" on Z^2, "0.1.1" on the tree ("@" is the
root). Exact values are returned as strings such as "4" or "1/2 + 4/pi".
"""

from ._core import (
    Chain,
    InexactError,
    MartinqError,
    NotInConeError,
    OutOfRangeError,
    ParseError,
    Profile,
    BudgetExceededError,
    RunawayRunError,
    UnknownStateError,
    UnsupportedError,
    avoidance,
    chain,
    check_catalog,
    check_harmonic,
    check_potential,
    check_rn_identity,
    check_row_sums,
    convergence,
    cylinder_measure,
    green_exact,
    green_mc,
    green_solve,
    k_kernel,
    mixture,
    potential_mc,
    potential_table,
    potential_value,
    profile,
    psi,
    restricted_measure,
    transformed_successors,
    verify,
    verify_concatenation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
