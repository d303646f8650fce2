"""Minimal product-state expectation values: see-saw, certified brackets, grid oracle."""

from .certified import BoundsResult, certified_lambda_max_upper, certified_lambda_min
from .grid import brute_force_grid, pauli_tensor
from .jointrange import (
    JointRangeInner,
    JointRangeOuter,
    direction_sequence,
    joint_range_inner,
    joint_range_outer,
    vertex_enum_4d,
)
from .local import (
    PauliReduction,
    effective_local_hamiltonian,
    min_qubit_expectation,
    pauli_reduce,
    two_level_min,
)
from .seesaw import SeesawResult, seesaw

__all__ = [
    "BoundsResult", "JointRangeInner", "JointRangeOuter", "PauliReduction", "SeesawResult",
    "brute_force_grid", "certified_lambda_max_upper", "certified_lambda_min", "direction_sequence",
    "effective_local_hamiltonian", "joint_range_inner", "joint_range_outer", "min_qubit_expectation",
    "pauli_reduce", "pauli_tensor", "seesaw", "two_level_min", "vertex_enum_4d",
]
