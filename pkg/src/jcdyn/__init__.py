"""jcdyn: exact and brute-force dynamics of a two-level atom coupled to a
dephasing or lossy cavity mode.

The package provides closed-form sector solutions (``dephasing``, ``loss``),
a master-equation integrator and spectral tools that serve as an independent
numeric cross-check (``mesolve``), and canonical parameter sweeps with a CLI
front end (``runs``, ``cli``).
"""
from __future__ import annotations

__version__ = "0.1.0"

from .operators import (  # noqa: E402
    HilbertDims,
    annihilation_op,
    basis_state,
    check_density_matrix,
    lift_cavity,
    lift_qubit,
    number_op,
    partial_trace_cavity,
    qubit_ops,
    unvectorize,
    vectorize,
)
from .model import (  # noqa: E402
    ModelParams,
    Scenario,
    dissipator_superop,
    hamiltonian,
    hamiltonian_superop,
    liouvillian,
    total_excitation_op,
)

__all__ = [
    "__version__",
    "HilbertDims",
    "ModelParams",
    "Scenario",
    "annihilation_op",
    "basis_state",
    "check_density_matrix",
    "dissipator_superop",
    "hamiltonian",
    "hamiltonian_superop",
    "lift_cavity",
    "lift_qubit",
    "liouvillian",
    "number_op",
    "partial_trace_cavity",
    "qubit_ops",
    "total_excitation_op",
    "unvectorize",
    "vectorize",
]
