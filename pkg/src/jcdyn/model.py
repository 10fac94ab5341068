"""Jaynes-Cummings model with either cavity dephasing or cavity loss.

In the frame rotating at the cavity frequency (hbar = 1):

    H = delta sigma+ sigma-  +  g (sigma+ a + sigma- a_dag)

with ``delta`` the atom-cavity detuning and ``g`` the coupling.  Open-system
dynamics are generated by a Lindblad master equation

    d rho / dt = L rho = -i [H, rho] + rate * D[A] rho,
    D[A] rho = A rho A_dag - (A_dag A rho + rho A_dag A) / 2,

with one of two jump channels acting on the cavity:

* ``Scenario.DEPHASING``: A = a_dag a.  The rate constant ``gamma`` is defined
  as the decay rate of a one-photon cavity coherence |n><n-1|, which fixes the
  Lindblad prefactor at ``2 * gamma`` for this channel.
* ``Scenario.LOSS``: A = a with the usual photon-loss prefactor ``kappa``.

Both generators are block structured with respect to the total excitation
number N_exc = a_dag a + sigma+ sigma-: dephasing conserves the excitation
sector of bras and kets exactly, loss only ever lowers both together.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .operators import (
    HilbertDims,
    annihilation_op,
    excited_projector,
    left_right_superop,
    lift_cavity,
    lift_qubit,
    number_op,
    qubit_ops,
)

__all__ = [
    "Scenario",
    "ModelParams",
    "hamiltonian",
    "total_excitation_op",
    "hamiltonian_superop",
    "dissipator_superop",
    "lindblad_channel",
    "liouvillian",
]


class Scenario(Enum):
    DEPHASING = "dephasing"
    LOSS = "loss"


@dataclass(frozen=True)
class ModelParams:
    """Model constants: coupling g, detuning delta, rates gamma (dephasing)
    and kappa (loss), plus the truncated Hilbert-space dimensions."""

    g: float
    delta: float = 0.0
    gamma: float = 0.0
    kappa: float = 0.0
    dims: HilbertDims = field(default_factory=lambda: HilbertDims(fock_dim=4))

    def __post_init__(self) -> None:
        if self.g < 0:
            raise ValueError(f"coupling g must be >= 0, got {self.g}")
        if self.gamma < 0:
            raise ValueError(f"dephasing rate gamma must be >= 0, got {self.gamma}")
        if self.kappa < 0:
            raise ValueError(f"loss rate kappa must be >= 0, got {self.kappa}")


def hamiltonian(p: ModelParams) -> np.ndarray:
    """Interaction-frame Hamiltonian on the product space."""
    sp, sm = qubit_ops()
    a = annihilation_op(p.dims)
    idf = np.eye(p.dims.fock_dim, dtype=complex)
    return p.delta * np.kron(excited_projector(), idf) + p.g * (
        np.kron(sp, a) + np.kron(sm, a.conj().T)
    )


def total_excitation_op(dims: HilbertDims) -> np.ndarray:
    """N_exc = a_dag a + sigma+ sigma-; commutes with the Hamiltonian."""
    return lift_cavity(number_op(dims), dims) + lift_qubit(excited_projector(), dims)


def hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    """Matrix of rho -> -i [H, rho] under column-stacking."""
    d = h.shape[0]
    ident = np.eye(d, dtype=complex)
    return -1j * (left_right_superop(h, ident) - left_right_superop(ident, h))


def dissipator_superop(a: np.ndarray) -> np.ndarray:
    """Matrix of the unit-rate dissipator D[A] under column-stacking."""
    a = np.asarray(a, dtype=complex)
    ada = a.conj().T @ a
    ident = np.eye(a.shape[0], dtype=complex)
    return (
        left_right_superop(a, a.conj().T)
        - 0.5 * left_right_superop(ada, ident)
        - 0.5 * left_right_superop(ident, ada)
    )


def lindblad_channel(p: ModelParams, scenario: Scenario) -> tuple[np.ndarray, float]:
    """Lifted jump operator and its Lindblad prefactor for the scenario.

    The dephasing prefactor is 2*gamma so that a |n><n-1| cavity coherence
    decays at exactly gamma (the convention every closed form in this package
    is written in); the loss prefactor is kappa itself.
    """
    if scenario is Scenario.DEPHASING:
        return lift_cavity(number_op(p.dims), p.dims), 2.0 * p.gamma
    if scenario is Scenario.LOSS:
        return lift_cavity(annihilation_op(p.dims), p.dims), p.kappa
    raise ValueError(f"unknown scenario {scenario!r}")


def liouvillian(p: ModelParams, scenario: Scenario) -> np.ndarray:
    """Full generator L = -i[H, .] + rate * D[A] as a dense superoperator."""
    jump, rate = lindblad_channel(p, scenario)
    return hamiltonian_superop(hamiltonian(p)) + rate * dissipator_superop(jump)
