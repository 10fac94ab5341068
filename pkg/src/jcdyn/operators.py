"""Hilbert-space plumbing for a two-level atom coupled to one cavity mode.

Conventions used by every module downstream:

* composite operators are ``kron(atom_factor, cavity_factor)`` -- atom first;
* the qubit basis is ordered ``(|g>, |e>)``, so ``sigma_plus @ g = e``;
* Fock levels run ``0 .. fock_dim - 1``;
* vectorization stacks columns, ``vec(rho)[i + d*j] = rho[i, j]``, so the
  matrix of ``X -> A X B`` is ``kron(B.T, A)``.

States are plain complex ndarrays; ``check_density_matrix`` plays the role of
a density-matrix type by validating Hermiticity, unit trace and positivity at
configurable tolerances.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HilbertDims",
    "annihilation_op",
    "number_op",
    "qubit_ops",
    "excited_projector",
    "lift_qubit",
    "lift_cavity",
    "basis_state",
    "vectorize",
    "unvectorize",
    "left_right_superop",
    "partial_trace_cavity",
    "check_density_matrix",
    "TOL_HERM",
    "TOL_TRACE",
    "TOL_POS",
]

# Default validation tolerances for density matrices.
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_POS = 1e-8


@dataclass(frozen=True)
class HilbertDims:
    """Dimensions of the atom (x) cavity product space.

    The qubit factor is fixed at dimension 2; ``fock_dim`` counts the cavity
    levels kept after truncation and must be at least 2 so that one photon
    fits in the box.
    """

    fock_dim: int
    qubit_dim: int = 2

    def __post_init__(self) -> None:
        if self.qubit_dim != 2:
            raise ValueError(f"qubit_dim is fixed at 2, got {self.qubit_dim}")
        if self.fock_dim < 2:
            raise ValueError(
                f"fock_dim must be >= 2 (need room for at least one photon), got {self.fock_dim}"
            )

    @property
    def total_dim(self) -> int:
        return self.qubit_dim * self.fock_dim


def annihilation_op(dims: HilbertDims) -> np.ndarray:
    """Cavity annihilation operator on the Fock factor: a[n-1, n] = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, dims.fock_dim)), 1).astype(complex)


def number_op(dims: HilbertDims) -> np.ndarray:
    """Photon number operator, built with exact integer diagonal entries."""
    return np.diag(np.arange(dims.fock_dim)).astype(complex)


def qubit_ops() -> tuple[np.ndarray, np.ndarray]:
    """Return (sigma_plus, sigma_minus) in the (|g>, |e>) basis."""
    sp = np.zeros((2, 2), dtype=complex)
    sp[1, 0] = 1.0
    return sp, sp.conj().T


def excited_projector() -> np.ndarray:
    """|e><e| = sigma_plus sigma_minus."""
    return np.diag([0.0, 1.0]).astype(complex)


def lift_qubit(op: np.ndarray, dims: HilbertDims) -> np.ndarray:
    """Embed a qubit operator into the product space (identity on the cavity)."""
    return np.kron(op, np.eye(dims.fock_dim, dtype=complex))


def lift_cavity(op: np.ndarray, dims: HilbertDims) -> np.ndarray:
    """Embed a cavity operator into the product space (identity on the atom)."""
    return np.kron(np.eye(dims.qubit_dim, dtype=complex), op)


def basis_state(dims: HilbertDims, qubit: int, photons: int) -> np.ndarray:
    """Product basis ket |qubit, photons>; index = qubit * fock_dim + photons."""
    if qubit not in (0, 1):
        raise ValueError(f"qubit index must be 0 (ground) or 1 (excited), got {qubit}")
    if not 0 <= photons < dims.fock_dim:
        raise ValueError(f"photon number {photons} outside 0..{dims.fock_dim - 1}")
    ket = np.zeros(dims.total_dim, dtype=complex)
    ket[qubit * dims.fock_dim + photons] = 1.0
    return ket


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a square matrix into a vector."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1, order="F")


def unvectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`; rejects lengths that are not perfect squares."""
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"length {v.size} is not a perfect square")
    return v.reshape((d, d), order="F")


def left_right_superop(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of the map X -> A X B under column-stacking: kron(B.T, A)."""
    return np.kron(np.asarray(b).T, np.asarray(a))


def partial_trace_cavity(rho: np.ndarray, dims: HilbertDims) -> np.ndarray:
    """Trace out the cavity factor, returning the 2x2 atomic state."""
    rho = np.asarray(rho)
    d = dims.total_dim
    if rho.shape != (d, d):
        raise ValueError(f"state shape {rho.shape} does not match total_dim {d}")
    r = rho.reshape(dims.qubit_dim, dims.fock_dim, dims.qubit_dim, dims.fock_dim)
    return np.einsum("ajbj->ab", r)


def check_density_matrix(
    rho: np.ndarray,
    tol_herm: float = TOL_HERM,
    tol_trace: float = TOL_TRACE,
    tol_pos: float = TOL_POS,
) -> np.ndarray:
    """Validate that ``rho`` is a density matrix; return it unchanged.

    Raises ``ValueError`` naming every violated property (Hermiticity, unit
    trace, positivity) together with the measured deviation.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    problems = []
    herm = np.abs(rho - rho.conj().T).max()
    if herm > tol_herm:
        problems.append(f"Hermiticity violated by {herm:.3e} (tol {tol_herm:.1e})")
    tr = abs(rho.trace() - 1.0)
    if tr > tol_trace:
        problems.append(f"trace deviates from 1 by {tr:.3e} (tol {tol_trace:.1e})")
    # Eigenvalues of the Hermitian part; tiny negative values are allowed.
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if evals.min() < -tol_pos:
        problems.append(f"negative eigenvalue {evals.min():.3e} (tol {tol_pos:.1e})")
    if problems:
        raise ValueError("not a density matrix: " + "; ".join(problems))
    return rho
