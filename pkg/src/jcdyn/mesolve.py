"""Brute-force master-equation integration and spectral utilities.

This module is the independent cross-check for every closed form in the
package: a dense adaptive Runge-Kutta integration of d(vec rho)/dt = L vec rho,
dense eigendecomposition of superoperators, nullspace-based steady states and
a scaling-and-squaring propagator for very long horizons.  Tolerances default
to rel 1e-9 / abs 1e-11 so that trajectory comparisons at 1e-6 have three
orders of margin.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .operators import check_density_matrix, unvectorize, vectorize, HilbertDims

__all__ = [
    "IntegratorConfig",
    "IntegrationError",
    "RunDiagnostics",
    "TruncationReport",
    "integrate_master",
    "integrate_master_diag",
    "propagate_expm",
    "superop_spectrum",
    "steady_state",
    "truncation_report",
]

log = logging.getLogger(__name__)

# Dense eigendecompositions above this superoperator dimension are refused.
MAX_DENSE_DIM = 4096

# Methods with an embedded error estimate of order >= 4(5) that accept
# complex state vectors in scipy.integrate.solve_ivp.
_RK_METHODS = ("RK45", "DOP853")


class IntegrationError(RuntimeError):
    """Adaptive integration failed; ``t_fail`` is the last accepted time."""

    def __init__(self, message: str, t_fail: float | None = None) -> None:
        super().__init__(message)
        self.t_fail = t_fail


@dataclass
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = np.inf
    method: str = "DOP853"

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError(
                f"tolerances must be positive, got rel {self.rel_tol}, abs {self.abs_tol}"
            )
        if self.max_step <= 0:
            raise ValueError(f"max_step must be positive, got {self.max_step}")
        if self.method not in _RK_METHODS:
            raise ValueError(
                f"method must be one of {_RK_METHODS} (adaptive embedded RK with "
                f"complex support), got {self.method!r}"
            )


@dataclass
class RunDiagnostics:
    """Deviations measured on raw solver output, before symmetrization."""

    max_trace_drift: float
    max_herm_drift: float
    min_eigenvalue: float
    nfev: int


@dataclass
class TruncationReport:
    """Worst-case population found in the two highest Fock levels.

    Canonical single-excitation runs never populate those levels, so any
    leakage above ``threshold`` flags a truncation that is too tight.  The
    probe is only meaningful for fock_dim >= 4 (below that the watched levels
    overlap the physically occupied ones).
    """

    fock_dim: int
    max_leakage: float
    threshold: float = 1e-10

    @property
    def ok(self) -> bool:
        return self.max_leakage < self.threshold


def integrate_master_diag(
    L: np.ndarray,
    rho0: np.ndarray,
    t_grid: np.ndarray,
    config: IntegratorConfig | None = None,
) -> tuple[list[np.ndarray], RunDiagnostics]:
    """Integrate the master equation; return states plus drift diagnostics.

    States are Hermitian-symmetrized after the fact; the diagnostics record
    the raw trace and Hermiticity drift so callers can assert on solver
    quality rather than on the cleaned-up output.
    """
    config = config or IntegratorConfig()
    rho0 = np.asarray(rho0, dtype=complex)
    check_density_matrix(rho0)
    d = rho0.shape[0]
    L = np.asarray(L)
    if L.shape != (d * d, d * d):
        raise ValueError(f"superoperator shape {L.shape} does not match state dim {d}")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValueError("t_grid must be a one-dimensional array of times")
    if np.any(np.diff(t_grid) < 0) or t_grid[0] < 0:
        raise ValueError("t_grid must be non-negative and non-decreasing")

    if t_grid[-1] == t_grid[0]:
        raw = [np.array(rho0, copy=True) for _ in t_grid]
        nfev = 0
    else:
        sol = solve_ivp(
            lambda _t, y: L @ y,
            (t_grid[0], t_grid[-1]),
            vectorize(rho0),
            t_eval=t_grid,
            method=config.method,
            rtol=config.rel_tol,
            atol=config.abs_tol,
            max_step=config.max_step,
        )
        if not sol.success:
            t_fail = float(sol.t[-1]) if sol.t.size else float(t_grid[0])
            raise IntegrationError(
                f"integration failed at t = {t_fail:.6g}: {sol.message}", t_fail=t_fail
            )
        raw = [unvectorize(sol.y[:, k]) for k in range(sol.y.shape[1])]
        nfev = int(sol.nfev)

    trace_drift = 0.0
    herm_drift = 0.0
    min_eig = np.inf
    states = []
    for r in raw:
        trace_drift = max(trace_drift, abs(r.trace() - 1.0))
        herm_drift = max(herm_drift, float(np.abs(r - r.conj().T).max()))
        sym = 0.5 * (r + r.conj().T)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(sym).min()))
        states.append(sym)
    diag = RunDiagnostics(
        max_trace_drift=float(trace_drift),
        max_herm_drift=float(herm_drift),
        min_eigenvalue=float(min_eig),
        nfev=nfev,
    )
    log.debug(
        "integrate_master: trace drift %.2e, herm drift %.2e, min eig %.2e, nfev %d",
        diag.max_trace_drift,
        diag.max_herm_drift,
        diag.min_eigenvalue,
        diag.nfev,
    )
    return states, diag


def integrate_master(
    L: np.ndarray,
    rho0: np.ndarray,
    t_grid: np.ndarray,
    config: IntegratorConfig | None = None,
) -> list[np.ndarray]:
    """Hermitian-symmetrized states of the master equation on ``t_grid``."""
    states, _ = integrate_master_diag(L, rho0, t_grid, config)
    return states


def propagate_expm(L: np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    """Single-shot propagation via a dense matrix exponential.

    Scaling-and-squaring handles arbitrarily long horizons (useful for
    steady-state checks where adaptive stepping would need millions of steps).
    """
    rho0 = np.asarray(rho0, dtype=complex)
    check_density_matrix(rho0)
    _check_dense_dim(L)
    rho = unvectorize(scipy.linalg.expm(np.asarray(L) * float(t)) @ vectorize(rho0))
    return 0.5 * (rho + rho.conj().T)


def _check_dense_dim(L: np.ndarray) -> np.ndarray:
    L = np.asarray(L)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"expected a square superoperator, got shape {L.shape}")
    if L.shape[0] > MAX_DENSE_DIM:
        raise ValueError(
            f"superoperator dimension {L.shape[0]} exceeds the dense limit "
            f"{MAX_DENSE_DIM}; reduce fock_dim"
        )
    return L


def superop_spectrum(L: np.ndarray) -> np.ndarray:
    """All eigenvalues of a dense superoperator (dimension-guarded)."""
    return np.linalg.eigvals(_check_dense_dim(L))


def steady_state(
    L: np.ndarray, rel_tol: float = 1e-9
) -> np.ndarray | list[np.ndarray]:
    """Stationary state(s) of a generator from its SVD nullspace.

    A one-dimensional nullspace is returned as a validated, trace-normalized
    density matrix.  A degenerate nullspace is returned as the raw list of
    basis matrices (callers pick the physical combination, e.g. by projecting
    onto an excitation sector).
    """
    L = _check_dense_dim(L)
    _, s, vh = np.linalg.svd(L)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        null = [vh[i].conj() for i in range(vh.shape[0])]
    else:
        keep = s < rel_tol * smax
        null = [vh[i].conj() for i in np.nonzero(keep)[0]]
    if not null:
        raise RuntimeError("no stationary state found (empty nullspace)")
    if len(null) > 1:
        return [unvectorize(v) for v in null]
    rho = unvectorize(null[0])
    rho = 0.5 * (rho + rho.conj().T)
    tr = rho.trace()
    if abs(tr) < 1e-12:
        raise RuntimeError("stationary null vector is traceless; cannot normalize")
    rho = rho / tr
    return check_density_matrix(rho)


def truncation_report(
    states: list[np.ndarray], dims: HilbertDims, threshold: float = 1e-10
) -> TruncationReport:
    """Measure the worst population leakage into the two highest Fock levels."""
    top = [dims.fock_dim - 2, dims.fock_dim - 1]
    idx = [q * dims.fock_dim + m for q in range(dims.qubit_dim) for m in top]
    worst = 0.0
    for rho in states:
        pops = np.real(np.diag(rho))
        worst = max(worst, float(pops[idx].sum()))
    return TruncationReport(fock_dim=dims.fock_dim, max_leakage=worst, threshold=threshold)
