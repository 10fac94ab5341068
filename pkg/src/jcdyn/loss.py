"""Closed-form dynamics for the lossy cavity via non-Hermitian sector blocks.

Photon loss never raises the excitation number, so the generator is block
triangular with respect to the excitation sectors and the truncated spectrum
is exact.  Conditioned on no jump, each sector n >= 1 evolves under the
complex-symmetric 2x2 block (basis |1> = |g,n>, |2> = |e,n-1>)

    K_n = [[ -i n kappa / 2,            g sqrt(n)           ],
           [    g sqrt(n),    (2 delta - i (n-1) kappa) / 2 ]],

the restriction of K = H - i (kappa/2) a_dag a.  Its eigenvalues are

    eps_j = (2 delta + i kappa - 2 i n kappa)/4
            + (2 delta + i kappa)/4 * (-1)^j * sqrt(1 + chi_n),
    chi_n = 16 g^2 n / (2 delta + i kappa)^2,   j in {1, 2},

labelled so that eps_1 -> -i n kappa / 2 as g -> 0.  Every eigenvalue of the
full generator is a pairing of sector eigenvalues,

    lambda_{j,k}^{(n,m)} = -i (eps_j^{(n)} - conj(eps_k^{(m)})),

with a single branch j = 1 for n = 0.  K_n is diagonalized by a complex
rotation R (R^T R = 1, R^T K_n R diagonal); at chi_n = -1 the two branches
collide in an exceptional point and K_n becomes a Jordan block, which is the
only place eigenvectors cease to exist.

For one initial excitation, amplitudes c_g |g,0> + c_e |e,0>, the excited
state survives with amplitude f(t) = (exp(-i K_1 t))_{22} and the reduced
atomic state is

    rho_at = [[1 - |c_e f|^2,  conj(c_e) c_g conj(f)],
              [c_e conj(c_g) f,     |c_e f|^2      ]],

giving p_e = |c_e f|^2 and purity P = 1 + 2 |c_e|^4 |f|^2 (|f|^2 - 1).
``survival_amplitude`` evaluates f(t) in an overflow-safe form that stays
finite through the exceptional point; the rational and mode-sum routes are
kept as independent cross-checks.
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .operators import basis_state
from .series import TimeSeries

__all__ = [
    "ExceptionalPointError",
    "ExceptionalPointWarning",
    "KBlock",
    "LiouvillianMode",
    "EigvecPair",
    "SingleExcitationState",
    "k_block",
    "liouvillian_spectrum_loss",
    "eigvec_pair",
    "survival_amplitude",
    "survival_amplitude_rational",
    "survival_amplitude_modes",
    "evolve_single_excitation",
    "atom_observables_loss",
]


class ExceptionalPointError(RuntimeError):
    """Requested eigenvectors at (or numerically on top of) a spectral defect."""


class ExceptionalPointWarning(UserWarning):
    """Parameters lie within relative distance 1e-6 of an exceptional point."""


@dataclass(frozen=True)
class KBlock:
    """Sector block of the no-jump Hamiltonian and its closed-form spectrum.

    ``eps`` holds one eigenvalue for n = 0 and the (eps_1, eps_2) pair for
    n >= 1.  ``theta`` and ``rotation`` are None exactly at the exceptional
    point chi = -1, where no complex rotation diagonalizes the block.
    """

    n: int
    matrix: np.ndarray
    chi: complex
    eps: tuple[complex, ...]
    theta: complex | None
    rotation: np.ndarray | None


@dataclass(frozen=True)
class LiouvillianMode:
    """One eigenvalue of the loss generator, tagged by its sector pairing."""

    n: int
    m: int
    j: int
    k: int
    value: complex


@dataclass(frozen=True)
class EigvecPair:
    """Right/left eigenvectors of a sector block embedded in the full space.

    Lefts are stored as kets such that lefts[i] . conj() @ rights[j] = delta_ij.
    """

    eps: tuple[complex, complex]
    rights: tuple[np.ndarray, np.ndarray]
    lefts: tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class SingleExcitationState:
    """Initial pure state c_g |g,0> + c_e |e,0> (validated to unit norm)."""

    c_g: complex
    c_e: complex

    def __post_init__(self) -> None:
        norm = abs(self.c_g) ** 2 + abs(self.c_e) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|c_g|^2 + |c_e|^2 = {norm!r} must be 1 within 1e-12")

    @classmethod
    def excited(cls) -> "SingleExcitationState":
        return cls(c_g=0.0, c_e=1.0)


def _sector_eps(p: ModelParams, n: int) -> tuple[complex, complex, complex]:
    """(eps_1, eps_2, chi) for sector n >= 1."""
    b = p.g * np.sqrt(n)
    zq = 2.0 * p.delta + 1j * p.kappa
    if zq == 0:
        # kappa = delta = 0: plain vacuum-Rabi doublet; chi diverges.
        chi = complex("inf") if b != 0 else 0j
        return -b + 0j, b + 0j, chi
    chi = 16.0 * p.g**2 * n / zq**2
    w = np.sqrt(1.0 + chi)
    base = (zq - 2j * n * p.kappa) / 4.0
    d = zq / 4.0
    return base - d * w, base + d * w, chi


def k_block(p: ModelParams, n: int) -> KBlock:
    """Sector block K_n with eigenvalues, mixing angle and rotation.

    The closed-form eigenvalues are cross-checked against a direct numeric
    eigensolution of the 2x2 matrix on every call.
    """
    if n < 0:
        raise ValueError(f"sector index n must be >= 0, got {n}")
    if n == 0:
        return KBlock(
            n=0,
            matrix=np.zeros((1, 1), dtype=complex),
            chi=0j,
            eps=(0j,),
            theta=None,
            rotation=None,
        )
    b = p.g * np.sqrt(n)
    matrix = np.array(
        [
            [-0.5j * n * p.kappa, b],
            [b, 0.5 * (2.0 * p.delta - 1j * (n - 1) * p.kappa)],
        ],
        dtype=complex,
    )
    e1, e2, chi = _sector_eps(p, n)
    numeric = np.linalg.eigvals(matrix)
    scale = max(1.0, abs(e1), abs(e2))
    mismatch = min(
        abs(numeric[0] - e1) + abs(numeric[1] - e2),
        abs(numeric[0] - e2) + abs(numeric[1] - e1),
    )
    if mismatch > 1e-8 * scale:
        raise RuntimeError(
            f"closed-form sector eigenvalues disagree with the 2x2 eigensolver "
            f"by {mismatch:.2e} (n={n})"
        )
    if b == 0:
        theta: complex | None = 0j
        rotation: np.ndarray | None = np.eye(2, dtype=complex)
    else:
        tan = (2.0 * e1 + 1j * n * p.kappa) / (2.0 * b)
        disc = 1.0 + tan**2
        if disc == 0:
            # chi = -1: single Jordan block, no complex-orthogonal rotation.
            theta = None
            rotation = None
        else:
            c = 1.0 / np.sqrt(disc)
            s = tan * c
            theta = cmath.atan(tan)
            rotation = np.array([[c, -s], [s, c]], dtype=complex)
    return KBlock(n=n, matrix=matrix, chi=chi, eps=(e1, e2), theta=theta, rotation=rotation)


def liouvillian_spectrum_loss(p: ModelParams, n_max: int) -> list[LiouvillianMode]:
    """All generator eigenvalues -i (eps_j^(n) - conj(eps_k^(m))) with n, m <= n_max.

    Branch labels run over j = 1 only for n = 0 and j in {1, 2} otherwise,
    giving (2 n_max + 1)^2 modes; the (n,m,j,k) = (0,0,1,1) entry is the exact
    stationary zero.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    blocks = {n: k_block(p, n).eps for n in range(n_max + 1)}
    modes = []
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            for j, ej in enumerate(blocks[n], start=1):
                for k, ek in enumerate(blocks[m], start=1):
                    modes.append(
                        LiouvillianMode(n=n, m=m, j=j, k=k, value=-1j * (ej - ek.conjugate()))
                    )
    return modes


def eigvec_pair(p: ModelParams, n: int) -> EigvecPair:
    """Biorthonormal eigenvectors of K_n embedded in the full Hilbert space.

    Raises :class:`ExceptionalPointError` at the spectral defect, detected
    either exactly (no rotation exists) or via a normalized self-overlap
    |<q_j|r_j>| below 1e-8.
    """
    if n < 1:
        raise ValueError(f"eigenvectors are defined per sector n >= 1, got {n}")
    if n > p.dims.fock_dim - 1:
        raise ValueError(
            f"sector {n} does not fit in fock_dim {p.dims.fock_dim}; increase the truncation"
        )
    blk = k_block(p, n)
    if blk.rotation is None:
        raise ExceptionalPointError(
            f"sector {n} is at the exceptional point (chi = {blk.chi}); "
            "no eigenvector pair exists"
        )
    norms = (np.abs(blk.rotation) ** 2).sum(axis=0)
    overlap = 1.0 / norms  # |r^T r| / ||r||^2 with r^T r = 1 by construction
    if overlap.min() < 1e-8:
        raise ExceptionalPointError(
            f"sector {n} is within numerical reach of the exceptional point "
            f"(self-overlap {overlap.min():.2e} < 1e-8)"
        )
    k1 = basis_state(p.dims, 0, n)
    k2 = basis_state(p.dims, 1, n - 1)
    rights = tuple(blk.rotation[0, j] * k1 + blk.rotation[1, j] * k2 for j in range(2))
    lefts = tuple(r.conj() for r in rights)
    return EigvecPair(eps=blk.eps, rights=rights, lefts=lefts)  # type: ignore[arg-type]


def _as_time_array(t: float | np.ndarray) -> np.ndarray:
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("negative times are not supported")
    return t_arr


def survival_amplitude(p: ModelParams, t: float | np.ndarray) -> np.ndarray:
    """f(t) = (exp(-i K_1 t))_{22}: the no-jump excited-state amplitude.

    Away from the exceptional point this is the bounded two-exponential form
    f = [(1 - 1/w) e^{-i eps_1 t} + (1 + 1/w) e^{-i eps_2 t}] / 2 with
    w = sqrt(1 + chi_1); within |w| < 1e-3 of the defect it switches to the
    confluent form e^{-i base t} (cos(dwt) - i d t sinc(dwt)), which is exact
    in the limit w -> 0.  Parameters within relative distance 1e-6 of the
    exceptional point trigger an :class:`ExceptionalPointWarning`.
    """
    t_arr = _as_time_array(t)
    zq = 2.0 * p.delta + 1j * p.kappa
    if zq == 0:
        out = np.cos(p.g * t_arr).astype(complex)
        return out[0] if np.ndim(t) == 0 else out
    chi = 16.0 * p.g**2 / zq**2
    if abs(1.0 + chi) < 1e-6:
        warnings.warn(
            f"parameters are within 1e-6 of the exceptional point (chi = {chi:.9g}); "
            "eigenvector-based routes are ill-conditioned here",
            ExceptionalPointWarning,
            stacklevel=2,
        )
    w = np.sqrt(1.0 + chi)
    base = (zq - 2j * p.kappa) / 4.0
    d = zq / 4.0
    if abs(w) < 1e-3:
        y = d * w * t_arr
        small = np.abs(y) < 1e-4
        ys = np.where(small, 1.0, y)
        sinc = np.where(small, 1.0 - y * y / 6.0, np.sin(ys) / ys)
        out = np.exp(-1j * base * t_arr) * (np.cos(y) - 1j * d * t_arr * sinc)
    else:
        e1 = base - d * w
        e2 = base + d * w
        out = 0.5 * (
            (1.0 - 1.0 / w) * np.exp(-1j * e1 * t_arr)
            + (1.0 + 1.0 / w) * np.exp(-1j * e2 * t_arr)
        )
    return out[0] if np.ndim(t) == 0 else out


def survival_amplitude_rational(p: ModelParams, t: float | np.ndarray) -> np.ndarray:
    """Cross-check route: partial fractions of the 2x2 resolvent.

    f = [(K_22 - eps_2) e^{-i eps_1 t} - (K_22 - eps_1) e^{-i eps_2 t}] / (eps_1 - eps_2).
    Undefined at the exceptional point (0/0), where it raises.
    """
    t_arr = _as_time_array(t)
    e1, e2, _ = _sector_eps(p, 1)
    scale = max(1.0, abs(e1), abs(e2))
    if abs(e1 - e2) < 1e-12 * scale:
        raise ExceptionalPointError("rational form is 0/0 at the exceptional point")
    k22 = p.delta + 0j
    out = (
        (k22 - e2) * np.exp(-1j * e1 * t_arr) - (k22 - e1) * np.exp(-1j * e2 * t_arr)
    ) / (e1 - e2)
    return out[0] if np.ndim(t) == 0 else out


def survival_amplitude_modes(p: ModelParams, t: float | np.ndarray) -> np.ndarray:
    """Cross-check route: mode sum f = sum_j (R_{2,j})^2 e^{-i eps_j t}.

    The squares of the rotation entries are the biorthogonal mode weights;
    f(0) = 1 follows from sin^2 + cos^2 = 1.  Ill-conditioned (and raising)
    near the exceptional point.
    """
    t_arr = _as_time_array(t)
    blk = k_block(p, 1)
    if blk.rotation is None:
        raise ExceptionalPointError("mode sum needs eigenvectors; none at the defect")
    weights = blk.rotation[1, :] ** 2
    out = weights[0] * np.exp(-1j * blk.eps[0] * t_arr) + weights[1] * np.exp(
        -1j * blk.eps[1] * t_arr
    )
    return out[0] if np.ndim(t) == 0 else out


def evolve_single_excitation(
    p: ModelParams, state: SingleExcitationState, t: float | np.ndarray
) -> np.ndarray:
    """Reduced atomic density matrix at time(s) t for one initial excitation.

    Returns shape (2, 2) for scalar ``t`` and (len(t), 2, 2) for a grid.  The
    result is exactly trace-one and positive semidefinite for |f| <= 1.
    """
    t_arr = _as_time_array(t)
    f = np.atleast_1d(survival_amplitude(p, t_arr))
    pe = np.abs(state.c_e * f) ** 2
    coh = state.c_e * np.conj(state.c_g) * f
    rho = np.empty((t_arr.size, 2, 2), dtype=complex)
    rho[:, 0, 0] = 1.0 - pe
    rho[:, 1, 1] = pe
    rho[:, 1, 0] = coh
    rho[:, 0, 1] = np.conj(coh)
    return rho[0] if np.ndim(t) == 0 else rho


def atom_observables_loss(
    p: ModelParams, state: SingleExcitationState, t_grid: np.ndarray
) -> TimeSeries:
    """Excited population, purity and |f|^2 for one initial excitation.

    p_e = |c_e f|^2 and P = 1 + 2 |c_e|^4 |f|^2 (|f|^2 - 1); the purity is
    cross-checked against Tr(rho_at^2) of the evolved state within 1e-10.
    Times are reported in units of 1/g.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValueError("t_grid must be a one-dimensional array of times")
    if np.any(t_grid < 0):
        raise ValueError("negative times are not supported")
    f2 = np.abs(np.atleast_1d(survival_amplitude(p, t_grid))) ** 2
    ce2 = abs(state.c_e) ** 2
    pe = ce2 * f2
    purity = 1.0 + 2.0 * ce2**2 * f2 * (f2 - 1.0)
    rho = evolve_single_excitation(p, state, t_grid)
    direct = np.einsum("tij,tji->t", rho, rho).real
    drift = np.abs(direct - purity).max()
    if drift >= 1e-10:
        raise RuntimeError(
            f"purity formula disagrees with Tr(rho^2) by {drift:.2e}"
        )
    meta = {
        "scenario": "loss",
        "g": p.g,
        "delta": p.delta,
        "kappa": p.kappa,
        "c_g": state.c_g,
        "c_e": state.c_e,
    }
    return TimeSeries(
        axis=t_grid * p.g,
        columns={"p_e": pe, "purity": purity, "f_abs2": f2},
        metadata=meta,
    )


def free_evolution_deviation(p: ModelParams, t: float | np.ndarray) -> np.ndarray:
    """f(t) - exp(-i delta t): distance from detuned free atomic evolution.

    Property-test helper for the strong-loss protection limit, in which the
    deviation shrinks monotonically with kappa at fixed g, delta, t.
    """
    t_arr = _as_time_array(t)
    out = np.atleast_1d(survival_amplitude(p, t_arr)) - np.exp(-1j * p.delta * t_arr)
    return out[0] if np.ndim(t) == 0 else out
