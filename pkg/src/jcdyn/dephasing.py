"""Closed-form sector dynamics for the dephasing scenario.

The dephasing generator conserves the total excitation number of bras and
kets separately, so the four outer products built from the degenerate pair

    |1> = |g, n>,   |2> = |e, n-1>        (n >= 1)

span an exactly invariant 4-dimensional operator subspace.  Everything in
this module lives on that subspace: the 4x4 generator block (obtained by
projecting the full superoperator, never transcribed by hand), its spectrum
in closed form, and the atomic observables of the initially excited atom.

With b = g*sqrt(n) and the ordering (|1><1|, |1><2|, |2><1|, |2><2|) the
block reads

    [[    0,        i b,       -i b,      0  ],
     [  i b,  -gamma+i delta,    0,     -i b ],
     [ -i b,        0,  -gamma-i delta,  i b ],
     [    0,       -i b,        i b,      0  ]]

whose characteristic polynomial factors as z * Q3(z) with

    Q3(z) = z^3 + 2 gamma z^2 + (gamma^2 + delta^2 + 4 g^2 n) z
            + 4 g^2 n gamma.

On resonance (delta = 0) the four eigenvalues are {0, -gamma, l+, l-} with

    l_pm = -(gamma/2) (1 -+ sqrt(1 - eta_n)),   eta_n = 16 g^2 n / gamma^2,

so eta_n < 1 is overdamped (protected) and eta_n > 1 oscillatory.  The atomic
inversion of the initially excited atom is

    h_n(t) = [(1+u) e^{l+ t} - (1-u) e^{l- t}] / (2u),   u = sqrt(1 - eta_n),

real for every eta_n, with p_e = (1 + h_n)/2 and purity P = (1 + h_n^2)/2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import ModelParams, Scenario, liouvillian
from .operators import HilbertDims, basis_state, unvectorize, vectorize
from .series import TimeSeries

__all__ = [
    "SectorBlock",
    "SectorSpectrum",
    "EXCITED_SECTOR_INIT",
    "block_matrix",
    "eigenvalues_resonant",
    "eigenvalues_general",
    "evolve_sector",
    "atomic_inversion",
    "purity_closed_form",
    "atom_observables_dephasing",
]

# vec of |e,n-1><e,n-1| in the sector ordering above: the initially excited atom.
EXCITED_SECTOR_INIT = np.array([0.0, 0.0, 0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class SectorBlock:
    """Restriction of the dephasing generator to one excitation sector."""

    n: int
    eta: float
    matrix: np.ndarray  # 4x4, ordering (|1><1|, |1><2|, |2><1|, |2><2|)


@dataclass(frozen=True)
class SectorSpectrum:
    """Four sector eigenvalues; ``values[0]`` is always the exact zero.

    ``method`` records how the remaining roots were obtained: "resonant"
    (delta = 0 closed form), "cardano" (general-detuning cubic), or "numeric"
    (fallback when the cubic intermediates degenerate).  For the cardano path
    ``cubic_intermediates`` holds (q, r, s).
    """

    values: tuple[complex, complex, complex, complex]
    eta: float
    method: str
    cubic_intermediates: tuple[complex, complex, complex] | None = None

    @property
    def decay_pair(self) -> tuple[complex, complex]:
        """(l+, l-) on the resonant path; the last two roots otherwise."""
        return self.values[2], self.values[3]


def _eta(p: ModelParams, n: int) -> float:
    if p.gamma == 0.0:
        return float("inf")
    return 16.0 * p.g**2 * n / p.gamma**2


def _sector_kets(dims: HilbertDims, n: int) -> tuple[np.ndarray, np.ndarray]:
    return basis_state(dims, 0, n), basis_state(dims, 1, n - 1)


def block_matrix(p: ModelParams, n: int) -> SectorBlock:
    """Project the full dephasing generator onto excitation sector ``n``.

    The projection is done on a minimal Hilbert space (fock_dim = n + 1),
    which is exact because the sector subspace is invariant and the states
    |g,n>, |e,n-1> fit below the truncation edge.
    """
    if n < 1:
        raise ValueError(f"sector index n must be >= 1, got {n}")
    dims = HilbertDims(fock_dim=max(n + 1, 2))
    local = ModelParams(g=p.g, delta=p.delta, gamma=p.gamma, kappa=0.0, dims=dims)
    full = liouvillian(local, Scenario.DEPHASING)
    k1, k2 = _sector_kets(dims, n)
    outers = [
        np.outer(k1, k1.conj()),
        np.outer(k1, k2.conj()),
        np.outer(k2, k1.conj()),
        np.outer(k2, k2.conj()),
    ]
    block = np.empty((4, 4), dtype=complex)
    for j, ej in enumerate(outers):
        image = unvectorize(full @ vectorize(ej))
        for i, ei in enumerate(outers):
            block[i, j] = np.trace(ei.conj().T @ image)
    return SectorBlock(n=n, eta=_eta(p, n), matrix=block)


def eigenvalues_resonant(p: ModelParams, n: int) -> SectorSpectrum:
    """Sector spectrum {0, -gamma, l+, l-} on resonance (delta = 0)."""
    if p.delta != 0.0:
        raise ValueError(f"resonant closed form needs delta = 0, got {p.delta}")
    if n < 1:
        raise ValueError(f"sector index n must be >= 1, got {n}")
    eta = _eta(p, n)
    if p.gamma == 0.0:
        # Pure Hamiltonian limit of the same formulas: l_pm -> -+ 2i g sqrt(n).
        b = 2.0 * p.g * np.sqrt(n)
        return SectorSpectrum(values=(0.0, 0.0, 1j * b, -1j * b), eta=eta, method="resonant")
    u = np.sqrt(1.0 - eta + 0j)
    l_plus = -0.5 * p.gamma * (1.0 - u)
    l_minus = -0.5 * p.gamma * (1.0 + u)
    return SectorSpectrum(
        values=(0.0, -p.gamma + 0j, l_plus, l_minus), eta=eta, method="resonant"
    )


def _cubic_coefficients(p: ModelParams, n: int) -> tuple[float, float, float]:
    a2 = 2.0 * p.gamma
    a1 = p.gamma**2 + p.delta**2 + 4.0 * p.g**2 * n
    a0 = 4.0 * p.g**2 * n * p.gamma
    return a2, a1, a0


def eigenvalues_general(p: ModelParams, n: int) -> SectorSpectrum:
    """Sector spectrum for arbitrary detuning via the cubic in closed form.

    After removing the exact zero root, the remaining cubic
    z^3 + a2 z^2 + a1 z + a0 is depressed and solved trigonometric-free:
    q = p3/3, r = -q0/2, s = (r + sqrt(q^3 + r^2))^(1/3) with principal
    branches; any branch choice permutes the same root multiset.  When |s|
    underflows relative to the natural scale (confluent roots) the block is
    diagonalized numerically instead.
    """
    if n < 1:
        raise ValueError(f"sector index n must be >= 1, got {n}")
    eta = _eta(p, n)
    a2, a1, a0 = _cubic_coefficients(p, n)
    p3 = a1 - a2**2 / 3.0
    q0 = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    q = p3 / 3.0
    r = -q0 / 2.0
    s = (r + np.sqrt(q**3 + r**2 + 0j)) ** (1.0 / 3.0)
    scale = max(abs(q) ** 0.5, abs(r) ** (1.0 / 3.0))
    if scale == 0.0 or abs(s) < 1e-8 * scale:
        # Confluent cubic: fall back to the numerically diagonalized block.
        numeric = np.linalg.eigvals(block_matrix(p, n).matrix)
        order = np.argsort(np.abs(numeric))
        rest = sorted(
            (numeric[i] for i in order[1:]), key=lambda z: (z.real, z.imag), reverse=True
        )
        return SectorSpectrum(values=(0.0, *rest), eta=eta, method="numeric")
    s2 = -q / s
    y1 = s + s2
    y_pm = 1j * (np.sqrt(3.0) / 2.0) * (s - s2)
    shift = a2 / 3.0
    z1 = y1 - shift
    z_plus = -y1 / 2.0 + y_pm - shift
    z_minus = -y1 / 2.0 - y_pm - shift
    return SectorSpectrum(
        values=(0.0, z1, z_plus, z_minus),
        eta=eta,
        method="cardano",
        cubic_intermediates=(q + 0j, r + 0j, s),
    )


def evolve_sector(
    p: ModelParams, n: int, v0: np.ndarray, t: float | np.ndarray
) -> np.ndarray:
    """Propagate a sector vector: v(t) = exp(block * t) v0.

    Uses the eigendecomposition of the projected block; if the eigenvector
    matrix is ill-conditioned (confluent spectrum) each requested time falls
    back to a dense matrix exponential.  Returns shape (4,) for scalar ``t``
    and (len(t), 4) for a grid.
    """
    v0 = np.asarray(v0, dtype=complex)
    if v0.shape != (4,):
        raise ValueError(f"sector vector must have shape (4,), got {v0.shape}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("negative times are not supported")
    block = block_matrix(p, n).matrix
    w, v = np.linalg.eig(block)
    if np.linalg.cond(v) < 1e8:
        coeff = np.linalg.solve(v, v0)
        out = (v @ (np.exp(np.multiply.outer(w, t_arr)) * coeff[:, None])).T
    else:
        out = np.stack([scipy.linalg.expm(block * tk) @ v0 for tk in t_arr])
    return out[0] if np.ndim(t) == 0 else out


def atomic_inversion(p: ModelParams, n: int, t: float | np.ndarray) -> np.ndarray:
    """h_n(t) = p_e - p_g for the initially excited atom, on resonance.

    Evaluated in an overflow-safe form: away from eta = 1 as a sum of two
    exponentials whose exponents all have non-positive real part; within
    |u| < 1e-3 of the degeneracy via the confluent cosh/sinhc limit.  The
    result is real for every eta up to roundoff (conjugate mode pairing);
    the imaginary part is returned unstripped so callers can assert on it.
    """
    if p.delta != 0.0:
        raise ValueError(f"closed-form inversion needs delta = 0, got {p.delta}")
    if n < 1:
        raise ValueError(f"sector index n must be >= 1, got {n}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("negative times are not supported")
    if p.gamma == 0.0:
        out = np.cos(2.0 * p.g * np.sqrt(n) * t_arr).astype(complex)
        return out[0] if np.ndim(t) == 0 else out
    u = np.sqrt(1.0 - _eta(p, n) + 0j)
    half = 0.5 * p.gamma * t_arr
    x = u * half
    if abs(u) < 1e-3:
        small = np.abs(x) < 1e-4
        xs = np.where(small, 1.0, x)
        sinhc = np.where(small, 1.0 + x * x / 6.0 + x**4 / 120.0, np.sinh(xs) / xs)
        out = np.exp(-half) * (np.cosh(x) + half * sinhc)
    else:
        ep = np.exp(-half + x)
        em = np.exp(-half - x)
        zero = x == 0
        ratio = np.where(zero, 1.0, (ep - em) / np.where(zero, 1.0, 2.0 * x))
        out = 0.5 * (ep + em) + half * ratio
    return out[0] if np.ndim(t) == 0 else out


def purity_closed_form(p: ModelParams, n: int, t: float | np.ndarray) -> np.ndarray:
    """Atomic purity of the initially excited atom as an explicit exponential sum.

    P(t) = 1/2 + [ -eta e^{-gamma t} + f_plus(t) + f_minus(t) ] / (4 (1 - eta)),
    f_pm(t) = (1 pm u)^2 e^{2 l_pm t} / 2.

    The sign of the eta e^{-gamma t} term is fixed by P(0) = 1 (and verified
    against the brute-force integrator in the tests).  This is a diagnostic
    form: it is singular at eta = 1, where the equivalent (1 + h^2)/2 route
    used by :func:`atom_observables_dephasing` remains finite.
    """
    if p.delta != 0.0:
        raise ValueError(f"closed-form purity needs delta = 0, got {p.delta}")
    if p.gamma == 0.0:
        raise ValueError("explicit exponential form needs gamma > 0; use (1 + h^2)/2")
    eta = _eta(p, n)
    if abs(1.0 - eta) < 1e-9:
        raise ValueError("eta within 1e-9 of the degeneracy; use (1 + h^2)/2")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("negative times are not supported")
    u = np.sqrt(1.0 - eta + 0j)
    l_plus = -0.5 * p.gamma * (1.0 - u)
    l_minus = -0.5 * p.gamma * (1.0 + u)
    f_plus = 0.5 * (1.0 + u) ** 2 * np.exp(2.0 * l_plus * t_arr)
    f_minus = 0.5 * (1.0 - u) ** 2 * np.exp(2.0 * l_minus * t_arr)
    total = -eta * np.exp(-p.gamma * t_arr) + f_plus + f_minus
    out = 0.5 + total.real / (4.0 * (1.0 - eta))
    return out[0] if np.ndim(t) == 0 else out


def atom_observables_dephasing(
    p: ModelParams, n: int, t_grid: np.ndarray
) -> TimeSeries:
    """Inversion, excited-state population and purity of the initially excited atom.

    ``p_e`` comes from the closed-form inversion; the purity is computed from
    the evolved sector vector (the two populations), which stays finite at the
    spectral degeneracy.  Times are reported in units of 1/g.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValueError("t_grid must be a one-dimensional array of times")
    if np.any(t_grid < 0):
        raise ValueError("negative times are not supported")
    h = np.atleast_1d(atomic_inversion(p, n, t_grid))
    if np.abs(h.imag).max() >= 1e-10:
        raise RuntimeError(
            f"inversion picked up an imaginary part {np.abs(h.imag).max():.2e}"
        )
    h_re = h.real
    v = evolve_sector(p, n, EXCITED_SECTOR_INIT, t_grid)
    pops = v[:, [0, 3]]
    if np.abs(pops.imag).max() >= 1e-10:
        raise RuntimeError("sector populations picked up an imaginary part")
    purity = (pops.real**2).sum(axis=1)
    meta = {
        "scenario": "dephasing",
        "g": p.g,
        "delta": p.delta,
        "gamma": p.gamma,
        "n": n,
    }
    return TimeSeries(
        axis=t_grid * p.g,
        columns={"inversion": h_re, "p_e": (1.0 + h_re) / 2.0, "purity": purity},
        metadata=meta,
    )
