"""Canonical parameter sweeps: protection trajectories, spectral tables, validation.

Everything here works in coupling units, g = 1: a sweep "ratio" is gamma/g
(dephasing) or kappa/g (loss), times are in 1/g, detunings in units of g.
Each run can be produced by the closed forms ("exact"), the brute-force
integrator ("oracle"), or both, in which case the pointwise deviation is
reported and must stay below 1e-6.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dephasing import (
    atom_observables_dephasing,
    block_matrix,
    eigenvalues_general,
    eigenvalues_resonant,
)
from .loss import (
    SingleExcitationState,
    atom_observables_loss,
    free_evolution_deviation,
    liouvillian_spectrum_loss,
)
from .mesolve import (
    IntegratorConfig,
    integrate_master_diag,
    propagate_expm,
    superop_spectrum,
    truncation_report,
)
from .model import ModelParams, Scenario, liouvillian
from .operators import HilbertDims, basis_state, partial_trace_cavity
from .series import TimeSeries, write_csv, write_json

__all__ = [
    "ConfigError",
    "NumericsError",
    "RunConfig",
    "ValidationResult",
    "DEFAULT_RATIOS",
    "run_figure2",
    "run_figure3",
    "run_spectrum_sweep",
    "run_validation",
    "write_outputs",
]

DEFAULT_RATIOS = (1.0, 10.0, 100.0, 1000.0)

# Deviation budget for exact-vs-oracle trajectory comparisons.
TRAJECTORY_TOL = 1e-6

# CPTP quality gates applied to every oracle trajectory.
TRACE_TOL = 1e-9
HERM_TOL = 1e-10
EIG_TOL = -1e-8


class ConfigError(ValueError):
    """A run configuration that cannot be executed as requested."""


class NumericsError(RuntimeError):
    """A numerical quality gate failed (consistency, CPTP, truncation)."""


@dataclass
class RunConfig:
    scenario: str
    ratios: tuple[float, ...] = DEFAULT_RATIOS
    delta_over_g: float = 0.0
    t_max_over_g: float = 10.0
    samples: int = 200
    initial: str | tuple[complex, complex] = "excited"
    method: str = "exact"
    out: str = "out"
    fmt: str = "csv"
    fock_dim: int = 4

    def __post_init__(self) -> None:
        if self.scenario not in ("dephasing", "loss"):
            raise ConfigError(
                f"scenario must be 'dephasing' or 'loss', got {self.scenario!r}"
            )
        try:
            self.ratios = tuple(float(r) for r in self.ratios)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"ratios must be numbers: {exc}") from exc
        if not self.ratios:
            raise ConfigError("at least one ratio is required")
        if any(r <= 0 for r in self.ratios):
            raise ConfigError(f"ratios must be positive, got {self.ratios}")
        if not np.isfinite(self.delta_over_g):
            raise ConfigError(f"delta must be finite, got {self.delta_over_g}")
        if not (self.t_max_over_g > 0):
            raise ConfigError(f"tmax must be positive, got {self.t_max_over_g}")
        if self.samples < 2:
            raise ConfigError(f"samples must be >= 2, got {self.samples}")
        if self.method not in ("exact", "oracle", "both"):
            raise ConfigError(
                f"method must be exact, oracle or both, got {self.method!r}"
            )
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")
        if not (2 <= self.fock_dim <= 16):
            raise ConfigError(
                f"fock_dim must be between 2 and 16 (dense superoperator limit), "
                f"got {self.fock_dim}"
            )
        if isinstance(self.initial, str):
            if self.initial != "excited":
                raise ConfigError(
                    f"initial must be 'excited' or a (c_g, c_e) pair, got {self.initial!r}"
                )
        else:
            try:
                cg, ce = (complex(z) for z in self.initial)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"initial amplitudes must be two complex numbers: {exc}") from exc
            norm = abs(cg) ** 2 + abs(ce) ** 2
            if abs(norm - 1.0) > 1e-9:
                raise ConfigError(
                    f"initial amplitudes must satisfy |c_g|^2 + |c_e|^2 = 1 within 1e-9, "
                    f"got {norm!r}"
                )
            scale = 1.0 / np.sqrt(norm)
            self.initial = (cg * scale, ce * scale)

    @property
    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max_over_g, self.samples)


@dataclass
class ValidationResult:
    name: str
    ok: bool
    detail: str


def _complex_str(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def _metadata(cfg: RunConfig, command: str, ratio: float | None = None) -> dict[str, object]:
    md: dict[str, object] = {
        "command": command,
        "scenario": cfg.scenario,
        "delta": f"{cfg.delta_over_g:.17g}",
        "tmax": f"{cfg.t_max_over_g:.17g}",
        "samples": cfg.samples,
        "method": cfg.method,
        "fock_dim": cfg.fock_dim,
        "format": cfg.fmt,
    }
    if ratio is not None:
        md["ratio"] = f"{ratio:g}"
    else:
        md["ratio"] = ",".join(f"{r:g}" for r in cfg.ratios)
    if isinstance(cfg.initial, str):
        md["initial"] = "excited"
    else:
        md["initial"] = "amps"
        md["cg"] = _complex_str(cfg.initial[0])
        md["ce"] = _complex_str(cfg.initial[1])
    return md


def _params(cfg: RunConfig, ratio: float) -> ModelParams:
    return ModelParams(
        g=1.0,
        delta=cfg.delta_over_g,
        gamma=ratio if cfg.scenario == "dephasing" else 0.0,
        kappa=ratio if cfg.scenario == "loss" else 0.0,
        dims=HilbertDims(fock_dim=cfg.fock_dim),
    )


def _initial_state(cfg: RunConfig) -> SingleExcitationState:
    if isinstance(cfg.initial, str):
        return SingleExcitationState.excited()
    return SingleExcitationState(c_g=cfg.initial[0], c_e=cfg.initial[1])


def _range_check(columns: dict[str, np.ndarray]) -> None:
    pe = columns["p_e"]
    purity = columns["purity"]
    if pe.min() < -1e-9 or pe.max() > 1.0 + 1e-9:
        raise NumericsError(f"p_e left [0, 1]: range [{pe.min():.3e}, {pe.max():.3e}]")
    if purity.min() < 0.5 - 1e-9 or purity.max() > 1.0 + 1e-9:
        raise NumericsError(
            f"purity left [1/2, 1]: range [{purity.min():.3e}, {purity.max():.3e}]"
        )


def _exact_columns(cfg: RunConfig, ratio: float) -> dict[str, np.ndarray]:
    p = _params(cfg, ratio)
    grid = cfg.time_grid
    if cfg.scenario == "dephasing":
        state = _initial_state(cfg)
        if abs(state.c_g) > 0:
            raise ConfigError(
                "dephasing closed forms cover the initially excited atom only; "
                "use --initial excited or method=oracle"
            )
        if cfg.delta_over_g != 0.0:
            raise ConfigError(
                "dephasing closed forms are resonant (delta = 0); "
                "use --delta 0 or method=oracle"
            )
        ts = atom_observables_dephasing(p, 1, grid)
    else:
        ts = atom_observables_loss(p, _initial_state(cfg), grid)
    _range_check(ts.columns)
    return ts.columns


def _oracle_columns(cfg: RunConfig, ratio: float) -> dict[str, np.ndarray]:
    p = _params(cfg, ratio)
    scen = Scenario.DEPHASING if cfg.scenario == "dephasing" else Scenario.LOSS
    state = _initial_state(cfg)
    psi0 = state.c_g * basis_state(p.dims, 0, 0) + state.c_e * basis_state(p.dims, 1, 0)
    rho0 = np.outer(psi0, psi0.conj())
    states, diag = integrate_master_diag(
        liouvillian(p, scen), rho0, cfg.time_grid, IntegratorConfig()
    )
    if diag.max_trace_drift > TRACE_TOL:
        raise NumericsError(f"oracle trace drift {diag.max_trace_drift:.2e} > {TRACE_TOL}")
    if diag.max_herm_drift > HERM_TOL:
        raise NumericsError(f"oracle Hermiticity drift {diag.max_herm_drift:.2e} > {HERM_TOL}")
    if diag.min_eigenvalue < EIG_TOL:
        raise NumericsError(f"oracle produced eigenvalue {diag.min_eigenvalue:.2e} < {EIG_TOL}")
    if p.dims.fock_dim >= 4:
        report = truncation_report(states, p.dims)
        if not report.ok:
            raise NumericsError(
                f"truncation leakage {report.max_leakage:.2e} at fock_dim "
                f"{p.dims.fock_dim}; increase --fock-dim"
            )
    atom = np.stack([partial_trace_cavity(r, p.dims) for r in states])
    pe = atom[:, 1, 1].real
    purity = np.einsum("tij,tji->t", atom, atom).real
    cols = {"p_e": pe, "purity": purity}
    _range_check(cols)
    return cols


def _series_for(cfg: RunConfig, command: str, ratio: float) -> TimeSeries:
    if cfg.method == "exact":
        cols = dict(_exact_columns(cfg, ratio))
    elif cfg.method == "oracle":
        cols = dict(_oracle_columns(cfg, ratio))
    else:
        cols = dict(_exact_columns(cfg, ratio))
        oracle = _oracle_columns(cfg, ratio)
        dev = 0.0
        for name in ("p_e", "purity"):
            cols[f"{name}_oracle"] = oracle[name]
            cols[f"dev_{name}"] = np.abs(cols[name] - oracle[name])
            dev = max(dev, float(cols[f"dev_{name}"].max()))
        if dev >= TRAJECTORY_TOL:
            raise NumericsError(
                f"exact and oracle trajectories disagree by {dev:.2e} "
                f"(tol {TRAJECTORY_TOL}) at ratio {ratio:g}"
            )
    return TimeSeries(
        axis=cfg.time_grid,
        columns=cols,
        metadata=_metadata(cfg, command, ratio),
    )


def run_figure2(cfg: RunConfig) -> dict[float, TimeSeries]:
    """Dephasing protection trajectories, one series per gamma/g ratio."""
    if cfg.scenario != "dephasing":
        raise ConfigError(f"fig2 is the dephasing sweep, got scenario {cfg.scenario!r}")
    return {ratio: _series_for(cfg, "fig2", ratio) for ratio in cfg.ratios}


def run_figure3(cfg: RunConfig) -> dict[float, TimeSeries]:
    """Loss protection trajectories, one series per kappa/g ratio."""
    if cfg.scenario != "loss":
        raise ConfigError(f"fig3 is the loss sweep, got scenario {cfg.scenario!r}")
    return {ratio: _series_for(cfg, "fig3", ratio) for ratio in cfg.ratios}


def _assignment_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max pairing distance between two equal-size eigenvalue multisets."""
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def _containment_distance(needles: np.ndarray, haystack: np.ndarray) -> float:
    """Max over needles of the distance to the nearest haystack eigenvalue."""
    return float(np.abs(needles[:, None] - haystack[None, :]).min(axis=1).max())


def run_spectrum_sweep(cfg: RunConfig) -> TimeSeries:
    """Closed-form generator eigenvalues vs ratio, with numeric residuals.

    Dephasing rows hold the four sector-1 eigenvalues and the residual of an
    optimal pairing against the numerically diagonalized block.  Loss rows
    hold the nine sector-pair eigenvalues with n, m <= 1 and the residual of
    their containment in the full numeric superoperator spectrum.
    """
    ratios = np.asarray(cfg.ratios, dtype=float)
    if cfg.scenario == "dephasing":
        names = [f"eig{i}_{part}" for i in range(1, 5) for part in ("re", "im")]
        rows = []
        for ratio in cfg.ratios:
            p = _params(cfg, ratio)
            spec = (
                eigenvalues_resonant(p, 1)
                if cfg.delta_over_g == 0.0
                else eigenvalues_general(p, 1)
            )
            closed = np.asarray(spec.values, dtype=complex)
            numeric = np.linalg.eigvals(block_matrix(p, 1).matrix)
            residual = _assignment_distance(closed, numeric)
            rows.append([x for z in closed for x in (z.real, z.imag)] + [residual])
    else:
        modes_per_ratio = 9  # (2 * n_max + 1)^2 with n_max = 1
        names = [f"lam{i}_{part}" for i in range(1, modes_per_ratio + 1) for part in ("re", "im")]
        rows = []
        for ratio in cfg.ratios:
            p = _params(cfg, ratio)
            modes = liouvillian_spectrum_loss(p, 1)
            closed = np.asarray([m.value for m in modes], dtype=complex)
            numeric = superop_spectrum(liouvillian(p, Scenario.LOSS))
            residual = _containment_distance(closed, numeric)
            rows.append([x for z in closed for x in (z.real, z.imag)] + [residual])
    data = np.asarray(rows, dtype=float)
    columns = {name: data[:, i] for i, name in enumerate(names)}
    columns["residual"] = data[:, -1]
    return TimeSeries(
        axis=ratios,
        columns=columns,
        metadata=_metadata(cfg, "spectrum"),
        axis_name="ratio",
    )


def _trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(0.5 * np.abs(np.linalg.eigvalsh(a - b)).sum())


def _steady_state_check(scenario: str, ratio: float, fock_dim: int) -> float:
    """Trace distance from the long-horizon state to its known limit.

    Horizon 50/g stretched by the ratio: protection slows convergence, so the
    slowest mode relaxes at a rate ~ 4 g^2 / rate for strong damping.
    """
    delta = 0.8 if scenario == "loss" else 0.0
    dims = HilbertDims(fock_dim=fock_dim)
    p = ModelParams(
        g=1.0,
        delta=delta,
        gamma=ratio if scenario == "dephasing" else 0.0,
        kappa=ratio if scenario == "loss" else 0.0,
        dims=dims,
    )
    scen = Scenario.DEPHASING if scenario == "dephasing" else Scenario.LOSS
    rho0 = np.outer(basis_state(dims, 1, 0), basis_state(dims, 1, 0).conj())
    t_end = 50.0 * max(1.0, ratio)
    rho = propagate_expm(liouvillian(p, scen), rho0, t_end)
    if scenario == "loss":
        target = np.outer(basis_state(dims, 0, 0), basis_state(dims, 0, 0).conj())
        return _trace_distance(rho, target)
    atom = partial_trace_cavity(rho, dims)
    return _trace_distance(atom, 0.5 * np.eye(2, dtype=complex))


def run_validation(cfg: RunConfig) -> list[ValidationResult]:
    """Cross-check closed forms against the oracle across both scenarios.

    Covers trajectory equivalence (including the CPTP gates applied to every
    oracle run), spectral residuals, steady-state limits, and the two
    protection limit laws.
    """
    results: list[ValidationResult] = []
    for scenario in ("dephasing", "loss"):
        delta = 0.0 if scenario == "dephasing" else 0.8
        sub = RunConfig(
            scenario=scenario,
            ratios=cfg.ratios,
            delta_over_g=delta,
            t_max_over_g=cfg.t_max_over_g,
            samples=cfg.samples,
            method="both",
            out=cfg.out,
            fmt=cfg.fmt,
            fock_dim=cfg.fock_dim,
        )
        worst = 0.0
        try:
            for ratio in sub.ratios:
                series = _series_for(sub, "validate", ratio)
                worst = max(
                    worst,
                    float(series.columns["dev_p_e"].max()),
                    float(series.columns["dev_purity"].max()),
                )
            results.append(
                ValidationResult(
                    f"trajectory:{scenario}",
                    worst < TRAJECTORY_TOL,
                    f"max |exact - oracle| = {worst:.2e} (tol {TRAJECTORY_TOL:g})",
                )
            )
        except NumericsError as exc:
            results.append(ValidationResult(f"trajectory:{scenario}", False, str(exc)))

    spec_cfg = RunConfig(
        scenario="dephasing",
        ratios=cfg.ratios,
        delta_over_g=0.0,
        fock_dim=cfg.fock_dim,
    )
    residual = float(run_spectrum_sweep(spec_cfg).columns["residual"].max())
    results.append(
        ValidationResult(
            "spectrum:dephasing",
            residual < 1e-9,
            f"max closed-vs-numeric residual = {residual:.2e} (tol 1e-9)",
        )
    )

    worst_loss = 0.0
    for ratio in cfg.ratios:
        p = ModelParams(g=1.0, delta=0.8, kappa=ratio, dims=HilbertDims(cfg.fock_dim))
        modes = liouvillian_spectrum_loss(p, cfg.fock_dim - 1)
        closed = np.asarray([m.value for m in modes], dtype=complex)
        numeric = superop_spectrum(liouvillian(p, Scenario.LOSS))
        worst_loss = max(worst_loss, _containment_distance(closed, numeric))
    results.append(
        ValidationResult(
            "spectrum:loss",
            worst_loss < 1e-8,
            f"max containment residual = {worst_loss:.2e} (tol 1e-8)",
        )
    )

    for scenario in ("dephasing", "loss"):
        worst_td = max(
            _steady_state_check(scenario, ratio, cfg.fock_dim) for ratio in cfg.ratios
        )
        results.append(
            ValidationResult(
                f"steady_state:{scenario}",
                worst_td < 1e-6,
                f"max trace distance to the limit state = {worst_td:.2e} (tol 1e-6)",
            )
        )

    devs = []
    for kappa in (1e2, 1e3, 1e4):
        p = ModelParams(g=1.0, delta=0.8, kappa=kappa)
        devs.append(abs(free_evolution_deviation(p, 1.0)))
    ok = devs[0] > devs[1] > devs[2]
    results.append(
        ValidationResult(
            "limit:strong_loss",
            bool(ok),
            f"|f - e^(-i delta t)| at t=1/g over kappa/g (1e2,1e3,1e4): "
            + ", ".join(f"{d:.3e}" for d in devs),
        )
    )

    worst_rel = 0.0
    for eta in (1e-3, 1e-4):
        for (g, n) in ((1.0, 1), (0.5, 3)):
            gamma = 4.0 * g * np.sqrt(n / eta)
            p = ModelParams(g=g, gamma=gamma)
            l_plus = eigenvalues_resonant(p, n).values[2]
            asym = -4.0 * g**2 * n / gamma
            worst_rel = max(worst_rel, abs(l_plus - asym) / abs(asym))
    results.append(
        ValidationResult(
            "limit:weak_coupling",
            worst_rel < 0.01,
            f"max |l+ + 4 g^2 n / gamma| / |l+ asymptote| = {worst_rel:.2e} (tol 1e-2)",
        )
    )
    return results


def write_outputs(
    result: dict[float, TimeSeries] | TimeSeries, cfg: RunConfig, command: str
) -> list[Path]:
    """Write one file per series into the output directory; return the paths."""
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    writer = write_csv if cfg.fmt == "csv" else write_json
    ext = cfg.fmt
    paths = []
    if isinstance(result, TimeSeries):
        paths.append(writer(result, out_dir / f"{command}_{cfg.scenario}.{ext}"))
    else:
        for ratio, series in result.items():
            paths.append(writer(series, out_dir / f"{command}_ratio{ratio:g}.{ext}"))
    return paths
