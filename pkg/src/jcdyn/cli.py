"""Command-line front end.

Subcommands:

* ``fig2`` -- dephasing trajectories (p_e, purity, inversion) per gamma/g;
* ``fig3`` -- loss trajectories (p_e, purity, |f|^2) per kappa/g;
* ``spectrum`` -- closed-form generator eigenvalues vs ratio with residuals;
* ``validate`` -- internal consistency sweep (closed forms vs integrator).

Exit codes: 0 success, 2 configuration/validation error, 3 numerical failure.
Flags may also be given in a flat ``key = value`` config file (``--config``);
explicit flags override file values.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .loss import ExceptionalPointError
from .mesolve import IntegrationError
from .runs import (
    DEFAULT_RATIOS,
    ConfigError,
    NumericsError,
    RunConfig,
    run_figure2,
    run_figure3,
    run_spectrum_sweep,
    run_validation,
    write_outputs,
)

__all__ = ["build_parser", "main"]

_SCENARIO_FOR = {"fig2": "dephasing", "fig3": "loss"}
_DELTA_DEFAULT = {"dephasing": 0.0, "loss": 0.8}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--ratio",
        action="append",
        type=float,
        default=None,
        metavar="R",
        help="rate/g ratio; repeat for several (default: 1 10 100 1000)",
    )
    common.add_argument(
        "--delta",
        type=float,
        default=None,
        help="detuning over g (default: 0 for dephasing, 0.8 for loss)",
    )
    common.add_argument(
        "--tmax", type=float, default=None, help="final time in 1/g units (default 10)"
    )
    common.add_argument(
        "--samples", type=int, default=None, help="number of time samples, >= 2 (default 200)"
    )
    common.add_argument(
        "--method",
        choices=("exact", "oracle", "both"),
        default=None,
        help="closed forms, brute-force integrator, or both with deviations (default exact)",
    )
    common.add_argument("--out", default=None, help="output directory (default ./out)")
    common.add_argument(
        "--format", dest="fmt", choices=("csv", "json"), default=None, help="output format"
    )
    common.add_argument(
        "--fock-dim",
        dest="fock_dim",
        type=int,
        default=None,
        help="cavity truncation for the integrator (default 4)",
    )
    common.add_argument(
        "--initial",
        choices=("excited", "amps"),
        default=None,
        help="initial atom state: excited, or amplitudes via --cg/--ce",
    )
    common.add_argument("--cg", default=None, help="ground amplitude (complex), with --initial amps")
    common.add_argument("--ce", default=None, help="excited amplitude (complex), with --initial amps")
    common.add_argument("--config", default=None, help="flat key = value file; flags override it")

    parser = argparse.ArgumentParser(
        prog="jcdyn",
        description="Exact vs brute-force dynamics of an atom in a dephasing or lossy cavity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser(
        "fig2", parents=[common], help="dephasing protection trajectories per gamma/g"
    )
    sub.add_parser("fig3", parents=[common], help="loss protection trajectories per kappa/g")
    spectrum = sub.add_parser(
        "spectrum", parents=[common], help="closed-form eigenvalues vs ratio, with residuals"
    )
    spectrum.add_argument(
        "--scenario", choices=("dephasing", "loss"), default=None, help="which generator to sweep"
    )
    sub.add_parser("validate", parents=[common], help="run the internal consistency sweep")
    return parser


def _load_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    data: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        data[key.strip().lower().replace("-", "_")] = val.strip()
    return data


def _pick(flag_value, file_cfg: dict[str, str], key: str, conv, default):
    if flag_value is not None:
        return flag_value
    if key in file_cfg:
        try:
            return conv(file_cfg[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config file: bad value for {key!r}: {exc}") from exc
    return default


def _parse_ratio_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex amplitude {text!r}") from exc


def _build_config(args: argparse.Namespace) -> RunConfig:
    file_cfg = _load_config_file(args.config) if args.config else {}
    scenario = _pick(
        getattr(args, "scenario", None),
        file_cfg,
        "scenario",
        str,
        _SCENARIO_FOR.get(args.command, "dephasing"),
    )
    ratios = _pick(
        tuple(args.ratio) if args.ratio else None,
        file_cfg,
        "ratio",
        _parse_ratio_list,
        DEFAULT_RATIOS,
    )
    delta = _pick(args.delta, file_cfg, "delta", float, _DELTA_DEFAULT.get(scenario, 0.0))
    initial = _pick(args.initial, file_cfg, "initial", str, "excited")
    if initial == "amps":
        cg = _pick(args.cg, file_cfg, "cg", str, None)
        ce = _pick(args.ce, file_cfg, "ce", str, None)
        if cg is None or ce is None:
            raise ConfigError("--initial amps needs both --cg and --ce")
        initial_value: str | tuple[complex, complex] = (_parse_complex(cg), _parse_complex(ce))
    else:
        initial_value = initial
    return RunConfig(
        scenario=scenario,
        ratios=ratios,
        delta_over_g=delta,
        t_max_over_g=_pick(args.tmax, file_cfg, "tmax", float, 10.0),
        samples=_pick(args.samples, file_cfg, "samples", int, 200),
        initial=initial_value,
        method=_pick(args.method, file_cfg, "method", str, "exact"),
        out=_pick(args.out, file_cfg, "out", str, "out"),
        fmt=_pick(args.fmt, file_cfg, "format", str, "csv"),
        fock_dim=_pick(args.fock_dim, file_cfg, "fock_dim", int, 4),
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _build_config(args)
        if args.command == "validate":
            results = run_validation(cfg)
            for res in results:
                status = "PASS" if res.ok else "FAIL"
                print(f"[{status}] {res.name}: {res.detail}")
            return 0 if all(r.ok for r in results) else 3
        if args.command == "fig2":
            result: object = run_figure2(cfg)
        elif args.command == "fig3":
            result = run_figure3(cfg)
        elif args.command == "spectrum":
            result = run_spectrum_sweep(cfg)
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
        paths = write_outputs(result, cfg, args.command)
        for path in paths:
            print(f"wrote {path}")
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationError, NumericsError, ExceptionalPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
