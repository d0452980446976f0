"""Command-line entry point: ``metriplectic {simulate,check,equilibria,list-systems}``.

Exit codes: 0 success, 1 config error, 2 system construction error,
3 invariant or check failure, 4 integration failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

from . import __version__
from .analysis import IntegrationError, find_equilibria, integrate, structural_checks
from .config import ConfigError, RunConfig, SystemConstructionError, build_system, load_config
from .dynamics import NonCasimirWarning
from .fields import default_samples
from .systems import list_builtins

EXIT_OK, EXIT_CONFIG, EXIT_SYSTEM, EXIT_INVARIANT, EXIT_INTEGRATION = range(5)

CSV_HEADER = ("t", "x", "y", "z", "H", "S", "sigma2", "ortho")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _vec(v) -> list[float]:
    return [float(c) for c in v]


def _load(path) -> tuple[RunConfig, object]:
    cfg = load_config(path)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonCasimirWarning)
        system = build_system(cfg.system)
    if not system.casimir_verified:
        print(
            f"WARNING: S is not a Casimir of P for system {system.name!r}; "
            "S need not decrease; monotonicity and orthogonality checks are disabled.",
            file=sys.stderr,
        )
    return cfg, system


def sample_row(t, d) -> dict:
    return {
        "t": float(t), "x": _vec(d.x), "H": d.H_val, "S": d.S_val,
        "dH": _vec(d.dH), "dS": _vec(d.dS), "sigma": _vec(d.sigma),
        "xi": _vec(d.xi), "xi_P": _vec(d.xi_P), "xi_g": _vec(d.xi_g),
        "dissipation": d.dissipation, "ortho_residual": d.ortho_residual,
        "P_rank": d.P_rank, "regular": bool(d.regular),
    }


def write_csv(path, record, every: int = 1) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for t, d in list(zip(record.sample_times, record.diagnostics))[::every]:
            w.writerow([_fmt(t), *map(_fmt, d.x), _fmt(d.H_val), _fmt(d.S_val),
                        _fmt(d.sigma2), _fmt(d.ortho_residual)])


def summary_dict(record) -> dict:
    s = record.summary
    return {
        "H_drift_max": s.H_drift_max,
        "S_monotone_violations": s.S_monotone_violations,
        "final_state": _vec(s.final_state),
        "terminated_at_rest": s.terminated_at_rest,
        "steps": s.steps,
        "t_final": float(record.times[-1]),
    }


def write_json(path, record, cfg: RunConfig, every: int = 1) -> None:
    doc = {
        "meta": {"config": cfg.raw, "version": __version__},
        "samples": [sample_row(t, d) for t, d in
                    list(zip(record.sample_times, record.diagnostics))[::every]],
        "summary": summary_dict(record),
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def cmd_simulate(args) -> int:
    cfg, system = _load(args.config)
    if cfg.x0 is None:
        raise ConfigError("simulate needs x0")
    fmt = args.format or cfg.output.format
    out = args.out or cfg.output.path or f"trajectory.{fmt}"
    try:
        record = integrate(system, cfg.x0, cfg.integrator)
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    if fmt == "csv":
        write_csv(out, record, cfg.output.every)
    else:
        write_json(out, record, cfg, cfg.output.every)

    s = record.summary
    failures = []
    H0 = system.H(cfg.x0)
    if s.H_drift_max > cfg.checks.h_drift_tol * (1.0 + abs(H0)):
        failures.append(f"H drift {s.H_drift_max:.3g} exceeds {cfg.checks.h_drift_tol:g}*(1+|H0|)")
    if cfg.checks.monotone and system.casimir_verified and s.S_monotone_violations:
        failures.append(f"{s.S_monotone_violations} S-monotonicity violations")
    if cfg.checks.ortho and system.casimir_verified:
        bad = sum(not d.orthogonal(cfg.checks.ortho_tol) for d in record.diagnostics)
        if bad:
            failures.append(f"{bad} samples violate orthogonality")
    status = "equilibrium" if s.terminated_at_rest else (
        "rest" if record.diagnostics[-1].sigma2 <= 1e-10 else "moving")
    violations = "n/a" if s.S_monotone_violations is None else s.S_monotone_violations
    print(f"final_state=({', '.join(_fmt(c) for c in s.final_state)}) "
          f"t={_fmt(record.times[-1])} H_drift={s.H_drift_max:.3e} "
          f"S_violations={violations} status={status} output={out}")
    for f in failures:
        print(f"INVARIANT FAILURE: {f}", file=sys.stderr)
    return EXIT_INVARIANT if failures else EXIT_OK


def cmd_check(args) -> int:
    cfg, system = _load(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    results = structural_checks(system, default_samples(args.samples, seed))
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        extra = f"  ({r.detail})" if r.detail else ""
        print(f"{tag} {r.name:<22} max_residual={r.max_residual:.3e}{extra}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT


def cmd_equilibria(args) -> int:
    cfg, system = _load(args.config)
    level = args.h_level
    if level is None:
        if cfg.x0 is None:
            raise ConfigError("equilibria needs --h-level or x0 in the config")
        level = system.H(cfg.x0)
    search = find_equilibria(system, level=level)
    doc = {
        "system": system.name,
        "H_level": level,
        "equilibria": [
            {
                "point": _vec(e.point),
                "residual": e.residual,
                "kind": e.kind,
                "regular": bool(e.regular),
                "stability": e.stability,
                "eigenvalues": [[float(z.real), float(z.imag)] for z in e.eigenvalues],
                "tangential_eigenvalues": [[float(z.real), float(z.imag)] for z in e.tangential_eigenvalues],
            }
            for e in search
        ],
        "nonconvergent_seeds": len(search.nonconvergent),
    }
    text = json.dumps(doc, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_list(args) -> int:
    for name, desc, prov in list_builtins():
        print(f"{name:<16} {desc}  [{prov}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metriplectic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a trajectory and write it to a file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="sample-based structural identity checks")
    p.add_argument("--config", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("equilibria", help="find and classify equilibria on an energy level")
    p.add_argument("--config", required=True)
    p.add_argument("--h-level", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("list-systems", help="list built-in systems")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for construction failures here
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemConstructionError as exc:
        print(f"cannot build system: {exc}", file=sys.stderr)
        return EXIT_SYSTEM


if __name__ == "__main__":
    sys.exit(main())
