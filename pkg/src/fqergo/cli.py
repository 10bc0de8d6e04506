"""Command-line front end.

    fqergo run    [--preset NAME] [--config FILE] [--seed N] [--error SPEC] [--set key=value]...
    fqergo oracle STATE_FILE SYSTEM
    fqergo sweep  --system 1q|2q --tau START:STOP:COUNT [--n-states N] [--seed N]

Exit codes: 0 success, 1 runtime failure, 2 configuration error.  The
output directory defaults to ``$FQERGO_OUTPUT_DIR`` or ``./fqergo-out``.
All files are written only after the computation finished.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments, report
from .config import ConfigError, parse_override, preset_names, resolve
from .feedback import ErrorModel, estimate_ergotropy, run_fqergo
from .hamiltonians import SYSTEMS, build_system
from .oracle import oracle_report
from .states import (
    InvalidStateError,
    basis_state,
    bell_phi_plus,
    density_from_bloch,
    load_density,
    parse_density_text,
    random_density,
    random_pure,
    validate_density,
)

log = logging.getLogger("fqergo")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2
ENV_OUTPUT = "FQERGO_OUTPUT_DIR"


def _output_dir(arg) -> Path:
    return Path(arg or os.environ.get(ENV_OUTPUT) or "fqergo-out")


def _state_from_spec(spec: str, n_qubits: int, seed: int):
    kind, _, arg = spec.partition(":")
    if kind == "random_pure":
        return random_pure(n_qubits, (seed, 0, 0))
    if kind == "random_mixed":
        return random_density(n_qubits, (seed, 0, 0))
    if kind == "bell":
        return bell_phi_plus()
    if kind == "basis":
        return basis_state(arg)
    if kind == "bloch":
        theta, phi, eps = (float(x) for x in arg.split(","))
        return density_from_bloch(theta, phi, eps)
    if kind == "entangled":
        return experiments.entangled_initial_state(float(arg))
    if kind == "file":
        return load_density(arg)
    raise ConfigError(f"unknown state spec {spec!r}", "state")


def _write_all(out_dir: Path, files: dict) -> None:
    for name, text in files.items():
        report.write_atomic(out_dir / name, text)


def cmd_run(args) -> int:
    overrides = []
    try:
        for item in args.set or ():
            overrides.append(parse_override(item))
        if args.seed is not None:
            overrides.append({"seed": args.seed})
        if args.error is not None:
            ErrorModel.parse(args.error)
            overrides.append({"fqergo": {"error": args.error}})
        if args.format:
            overrides.append({"output": {"formats": args.format.split(",")}})
        cfg = resolve(args.preset, args.config, overrides)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    fq = cfg.fqergo
    meta = cfg.fingerprint()
    files = {}
    try:
        h0, _ = cfg.build_system()
        if cfg.task == "single":
            rho = _state_from_spec(cfg.state, h0.n_qubits, cfg.seed)
            traj = run_fqergo(rho, h0, fq)
            rep = oracle_report(rho, h0)
            summary = {
                "config": meta,
                "estimated_ergotropy": estimate_ergotropy(traj),
                "estimated_ergotropy_local": traj.estimated_ergotropy_local,
                "estimated_ergotropy_global": traj.estimated_ergotropy_global,
                "estimated_gap": traj.estimated_gap,
                "oracle": rep.to_dict(),
            }
            files["trajectory.csv"] = report.trajectory_csv(traj)
            files["summary.json"] = report.to_json(summary)
            files["energy.svg"] = report.energy_plot([traj], metadata=meta)
        elif cfg.task == "suite":
            kind = cfg.state.removeprefix("random_")
            if h0.n_qubits == 1:
                res = experiments.single_qubit_suite(cfg.n_states, cfg.error_on, cfg.seed, fq, state_kind=kind)
            else:
                res = experiments.two_qubit_suite(
                    cfg.n_states, cfg.error_on, cfg.seed, fq, j=h0.coupling, state_kind=kind, local_opt=cfg.local_opt
                )
            for row in res:
                files[f"trajectories/state_{row.index:03d}.csv"] = report.trajectory_csv(row.trajectory)
            files["suite.csv"] = report.suite_csv(res)
            files["summary.json"] = report.to_json({"config": meta, **res.summary()})
            files["energy.svg"] = report.energy_plot([r.trajectory for r in res], metadata=meta)
            files["scatter.svg"] = report.estimate_scatter(res, metadata=meta)
        else:
            rows = experiments.entangled_family(cfg.nus, fq, j=h0.coupling)
            table = [
                [
                    report._num(r["nu"]),
                    report._num(r["entropy_bits"]),
                    report._num(r["trajectory"].estimated_ergotropy_local),
                    report._num(r["trajectory"].estimated_ergotropy_global),
                    report._num(r["trajectory"].estimated_gap),
                    report._num(r["oracle"].local_sum_ergotropy),
                    report._num(r["oracle"].ergotropy),
                    report._num(r["oracle"].gap),
                ]
                for r in rows
            ]
            files["entangled.csv"] = report._csv(
                ["nu", "entropy_bits", "estimated_local", "estimated_global", "estimated_gap", "exact_local_sum", "exact_ergotropy", "exact_gap"],
                table,
            )
            files["summary.json"] = report.to_json(
                {"config": meta, "rows": [dict(zip(["nu", "entropy_bits"], [r["nu"], r["entropy_bits"]]), oracle=r["oracle"].to_dict()) for r in rows]}
            )
            files["energy.svg"] = report.energy_plot([r["trajectory"] for r in rows], metadata=meta)
            for i, r in enumerate(rows):
                files[f"trajectories/nu_{i:02d}.csv"] = report.trajectory_csv(r["trajectory"])
    except (ConfigError, InvalidStateError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - report any runtime failure as exit 1
        log.exception("run failed")
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    wanted = set(cfg.formats)
    files = {k: v for k, v in files.items() if k.rsplit(".", 1)[-1] in wanted}
    out_dir = _output_dir(args.out)
    _write_all(out_dir, files)
    print(f"wrote {len(files)} files to {out_dir}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        text = Path(args.state_file).read_text()
        m = parse_density_text(text)
        rho = validate_density(m)
    except InvalidStateError as exc:
        print(report.to_json({"error": "invalid density matrix", "violations": [
            {"invariant": v.invariant, "magnitude": v.magnitude, "detail": v.detail} for v in exc.violations
        ]}), file=sys.stderr, end="")
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.system not in SYSTEMS:
        print(f"config error: unknown Hamiltonian {args.system!r}; choose from {sorted(SYSTEMS)}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        h0, _ = build_system(args.system, omega0=args.omega0, j=args.j)
        if h0.n_qubits != rho.n_qubits:
            print(f"config error: state has {rho.n_qubits} qubits, Hamiltonian {h0.n_qubits}", file=sys.stderr)
            return EXIT_CONFIG
        rep = oracle_report(rho, h0)
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(report.to_json({"system": args.system, "omega0": args.omega0, "j": h0.coupling, **rep.to_dict()}), end="")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        grid = experiments.parse_tau_range(args.tau)
        if args.system not in ("1q", "2q"):
            raise ValueError(f"--system must be 1q or 2q, got {args.system!r}")
        if args.n_states < 1 or args.cap < 1:
            raise ValueError("--n-states and --cap must be >= 1")
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        res = experiments.speed_sweep(args.system, grid, args.n_states, args.seed, cap=args.cap)
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    meta = {"seed": args.seed, "system": args.system, "tau": args.tau, "n_states": args.n_states}
    files = {
        "sweep.csv": report.sweep_csv(res),
        "sweep_summary.json": report.to_json({"config": meta, "per_tau": res.summary()}),
        "sweep.svg": report.sweep_scatter(res, metadata=meta),
    }
    out_dir = _output_dir(args.out)
    _write_all(out_dir, files)
    print(f"wrote {len(files)} files to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fqergo", description="Feedback-based ergotropy estimation")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a single FQErgo trajectory or a named suite")
    r.add_argument("--preset", help=f"one of: {', '.join(preset_names())}")
    r.add_argument("--config", help="TOML run configuration")
    r.add_argument("--seed", type=int)
    r.add_argument("--error", help="error model, e.g. random_hamiltonian:2deg")
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
    r.add_argument("--format", help="comma-separated subset of csv,json,svg")
    r.add_argument("--out", help=f"output directory (default ${ENV_OUTPUT} or ./fqergo-out)")
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("oracle", help="exact ergotropy report for a density-matrix file")
    o.add_argument("state_file")
    o.add_argument("system", help=f"one of: {', '.join(sorted(SYSTEMS))}")
    o.add_argument("--omega0", type=float, default=1.0)
    o.add_argument("--j", type=float, default=0.01)
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("sweep", help="iterations-to-convergence vs time step")
    s.add_argument("--system", required=True)
    s.add_argument("--tau", default="0.1:4.0:40", help="START:STOP:COUNT")
    s.add_argument("--n-states", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=int, default=500)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    np.seterr(all="ignore")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
