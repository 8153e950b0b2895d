"""Command-line front end: batch runs, holds, sweeps, energy profiles, serving."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .energy import EnergyParams, energy_sweep
from .harness import (
    hold_error_stats,
    open_loop_sweep,
    pooled_stats,
    run_batch,
    run_hold_trial,
    stats_json,
)
from .paths import load_path, preset_path, write_preset_files
from .plant import PlantParams, make_model


def _resolve_path(name_or_file: str):
    if name_or_file in ("line", "square", "circle") or name_or_file.startswith("aalto_"):
        return preset_path(name_or_file)
    file = Path(name_or_file)
    if file.suffix == ".json" and file.exists():
        return load_path(file)
    raise SystemExit(f"unknown path {name_or_file!r}: use line|square|circle|aalto_*|<file.json>")


def _cmd_run(args: argparse.Namespace) -> None:
    path = _resolve_path(args.path)
    params = PlantParams(seed=args.seed, drift_rms=args.drift_rms, lag_tau=args.lag_tau)
    logs = run_batch(
        path,
        reps=args.reps,
        seed=args.seed,
        plant_params=params,
        current=args.current,
        mode=args.mode,
        model=make_model(args.preset),
    )
    stats = pooled_stats(logs, path)
    out = stats_json(args.path, args.reps, stats)
    out["completed"] = all(log.completed for log in logs)
    if args.out:
        directory = Path(args.out)
        directory.mkdir(parents=True, exist_ok=True)
        for i, log in enumerate(logs):
            log.write_csv(directory / f"{args.path}_seed{args.seed + i}.csv")
        (directory / f"{args.path}_stats.json").write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


def _cmd_hold(args: argparse.Namespace) -> None:
    currents = args.currents if args.currents else [args.current]
    results = []
    for current in currents:
        log = run_hold_trial(
            (args.x, args.y),
            args.duration,
            plant_params=PlantParams(seed=args.seed),
            current=current,
        )
        mean, std, peak = hold_error_stats(log)
        results.append(
            {
                "current_a": current,
                "mean_err_um": mean,
                "std_err_um": std,
                "max_err_um": peak,
            }
        )
        if args.out:
            directory = Path(args.out)
            directory.mkdir(parents=True, exist_ok=True)
            log.write_csv(directory / f"hold_{current:.2f}A.csv")
    print(json.dumps(results, indent=2))


def _cmd_sweep(args: argparse.Namespace) -> None:
    rows = open_loop_sweep(
        plant_params=PlantParams(seed=args.seed, drift_rms=args.drift_rms),
        distances=tuple(args.distances),
        current=args.current,
        reps=args.reps,
        seed=args.seed,
    )
    if args.out:
        Path(args.out).write_text(json.dumps(rows, indent=2) + "\n")
    print(json.dumps(rows, indent=2))


def _cmd_energy_sweep(args: argparse.Namespace) -> None:
    rows = energy_sweep(EnergyParams(), rho_max=args.rho_max, steps=args.steps)
    lines = ["rho_m,u_m,H_per_m,B_T,E_J,F_N"]
    for row in rows:
        lines.append(
            f"{row['rho_m']!r},{row['u_m']!r},{row['H_per_m']!r},"
            f"{row['B_T']!r},{row['E_J']!r},{row['F_N']!r}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_serve(args: argparse.Namespace) -> None:
    from .service import serve

    serve(port=args.port, host=args.host, static_dir=args.static)


def _cmd_export_paths(args: argparse.Namespace) -> None:
    written = write_preset_files(args.out) if args.out else write_preset_files()
    for file in written:
        print(file)


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(prog="ferrosim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="closed-loop path-following trials")
    p.add_argument("--path", default="line")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--current", type=float, default=1.43)
    p.add_argument("--mode", choices=["oracle", "vision"], default="oracle")
    p.add_argument("--preset", choices=["unit", "fig2d"], default="unit")
    p.add_argument("--drift-rms", type=float, default=PlantParams().drift_rms)
    p.add_argument("--lag-tau", type=float, default=PlantParams().lag_tau)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("hold", help="servo to a point and hold it")
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--y", type=float, default=0.0)
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--current", type=float, default=1.43)
    p.add_argument("--currents", type=float, nargs="*", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_hold)

    p = sub.add_parser("sweep", help="open-loop actuation-velocity sweep")
    p.add_argument("--distances", type=float, nargs="+", default=[2.7, 3.8, 4.9, 5.9, 7.0])
    p.add_argument("--current", type=float, default=1.43)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--drift-rms", type=float, default=PlantParams().drift_rms)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("energy-sweep", help="radial energy/force profile CSV")
    p.add_argument("--rho-max", type=float, default=5e-3)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_energy_sweep)

    p = sub.add_parser("serve", help="run the HTTP control service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None, help="directory of UI assets to serve at /")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("export-paths", help="regenerate the shared preset path files")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_export_paths)

    args = parser.parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
