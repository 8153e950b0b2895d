#!/usr/bin/env python3
"""Reproduce the headline experiment batteries and print summary tables.

Runs the three path-following batteries (10 seeded repetitions each), the
60 s position holds at three currents, and the open-loop velocity sweep,
then prints the pooled statistics side by side.
"""

import argparse

from ferrosim.harness import (
    hold_error_stats,
    open_loop_sweep,
    pooled_stats,
    run_batch,
    run_hold_trial,
)
from ferrosim.paths import preset_path
from ferrosim.plant import PlantParams


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=10)
    parser.add_argument("--seed", type=int, default=100)
    parser.add_argument("--hold-duration", type=float, default=60.0)
    args = parser.parse_args()

    print("== path following (pooled over ticks and repetitions) ==")
    print(f"{'path':<8} {'mean err':>10} {'std err':>10} {'max err':>10} "
          f"{'mean v':>10} {'std v':>10} {'max v':>10}")
    for name in ("line", "square", "circle"):
        path = preset_path(name)
        stats = pooled_stats(run_batch(path, reps=args.reps, seed=args.seed), path)
        print(
            f"{name:<8} {stats.mean_err:>8.1f}um {stats.std_err:>8.1f}um "
            f"{stats.max_err:>8.1f}um {stats.mean_v:>6.0f}um/s "
            f"{stats.std_v:>6.0f}um/s {stats.max_v:>6.0f}um/s"
        )

    print("\n== position hold at the workspace centre ==")
    for current in (0.95, 1.19, 1.43):
        log = run_hold_trial(
            (0.0, 0.0),
            args.hold_duration,
            plant_params=PlantParams(seed=args.seed),
            current=current,
        )
        mean, std, peak = hold_error_stats(log)
        print(f"I = {current:.2f} A: {mean:6.1f} +/- {std:5.1f} um (max {peak:.1f} um)")

    print("\n== open-loop actuation velocity vs distance ==")
    for row in open_loop_sweep(reps=5, seed=args.seed):
        fitted = 3.17 / row["distance_mm"] + 0.03
        print(
            f"rho = {row['distance_mm']:.1f} mm: {row['mean_mm_s']:.3f} "
            f"+/- {row['std_mm_s']:.3f} mm/s (fit {fitted:.3f})"
        )


if __name__ == "__main__":
    main()
