#!/usr/bin/env python3
"""Compare the three fitted distance laws and the current scaling on a grid.

Prints a small table of speeds per law over the measured distance range and
the current-scaling multipliers over the tested current range; useful when
choosing a model variant for a study.
"""

import numpy as np

from ferrosim.plant import current_scale, make_model
from ferrosim.workspace import SolenoidClass


def main() -> None:
    laws = {law: make_model("unit", law) for law in ("inverse", "linear", "inverse_square")}
    print(f"{'rho (mm)':>9}" + "".join(f"{law:>16}" for law in laws))
    for rho in np.arange(2.5, 7.51, 0.5):
        speeds = [model.distance_speed(float(rho)) for model in laws.values()]
        print(f"{rho:>9.1f}" + "".join(f"{s:>14.3f}  " for s in speeds))

    model = laws["inverse"]
    print("\ncurrent scaling (1 at the 1.43 A reference):")
    for current in (0.24, 0.48, 0.72, 0.95, 1.19, 1.43, 1.66):
        print(f"I = {current:4.2f} A -> c = {current_scale(model, current):.4f}")


if __name__ == "__main__":
    main()
