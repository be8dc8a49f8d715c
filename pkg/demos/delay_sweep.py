"""Delay sweep of an oscillatory plant: stability windows in the dead time.

G(s) = s^2 / ((s^2 + 4)(s^2 + 16)) in unit feedback with a variable
input delay.  All four open-loop poles sit on the imaginary axis; as the
delay grows the characteristic roots repeatedly cross the axis, opening
and closing stability windows.

Run:  python3 demos/delay_sweep.py [--svg out.svg]
"""

import sys

from rootlocus import LocusKind, LocusProblem, Plant, compute_root_locus, render_svg

plant = Plant(
    zeros=(0.0, 0.0),
    poles=(2j, -2j, 4j, -4j),
    gain=1.0,
    delay=1.0,  # placeholder; the swept parameter is the delay itself
)
problem = LocusProblem(LocusKind.DELAY, sigma0=-1.0, lambda_max=5.0, plant=plant)

result = compute_root_locus(problem)

print(f"{len(result.trajectories)} trajectories, "
      f"{len(result.imag_axis_events)} imaginary-axis events")
print("stable delay intervals:")
for lo, hi in result.stability_intervals:
    print(f"  [{lo:.4f}, {hi:.4f}]")

if "--svg" in sys.argv:
    path = sys.argv[sys.argv.index("--svg") + 1]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_svg(result, upper_half_only=True))
    print(f"wrote {path}")
