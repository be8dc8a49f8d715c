"""Walk through the gain locus of a third-order plant with a branch point.

G(s) = (s^2 - 10 s + 50) / ((s + 0.5)(s + 1)(s + 2.5)),  dead time h = 1.

The three real starting roots move right as the gain increases.  Two of
them meet at a branch point on the real axis near s = -0.698 and continue
as a complex-conjugate pair; the pair crosses the imaginary axis at
lam ~ 0.07, where the closed loop loses stability.

Run:  python3 demos/branch_point_walkthrough.py
"""

from rootlocus import LocusKind, LocusProblem, Plant, compute_root_locus
from rootlocus.critical import CriticalKind

plant = Plant(
    zeros=(complex(5.0, 5.0), complex(5.0, -5.0)),
    poles=(-0.5, -1.0, -2.5),
    gain=1.0,
    delay=1.0,
)
problem = LocusProblem(LocusKind.GAIN, sigma0=-3.5, lambda_max=5.0, plant=plant)

result = compute_root_locus(problem)

print(f"{len(result.trajectories)} trajectories traced")
print("\ncritical points:")
for cp in result.critical_points:
    print(f"  {cp.kind.value:12s} s = {cp.root:.5f}  lam = {cp.lam:.6f}"
          + (f"  N = {cp.multiplicity}" if cp.kind is CriticalKind.BRANCH else ""))

print("\nimaginary-axis events:")
for ev in result.imag_axis_events:
    move = "into" if ev.direction > 0 else "out of"
    print(f"  lam = {ev.lam:.6f}  omega = {ev.omega:+.4f}  root moves {move} Re(s) > 0")

print(f"\nunstable roots at lam = 0: {result.initial_unstable_count}")
print("stable gain intervals:", [(round(a, 4), round(b, 4)) for a, b in result.stability_intervals])
