"""Where does the square well switch from admitting a front to trapping bumps?

Run:  python demos/regimes.py
"""
import numpy as np

from frontlab.config import ExperimentConfig
from frontlab.harness import amplitude_for_ratio, sweep
from frontlab.reactions import quadratic_ignition
from frontlab.traveling_front import solve_front

# Homogeneous ignition front first: its speed sets the scale c0^2.
f0 = quadratic_ignition(0.25)
front = solve_front(f0)
print(f"c0 = {front.speed:.10f}   c0^2 = {front.speed**2:.6f}")
print(f"width of the 0.1 level set: {front.width(0.1):.4f}")

# Sweep the well depth at fixed half-width L = 1.
amplitudes = np.round(np.arange(0.0, 2.01, 0.2), 2)
cfg = ExperimentConfig({"half_width": 1.0}, {"eigen_h": 0.01}, {"kind": "sweep", "sweep_values": list(amplitudes)})
result = sweep(cfg)

print("\n   A      lambda    lambda/c0^2   regime")
for row in result["rows"]:
    print(f"{row['value']:5.1f}  {row['lambda']:9.5f}  {row['ratio']:10.4f}    {row['regime']}")

crossing = result["crossing"]
print(f"\nthreshold lambda = c0^2 between A = {crossing['below']} and {crossing['above']}:"
      f" A* = {crossing['critical']:.6f}")

# The same threshold reached directly by bisection on A.
print(f"direct bisection: A* = {amplitude_for_ratio(1.0, front.speed, 1.0):.6f}")
