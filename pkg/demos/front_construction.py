"""Building a transition front between explicit sub- and super-solutions.

A weak well (A = 0.1, L = 1) keeps lambda far below c0^2.  Runs launched
from the sub-solution at t = -T stay between the two candidates, grow in
time, and their values at t = 0 settle as T doubles.

Run:  python demos/front_construction.py [output-dir]
"""
import sys

from frontlab.config import ExperimentConfig
from frontlab.harness import front_pipeline

out = sys.argv[1] if len(sys.argv) > 1 else None
rep = front_pipeline(ExperimentConfig(), out)

print(f"regime: {rep['regime']['regime']}  (lambda/c0^2 = {rep['regime']['ratio']:.4f})")
print(f"boost eps = {rep['eps']:.4f}, lambda^eps = {rep['lambda_eps']:.5f}")
k = rep["constants"]["super_neg"]
print(f"y0 = {k['y0']:.4f}  beta0 = {k['beta0']:.4f}  omega = {k['omega']:.4f}  eta = {k['eta']:.5f}")
print(f"grid front speed {rep['grid_front_speed']:.8f} vs c0 {rep['c0']:.8f}")

print("\n  T    below-v margin   above-w margin   handoff")
for h in rep["horizons"]:
    print(f"{h['T']:4.0f}   {h['sandwich_neg']['worst_margin']:+.3e}      "
          f"{h['sandwich_pos']['worst_margin']:+.3e}      {h['handoff_margin']:+.2e}")

print(f"\nsup width of the 0.1 level set: {rep['max_width'][0.1]:.4f} "
      f"(traveling front: {rep['analytic_width'][0.1]:.4f})")
print(f"mean speed over the trailing half: {rep['speed']['speed']:.6f}")
print(f"total variation of X(t) - c0 t: {rep['drift_total_variation']:.2e}")
print(f"|u_T(0) - u_2T(0)|: {', '.join(f'{d:.2e}' for d in rep['cauchy_differences'])}")
print("\nchecks:", ", ".join(f"{k}={'ok' if v else 'FAILED'}" for k, v in rep["checks"].items()))
