"""Storing quantized real-valued samples: the unbounded-length regime.

Real measurements have no finite original length, so only the lower clip at
zero remains and the water-filling loses its ceiling. With parameter-free
weights, once the budget clears n/ln(r) digits every class stays interior and
the error collapses to a closed form dominated by the rarest class.
"""

import math

import numpy as np

import impalloc as ia

dist = ia.validate_distribution([0.007, 0.24, 0.24, 0.24, 0.273])
weights = ia.nmim_weights(dist)
print("distribution:", dist.probs)
print(f"regime floor n/ln(2) = {5 / math.log(2):.3f} digits\n")

print("budget   lengths (rare class first)                 error")
for T in (2.0, 7.5, 12.0, 20.0):
    config = ia.make_config(2, ia.Unbounded(), T, ia.SystemKind.QUANTIFICATION)
    plan = ia.solve_quantification(dist, weights, config)
    err = ia.rwre(dist, weights, config, plan)
    print(f"{T:6.1f}   {np.array2string(plan.continuous_lengths, precision=2):42s} {err:.3e}")

print("\nclosed form inside the regime:")
for T in (8.0, 12.0, 16.0):
    print(f"  T={T:4.1f}: {ia.rwre_nmim_closed_form(dist, T, 2):.6e}")

print("\nminimum budget certifying a target error:")
for delta in (1e-3, 1e-9, 1e-30):
    T_min = ia.min_storage_for_target_nmim(dist, delta, 2)
    print(f"  target {delta:.0e}: T >= {T_min:.3f} digits")
print("  (heavily concentrated importance makes rare-event data nearly free to store)")

print("\ninterior lengths match the direct formula T + 1/(p ln r) - n/ln r:")
T = 12.0
direct = ia.nmim_interior_lengths(dist, T, 2)
config = ia.make_config(2, ia.Unbounded(), T, ia.SystemKind.QUANTIFICATION)
plan = ia.solve_quantification(dist, weights, config)
print("  formula:", np.round(direct, 3))
print("  solver: ", np.round(plan.continuous_lengths, 3))
lo, hi = ia.nmim_interior_prob_interval(5, None, T, 2)
print(f"  probabilities admissible for interior classes: [{lo:.3f}, {hi if hi < 1 else 1}]")
