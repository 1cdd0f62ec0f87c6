"""Restrictive water-filling, step by step.

Six event classes share an original length of 10 binary digits and an
expected budget of 4 digits per record. Watch how the optimal allocation
reshapes as the importance coefficient moves: at zero everything gets the
budget, positive coefficients pour storage toward rare classes until they
saturate, negative ones favor the common classes.
"""

import numpy as np

import impalloc as ia

dist = ia.validate_distribution([0.03, 0.07, 0.1395, 0.2205, 0.25, 0.29])
config = ia.make_config(2, ia.Uniform(10), 4.0, ia.SystemKind.IDEAL)

print("classes:", np.array2string(dist.probs, precision=4))
print(f"radix 2, original length 10, budget 4.0 expected digits/record\n")

header = "coeff   " + "".join(f"  l_{i + 1:<5}" for i in range(6)) + "salvaged  clipped"
print(header)
print("-" * len(header))
for coeff in (-35, -10, 0, 10, 35):
    weights = ia.mim_weights(dist, coeff)
    plan = ia.solve_ideal(dist, weights, config)
    cells = "".join(f"{l:7.3f} " for l in plan.continuous_lengths)
    clipped = sorted(plan.saturated_set + plan.zero_set)
    err = ia.rwre(dist, weights, config, plan)
    print(f"{coeff:5d}   {cells}  {1 - err:.4f}  {list(clipped)}")

print()
print("The water level view at coefficient 10:")
weights = ia.mim_weights(dist, 10.0)
plan = ia.solve_ideal(dist, weights, config)
pool_floor = -weights.log_values / np.log(2)
print(f"  water level beta = {plan.water_level:.4f}")
for i, (floor, l) in enumerate(zip(pool_floor, plan.continuous_lengths)):
    print(f"  class {i + 1}: pool floor {floor:7.4f}  ->  depth {l:6.4f}")
print("  (each unclipped depth is exactly beta minus the floor)")

print()
print("Integer plans floor the continuous ones and never overspend:")
rounded = ia.round_plan(plan, dist, config)
print("  continuous:", np.round(plan.continuous_lengths, 3))
print("  integer:   ", rounded.integer_lengths)
spent = float(np.dot(dist.probs, rounded.integer_lengths))
print(f"  spent {spent:.3f} of 4.0 expected digits")
