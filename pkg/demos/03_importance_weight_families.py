"""The two importance-weight families and their scalar scores.

Parametric weights expose one dial: the importance coefficient. Large
positive values hand all importance to the rarest class, large negative ones
to the most common. The parameter-free family does away with the dial by
growing explosively as probabilities shrink, which makes rare-event data
almost free to store at a fixed error.
"""

import numpy as np

import impalloc as ia

dist = ia.validate_distribution([0.05, 0.15, 0.35, 0.45])
print("distribution:", dist.probs, "\n")

print("parametric weights across coefficients:")
for coeff in (-50, -5, 0, 5, 50):
    w = ia.mim_weights(dist, coeff)
    print(f"  coeff {coeff:4d}: {np.array2string(w.values, precision=4, suppress_small=True)}")
print("  limits concentrate on the most common / rarest class.\n")

print("parameter-free weights:")
w = ia.nmim_weights(dist)
print("  values:", np.array2string(w.values, precision=4))
print("  log-values stay finite even when the plain values underflow:")
tiny = ia.validate_distribution([1e-6, 0.5 - 5e-7, 0.5 - 5e-7])
wt = ia.nmim_weights(tiny)
print(f"  p_min=1e-6: values -> {wt.values}, log-values -> {np.round(wt.log_values, 1)}\n")

print("scalar scores:")
for probs in ([0.2] * 5, [0.01, 0.02, 0.03, 0.04, 0.9]):
    d = ia.validate_distribution(probs)
    fn = ia.importance_functionals(d, 5.0)
    print(
        f"  {str(probs):38s} collision mass {fn.gamma_p:.4f}"
        f"  parametric {fn.mim_value:.4f}  parameter-free {fn.nmim_value:.4f}"
    )
print("\nA tiny minimum probability dominates the parameter-free score:")
for p_min in (0.02, 0.01, 0.005):
    d = ia.validate_distribution([p_min, (1 - p_min) / 2, (1 - p_min) / 2])
    approx = np.log(p_min) + (1 - p_min) / p_min
    print(f"  p_min={p_min}: score {ia.nmim_functional(d):9.4f}  ~ ln(p)+(1-p)/p = {approx:9.4f}")
