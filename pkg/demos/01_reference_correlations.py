"""What the simulation has to hit: the exact planar Bell-pair statistics.

Two parties measure one qubit each of a correlated maximally entangled pair
along directions in a fixed plane. Three facts pin the whole joint
distribution: parallel settings always agree, reversing one axis flips that
party's outcome, and the probability of agreement depends only on the angle
between the settings as cos^2(separation / 2).
"""

import math

import numpy as np

from bctsim import qm

print("parallel settings      :", qm.prob_equal(0.8, 0.8))
print("antipodal settings     :", qm.prob_equal(0.8, 0.8 + math.pi))
print("orthogonal settings    :", qm.prob_equal(0.0, math.pi / 2))

print("\nflip covariance: P(equal | a, b+pi) == 1 - P(equal | a, b)")
for b in (0.3, 1.7, 2.9):
    lhs = qm.prob_equal(0.0, b + math.pi)
    rhs = 1.0 - qm.prob_equal(0.0, b)
    print(f"  b = {b:.1f}: {lhs:.12f} vs {rhs:.12f}  ({'ok' if qm.flip_covariance_check(0.0, b) else 'BROKEN'})")

print("\nsampling matches the law (one million draws per point):")
rng = np.random.default_rng(2024)
for sep in np.linspace(0.0, math.pi, 7):
    c_a, c_b = qm.sample(0.0, float(sep), rng, size=1_000_000)
    print(f"  separation {sep:5.3f}:  empirical {np.mean(c_a == c_b):.4f}   exact {qm.prob_equal(0.0, float(sep)):.4f}")
