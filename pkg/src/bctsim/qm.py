"""Exact predictions for planar projective measurements on the correlated Bell pair.

The reference state is the maximally entangled pair whose equal-setting
measurements agree with certainty (correlated, not anticorrelated). For
measurement directions ``a`` and ``b`` in the plane, the probability of equal
outcomes depends only on their separation:

    P(equal | a, b) = cos^2(arc_distance(a, b) / 2)

Both marginals are uniform on {-1, +1}. Reversing either axis flips that
party's outcome, so P(equal | a, b + pi) = 1 - P(equal | a, b).
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import arc_distance

__all__ = ["prob_equal", "sample", "flip_covariance_check"]


def prob_equal(a: float, b: float) -> float:
    """Probability that the two outcomes coincide for settings ``a`` and ``b``."""
    return math.cos(arc_distance(a, b) / 2.0) ** 2


def sample(a: float, b: float, rng: np.random.Generator, size: int | None = None):
    """Draw outcome pairs for settings ``a`` and ``b``.

    The first outcome is uniform on {-1, +1}; the second equals it with
    probability :func:`prob_equal`. Returns a pair of ints for ``size=None``,
    otherwise a pair of int arrays of length ``size``.
    """
    p = prob_equal(a, b)
    if size is None:
        c_a = 1 if rng.random() < 0.5 else -1
        c_b = c_a if rng.random() < p else -c_a
        return c_a, c_b
    c_a = rng.integers(0, 2, size=size, dtype=np.int64) * 2 - 1
    same = rng.random(size) < p
    c_b = np.where(same, c_a, -c_a)
    return c_a, c_b


def flip_covariance_check(a: float, b: float, tol: float = 1e-12) -> bool:
    """Whether reversing ``b`` complements the equal-outcome probability.

    Checks ``prob_equal(a, b + pi) == 1 - prob_equal(a, b)`` to ``tol``.
    Holds identically for the reference state; exposed as a guard.
    """
    return abs(prob_equal(a, b + math.pi) - (1.0 - prob_equal(a, b))) <= tol
