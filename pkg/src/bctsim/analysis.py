"""Closed-form results for the two-Bob experiment, each with an independent check.

The two-Bob experiment fixes the frame ``alpha_0 = b1 = 0``, ``b2 = pi`` and
places Alice's setting at ``a = 2*pi/5 + nu`` with ``nu`` in ``[0, pi/5]``.
Two windows of the shared angle make one of the two Bob evaluations
deterministic while the other rolls the acceptance coin; integrating the
acceptance probability over each window gives the two components

    P1(nu) = (5/(3*pi)) * [pi/5 - nu - (3*pi/10)*(1 - cos(pi/5 - nu))]
    P2(nu) = (5/(3*pi)) * [nu - (3*pi/10)*(1 - cos(nu))]

whose sum collapses to ``-2/3 + (cos(nu) + cos(pi/5 - nu))/2``. The components
are primary here; the compact form is asserted as their sum so a transcription
slip in either is caught. Adaptive quadrature provides the independent route.

The module also hosts the per-theta conservation-law audit (the probability of
equal outcomes along ``b`` must match the probability of opposite outcomes
along ``b + pi`` for every shared angle, not just on average) and the
visibility arithmetic for imperfect experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import integrate, optimize

from .geometry import THETA_SPAN, normalize_angle
from .protocol import (
    ACCEPTANCE_COEFF,
    NO_FLIP,
    CoinMode,
    Strategy,
    alice_slot_arrays,
    evaluate_bob,
    p_equal_given_theta,
)

__all__ = [
    "NU_MAX",
    "THETA_DENSITY",
    "WALKTHROUGH_B1",
    "AUDIT_TOL",
    "REPORTED_CURVE_MINIMUM",
    "NuCurvePoint",
    "ExtremaResult",
    "ConsistencyRow",
    "VisibilityReport",
    "MinimumDiscrepancy",
    "alice_setting",
    "interval_windows",
    "p_equal_interval",
    "p_opposite_equal_closed",
    "p_opposite_equal_compact",
    "p_opposite_equal_quadrature",
    "find_extrema_of_nu_curve",
    "two_bob_equal_given_theta",
    "two_bob_equal_quadrature",
    "per_theta_consistency_audit",
    "visibility_report",
    "visibility_threshold",
    "visibility_threshold_by_rootfind",
    "curve_minimum_discrepancy",
]

#: Alice's setting ranges over one alpha slot above 2*pi/5
NU_MAX = math.pi / 5.0
#: density of the shared angle on [0, 3*pi/5)
THETA_DENSITY = 1.0 / THETA_SPAN
#: frame convention of the two-Bob experiment
WALKTHROUGH_B1 = 0.0
#: tolerance of the per-theta conservation-law check
AUDIT_TOL = 1e-9
#: previously reported curve minimum at the endpoints; the formulas above give
#: ~0.2378 there. Kept as a comparison record, never asserted as truth.
REPORTED_CURVE_MINIMUM = 0.071


def _check_nu(nu: float) -> float:
    if not (0.0 <= nu <= NU_MAX):
        raise ValueError(f"nu must lie in [0, pi/5], got {nu!r}")
    return nu


def alice_setting(nu: float) -> float:
    """Alice's angle in the two-Bob frame: ``2*pi/5 + nu``."""
    _check_nu(nu)
    return 2.0 * math.pi / 5.0 + nu


def interval_windows(nu: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """The two shared-angle windows where exactly one Bob is deterministic.

    Window one is ``[pi/5 + nu, 2*pi/5]`` (the ``b1`` evaluation is certain),
    window two is ``[2*pi/5, 2*pi/5 + nu]`` (the ``b2`` evaluation is).
    """
    _check_nu(nu)
    lo = math.pi / 5.0 + nu
    mid = 2.0 * math.pi / 5.0
    return (lo, mid), (mid, mid + nu)


def _window_integral(upper: float) -> float:
    # closed form of the acceptance integral over one window:
    # int_0^upper (1 - (3*pi/10) sin u) du
    return upper - ACCEPTANCE_COEFF * (1.0 - math.cos(upper))


def p_equal_interval(which: str = "one") -> float:
    """Equal-output probability contributed by either deterministic window.

    Both windows give the same value (~0.14219) at the orthogonal setting
    ``nu = pi/10``; ``which`` selects only for the caller's bookkeeping.
    """
    if which not in ("one", "two"):
        raise ValueError(f"which must be 'one' or 'two', got {which!r}")
    return THETA_DENSITY * _window_integral(math.pi / 10.0)


@dataclass(frozen=True)
class NuCurvePoint:
    """Equal-output probability at offset ``nu``, split into its two windows."""

    nu: float
    p1: float
    p2: float
    p_total: float


def p_opposite_equal_closed(nu: float) -> NuCurvePoint:
    """Closed-form window components of the equal-output probability."""
    _check_nu(nu)
    p1 = THETA_DENSITY * _window_integral(NU_MAX - nu)
    p2 = THETA_DENSITY * _window_integral(nu)
    return NuCurvePoint(nu=nu, p1=p1, p2=p2, p_total=p1 + p2)


def p_opposite_equal_compact(nu: float) -> float:
    """Algebraically collapsed total, ``-2/3 + (cos(nu) + cos(pi/5 - nu))/2``.

    Equal to ``p_opposite_equal_closed(nu).p_total``; kept separate so the
    identity is a checkable assertion rather than a single code path.
    """
    _check_nu(nu)
    return -2.0 / 3.0 + 0.5 * (math.cos(nu) + math.cos(NU_MAX - nu))


def p_opposite_equal_quadrature(nu: float, tol: float = 1e-9) -> NuCurvePoint:
    """Window components by adaptive quadrature; the independent route.

    Raises ``RuntimeError`` if the integrator's error estimate exceeds
    ``tol`` (the integrands are smooth, so this should not happen).
    """
    _check_nu(nu)

    def integrand(u: float) -> float:
        return 1.0 - ACCEPTANCE_COEFF * math.sin(u)

    parts = []
    for upper in (NU_MAX - nu, nu):
        val, err = integrate.quad(integrand, 0.0, upper, epsabs=tol / 10.0)
        if err > tol:
            raise RuntimeError(f"quadrature error {err} exceeds tolerance {tol}")
        parts.append(THETA_DENSITY * val)
    p1, p2 = parts
    return NuCurvePoint(nu=nu, p1=p1, p2=p2, p_total=p1 + p2)


@dataclass(frozen=True)
class ExtremaResult:
    nu_max: float
    p_max: float
    nu_min_candidates: tuple[float, ...]
    p_min: float


def find_extrema_of_nu_curve(resolution: int = 2001) -> ExtremaResult:
    """Grid scan plus local refinement of the total over ``[0, pi/5]``."""
    if resolution < 100:
        raise ValueError(f"resolution must be at least 100, got {resolution}")
    grid = np.linspace(0.0, NU_MAX, resolution)
    totals = np.array([p_opposite_equal_closed(float(v)).p_total for v in grid])

    i_max = int(np.argmax(totals))
    lo = grid[max(i_max - 1, 0)]
    hi = grid[min(i_max + 1, resolution - 1)]
    res = optimize.minimize_scalar(
        lambda v: -p_opposite_equal_closed(float(v)).p_total,
        bounds=(float(lo), float(hi)),
        method="bounded",
        options={"xatol": 1e-10},
    )
    nu_max = float(res.x)
    p_max = p_opposite_equal_closed(nu_max).p_total

    p_min = float(np.min(totals))
    mins = tuple(float(v) for v, t in zip(grid, totals) if t <= p_min + 1e-12)
    return ExtremaResult(nu_max=nu_max, p_max=p_max, nu_min_candidates=mins, p_min=p_min)


def _sides_given_theta(nu: float, theta, strategy: Strategy):
    """Acceptance probability and negation flag for both Bob axes, per theta."""
    a = alice_setting(nu)
    alpha, beta_slots, gamma_slots = alice_slot_arrays(a, theta)
    ev1 = evaluate_bob(alpha, beta_slots, gamma_slots, WALKTHROUGH_B1, theta, strategy)
    ev2 = evaluate_bob(alpha, beta_slots, gamma_slots, WALKTHROUGH_B1 + math.pi, theta, strategy)
    return ev1, ev2


def two_bob_equal_given_theta(
    nu: float,
    theta,
    strategy: Strategy = NO_FLIP,
    coin_mode: CoinMode = CoinMode.INDEPENDENT,
):
    """Analytic P(both Bob outputs equal | theta) in the two-Bob frame.

    With independent coins the two acceptance events are independent; with a
    shared coin they are maximally coupled and the probability reduces to
    ``1 - |q1 - q2|`` (same negation parity) or ``|q1 - q2|`` (opposite).
    """
    theta_arr = np.asarray(theta, dtype=float)
    ev1, ev2 = _sides_given_theta(nu, theta_arr, strategy)
    q1, q2 = ev1.accept_prob, ev2.accept_prob
    same_parity = ev1.negate == ev2.negate
    if coin_mode is CoinMode.INDEPENDENT:
        agree = q1 * q2 + (1.0 - q1) * (1.0 - q2)
        out = agree if same_parity else 1.0 - agree
    else:
        coupled = 1.0 - np.abs(q1 - q2)
        out = coupled if same_parity else 1.0 - coupled
    return out if np.ndim(theta) else float(out)


def _theta_breakpoints(nu: float) -> list[float]:
    # theta values where either party crosses a slot boundary; the per-theta
    # probabilities jump there, so integration must split on them
    pts = set()
    for x in (alice_setting(nu), WALKTHROUGH_B1, WALKTHROUGH_B1 + math.pi):
        for offset in (0.0, 3 * math.pi / 5, 6 * math.pi / 5, math.pi, 8 * math.pi / 5, math.pi / 5):
            t = normalize_angle(x - offset)
            if 0.0 < t < THETA_SPAN:
                pts.add(t)
    return sorted(pts)


def two_bob_equal_quadrature(
    nu: float,
    strategy: Strategy = NO_FLIP,
    coin_mode: CoinMode = CoinMode.INDEPENDENT,
    restrict_to_windows: bool = False,
) -> float:
    """Expected equal-output rate over the full shared-angle range.

    This is the quantity a Monte Carlo sweep actually estimates; it exceeds
    the window-only closed form whenever both axes roll coins at the same
    theta. ``restrict_to_windows`` integrates over the two deterministic
    windows only, reproducing the closed form.
    """
    _check_nu(nu)
    if restrict_to_windows:
        (w1_lo, w1_hi), (w2_lo, w2_hi) = interval_windows(nu)
        segments = [(w1_lo, w1_hi), (w2_lo, w2_hi)]
    else:
        pts = [0.0] + _theta_breakpoints(nu) + [THETA_SPAN]
        segments = list(zip(pts[:-1], pts[1:]))
    total = 0.0
    for lo, hi in segments:
        if hi <= lo:
            continue
        val, _ = integrate.quad(
            lambda t: float(two_bob_equal_given_theta(nu, t, strategy, coin_mode)),
            lo,
            hi,
            epsabs=1e-11,
            limit=200,
        )
        total += val
    return THETA_DENSITY * total


@dataclass(frozen=True)
class ConsistencyRow:
    """Per-theta audit of the axis-reversal conservation law.

    The law demands ``p_same_forward == p_anti_reversed``. Both conditional
    probabilities are computed from the branch logic, no sampling involved.
    """

    theta: float
    p_same_forward: float  # P(outputs equal | a, b, theta)
    p_same_reversed: float  # P(outputs equal | a, b + pi, theta)
    p_anti_reversed: float  # P(outputs opposite | a, b + pi, theta)
    violation: bool


def per_theta_consistency_audit(
    a: float,
    b: float,
    thetas: Iterable[float],
    strategy: Strategy = NO_FLIP,
    tol: float = AUDIT_TOL,
) -> list[ConsistencyRow]:
    """Evaluate the conservation law on a grid of shared angles."""
    grid = np.asarray(list(thetas), dtype=float)
    if np.any(grid < 0.0) or np.any(grid >= THETA_SPAN):
        raise ValueError("audit grid must lie within [0, 3*pi/5)")
    fwd = np.atleast_1d(p_equal_given_theta(a, b, grid, strategy))
    rev = np.atleast_1d(p_equal_given_theta(a, b + math.pi, grid, strategy))
    rows = []
    for t, pf, pr in zip(grid, fwd, rev):
        anti = 1.0 - pr
        rows.append(
            ConsistencyRow(
                theta=float(t),
                p_same_forward=float(pf),
                p_same_reversed=float(pr),
                p_anti_reversed=float(anti),
                violation=bool(abs(pf - anti) > tol),
            )
        )
    return rows


@dataclass(frozen=True)
class VisibilityReport:
    """Detection probabilities under a multiplicative visibility factor."""

    visibility: float
    nu: float
    p_effective: float  # both sides degraded independently: V^2 * total
    p_peff1: float  # window-one overlap after discarding unreliable outputs
    p_peff2: float  # window-two overlap
    p_peff_total: float  # max(0, combined overlap)
    v_threshold: float  # visibility at which the combined overlap vanishes


def visibility_report(visibility: float, nu: float) -> VisibilityReport:
    """Full visibility arithmetic at one ``(V, nu)`` point."""
    if not (0.0 <= visibility <= 1.0):
        raise ValueError(f"visibility must lie in [0, 1], got {visibility!r}")
    point = p_opposite_equal_closed(nu)
    v = visibility
    p_eff = v * v * point.p_total
    w1 = (NU_MAX - nu) / THETA_SPAN
    w2 = nu / THETA_SPAN
    p_peff1 = v * point.p1 - w1 * (1.0 - v)
    p_peff2 = v * point.p2 - w2 * (1.0 - v)
    combined = v * point.p_total - (1.0 - v) / 3.0  # w1 + w2 == 1/3 for every nu
    return VisibilityReport(
        visibility=v,
        nu=nu,
        p_effective=p_eff,
        p_peff1=p_peff1,
        p_peff2=p_peff2,
        p_peff_total=max(0.0, combined),
        v_threshold=visibility_threshold(nu),
    )


def visibility_threshold(nu: float) -> float:
    """Visibility at which the combined overlap vanishes, in closed form.

    Root of ``V * p_total(nu) - (1 - V)/3`` in ``V``, i.e.
    ``(1/3) / (p_total(nu) + 1/3)``; about 0.5396 at ``nu = pi/10``.
    """
    point = p_opposite_equal_closed(nu)
    return (1.0 / 3.0) / (point.p_total + 1.0 / 3.0)


def visibility_threshold_by_rootfind(nu: float) -> float:
    """Iterative cross-check of :func:`visibility_threshold` via bracketing."""
    point = p_opposite_equal_closed(nu)
    return float(optimize.brentq(lambda v: v * point.p_total - (1.0 - v) / 3.0, 0.0, 1.0, xtol=1e-15))


@dataclass(frozen=True)
class MinimumDiscrepancy:
    """Comparison of the reported endpoint minimum against the formula value."""

    nu: float
    formula_value: float
    reported_value: float
    gap: float
    agrees: bool


def curve_minimum_discrepancy(tol: float = 1e-3) -> MinimumDiscrepancy:
    """The endpoint-value discrepancy record (formula ~0.2378 vs reported 0.071)."""
    formula = p_opposite_equal_closed(0.0).p_total
    gap = abs(formula - REPORTED_CURVE_MINIMUM)
    return MinimumDiscrepancy(
        nu=0.0,
        formula_value=formula,
        reported_value=REPORTED_CURVE_MINIMUM,
        gap=gap,
        agrees=gap <= tol,
    )
