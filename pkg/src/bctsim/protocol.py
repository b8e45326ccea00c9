"""Round engine for the four-bit slot-message simulation of Bell-pair statistics.

One round works as follows. The parties share a fair sign ``c`` and an angle
``theta`` uniform on ``[0, 3*pi/5)``; ``theta`` positions the beta/gamma slot
systems. Alice outputs ``c`` and sends the cell of her setting under the
combined sixteen-boundary partition (four bits). Bob then

1. optionally reflects his axis by ``pi`` when the alpha-slot gap to Alice's
   setting is large -- the exact reading of this rule is ambiguous in the
   source procedure and is therefore a :class:`Strategy`, never a hard-coded
   choice;
2. switches from the beta to the gamma system when his (possibly reflected)
   axis falls in alpha slots {7, 8, 9, 0, 1};
3. outputs ``c`` outright if his axis shares the active slot with Alice's,
   otherwise accepts ``c`` with probability ``1 - (3*pi/10)*sin(u)`` where
   ``u`` is his distance to the boundary separating the slots, and ``-c``
   otherwise. A reflection armed in step 1 negates the final output.

Bob's evaluation sees only the slot message and the shared state, never
Alice's angle. Everything is replayable: a :class:`TrialRecord` stores the
hidden draw, the coin, and the branch taken.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import geometry
from .geometry import (
    THETA_SPAN,
    TWO_PI,
    SlotSystem,
    alpha_slot_cyclic_difference,
    alpha_slot_of,
    beta_boundary,
    beta_slot_of,
    beta_system,
    cell_index,
    gamma_boundary,
    gamma_slot_of,
    gamma_system,
    normalize_angle,
)

__all__ = [
    "ACCEPTANCE_COEFF",
    "GAMMA_ALPHA_SLOTS",
    "FlipRule",
    "FlipSemantics",
    "CoinMode",
    "Strategy",
    "NO_FLIP",
    "CYCLIC_FLIP",
    "ABS_FLIP",
    "ProtocolError",
    "HiddenState",
    "SlotMessage",
    "TrialRecord",
    "BobEvaluation",
    "TwoBobResult",
    "draw_hidden",
    "alice_round",
    "alice_slot_arrays",
    "evaluate_bob",
    "bob_round",
    "bct_trial",
    "nbct_trial",
    "two_bob_trial",
    "p_equal_given_theta",
    "replay_bob",
]

#: coefficient of the acceptance rule 1 - (3*pi/10)*sin(u)
ACCEPTANCE_COEFF = 3.0 * math.pi / 10.0
#: alpha slots on which Bob evaluates against the gamma system
GAMMA_ALPHA_SLOTS = frozenset({7, 8, 9, 0, 1})


class FlipRule(str, Enum):
    """How the alpha-slot gap triggering the axis reflection is measured."""

    CYCLIC = "cyclic-distance"
    ABSOLUTE = "absolute-difference"
    DISABLED = "disabled"


class FlipSemantics(str, Enum):
    """What a fired reflection does to the rest of the round.

    CONTINUE runs the remaining steps on the reflected axis and negates the
    final output; TERMINATE ends the round immediately with output ``-c``.
    """

    CONTINUE = "continue-then-negate"
    TERMINATE = "terminate-with-negated-c"


class CoinMode(str, Enum):
    """Whether the two evaluations of a two-Bob round share the acceptance coin."""

    INDEPENDENT = "independent"
    SHARED = "shared"


@dataclass(frozen=True)
class Strategy:
    """Resolution of the reflection rule's ambiguous reading."""

    flip_rule: FlipRule = FlipRule.DISABLED
    flip_semantics: FlipSemantics = FlipSemantics.CONTINUE

    def flip_fires(self, alice_alpha: int, bob_alpha: int) -> bool:
        """Whether the reflection fires for the given alpha slot indices."""
        if self.flip_rule is FlipRule.DISABLED:
            return False
        d = abs(alice_alpha - bob_alpha)
        if self.flip_rule is FlipRule.ABSOLUTE:
            return d > 2
        return alpha_slot_cyclic_difference(alice_alpha, bob_alpha) > 2


#: no reflection; reproduces the two-Bob walkthrough geometry
NO_FLIP = Strategy(FlipRule.DISABLED, FlipSemantics.CONTINUE)
#: reflection on cyclic slot distance > 2, continuing on the reflected axis
CYCLIC_FLIP = Strategy(FlipRule.CYCLIC, FlipSemantics.CONTINUE)
#: reflection on absolute slot difference > 2, continuing on the reflected axis
ABS_FLIP = Strategy(FlipRule.ABSOLUTE, FlipSemantics.CONTINUE)


class ProtocolError(ValueError):
    """An inconsistent message/hidden-state pair or malformed round input."""


@dataclass(frozen=True)
class HiddenState:
    """Shared randomness of one round plus the slot systems it induces."""

    c: int
    theta: float
    beta: SlotSystem
    gamma: SlotSystem

    @classmethod
    def make(cls, c: int, theta: float) -> "HiddenState":
        if c not in (-1, 1):
            raise ProtocolError(f"shared sign must be -1 or +1, got {c!r}")
        if not (0.0 <= theta < THETA_SPAN):
            raise ProtocolError(f"shared angle must lie in [0, 3*pi/5), got {theta!r}")
        return cls(c=c, theta=theta, beta=beta_system(theta), gamma=gamma_system(theta))


def draw_hidden(rng: np.random.Generator) -> HiddenState:
    """Draw one round's shared randomness: sign first, then angle."""
    c = 1 if rng.random() < 0.5 else -1
    theta = rng.uniform(0.0, THETA_SPAN)
    return HiddenState.make(c, theta)


@dataclass(frozen=True)
class SlotMessage:
    """Alice's four transmitted bits: the cell of her setting, plus the decoded slots."""

    cell: int
    alpha_slot: int
    beta_slot: int
    gamma_slot: int

    def to_wire(self) -> int:
        """The transmitted value: a single integer in 0..15."""
        return self.cell

    def to_debug(self) -> dict:
        """Diagnostic serialization carrying the decoded slot triple."""
        return {
            "cell": self.cell,
            "alpha_slot": self.alpha_slot,
            "beta_slot": self.beta_slot,
            "gamma_slot": self.gamma_slot,
        }

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.alpha_slot, self.beta_slot, self.gamma_slot)


@dataclass(frozen=True)
class TrialRecord:
    """Everything needed to replay one round deterministically."""

    a: float  # Alice's setting; nan in a bare Bob evaluation
    b: float
    c: int
    theta: float
    message: SlotMessage
    coin: float | None
    c_a: int
    c_b: int
    branch: str  # same-slot | cross-slot | flipped-then-* | flipped-terminated
    flip_fired: bool
    negated: bool
    system: str  # "beta" | "gamma" | "none" (terminated)
    bob_slot: int
    alice_active_slot: int
    boundary_angle: float  # nan when no boundary was involved
    boundary_index: int  # -1 when no boundary was involved
    u: float  # nan when no boundary was involved
    accept_prob: float  # pre-negation probability of keeping c
    clamped: bool
    flip_rule: str
    flip_semantics: str

    def to_json_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["message"] = self.message.to_debug()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), allow_nan=True)


def alice_round(a: float, hidden: HiddenState) -> tuple[int, SlotMessage]:
    """Alice's output (always the shared sign) and her four-bit slot message."""
    cell = cell_index(a, hidden.theta)
    msg = SlotMessage(cell.index, cell.alpha_slot, cell.beta_slot, cell.gamma_slot)
    return hidden.c, msg


def alice_slot_arrays(a: float, theta) -> tuple[int, np.ndarray, np.ndarray]:
    """Alice's alpha slot and per-theta beta/gamma slots for a fixed setting.

    Vector counterpart of :func:`alice_round` used by sweep kernels and the
    analytic per-theta probabilities: ``theta`` may be an array.
    """
    alpha = int(alpha_slot_of(a))
    return alpha, beta_slot_of(a, theta), gamma_slot_of(a, theta)


@dataclass
class BobEvaluation:
    """Branch outcome of Bob's procedure, array-valued over theta.

    ``accept_prob`` is the pre-negation probability of keeping ``c``;
    ``p_equal`` folds in the negation: the probability that the final output
    equals ``c``.
    """

    p_equal: np.ndarray
    accept_prob: np.ndarray
    negate: bool
    terminated: bool
    flip_fired: bool
    system: str
    same_slot: np.ndarray
    bob_slot: np.ndarray
    alice_slot: np.ndarray
    boundary_index: np.ndarray
    boundary_angle: np.ndarray
    u: np.ndarray
    clamped: np.ndarray


def evaluate_bob(
    alice_alpha: int,
    alice_beta_slot,
    alice_gamma_slot,
    b: float,
    theta,
    strategy: Strategy = NO_FLIP,
) -> BobEvaluation:
    """Run Bob's branch logic against a slot message, vectorized over theta.

    ``alice_beta_slot``/``alice_gamma_slot`` must match ``theta``'s shape
    (constants from a single message, or per-theta arrays from
    :func:`alice_slot_arrays`). Only slot information about Alice's setting
    enters; her angle never does.
    """
    theta = np.asarray(theta, dtype=float)
    a_beta = np.broadcast_to(np.asarray(alice_beta_slot, dtype=np.int64), theta.shape)
    a_gamma = np.broadcast_to(np.asarray(alice_gamma_slot, dtype=np.int64), theta.shape)

    b = normalize_angle(b)
    bob_alpha = int(alpha_slot_of(b))
    fired = strategy.flip_fires(alice_alpha, bob_alpha)
    b_eff = normalize_angle(b + math.pi) if fired else b
    bob_alpha_eff = (bob_alpha + 5) % 10 if fired else bob_alpha

    if fired and strategy.flip_semantics is FlipSemantics.TERMINATE:
        ones = np.ones_like(theta)
        return BobEvaluation(
            p_equal=np.zeros_like(theta),
            accept_prob=ones,  # inner outcome is c with certainty, then negated
            negate=True,
            terminated=True,
            flip_fired=True,
            system="none",
            same_slot=np.zeros(theta.shape, dtype=bool),
            bob_slot=np.full(theta.shape, -1, dtype=np.int64),
            alice_slot=np.full(theta.shape, -1, dtype=np.int64),
            boundary_index=np.full(theta.shape, -1, dtype=np.int64),
            boundary_angle=np.full(theta.shape, math.nan),
            u=np.full(theta.shape, math.nan),
            clamped=np.zeros(theta.shape, dtype=bool),
        )

    use_gamma = bob_alpha_eff in GAMMA_ALPHA_SLOTS
    if use_gamma:
        alice_slot = a_gamma
        bob_slot = gamma_slot_of(b_eff, theta)
        boundary_of = gamma_boundary
    else:
        alice_slot = a_beta
        bob_slot = beta_slot_of(b_eff, theta)
        boundary_of = beta_boundary

    same = alice_slot == bob_slot
    # Different slots in a three-slot ring are adjacent; one traversal
    # direction crosses a single boundary, the other two. The separator is
    # the upper edge of Bob's slot when Alice sits one step counterclockwise,
    # else the lower edge.
    one_step_ccw = (alice_slot - bob_slot) % 3 == 1
    k = np.where(one_step_ccw, (bob_slot + 1) % 3, bob_slot)
    bnd = boundary_of(k, theta)
    d = np.abs(b_eff - bnd)
    u = np.minimum(d, TWO_PI - d)
    raw = 1.0 - ACCEPTANCE_COEFF * np.sin(u)
    clamped = ~same & ((raw < 0.0) | (raw > 1.0))
    accept = np.where(same, 1.0, np.clip(raw, 0.0, 1.0))

    return BobEvaluation(
        p_equal=1.0 - accept if fired else accept,
        accept_prob=accept,
        negate=fired,
        terminated=False,
        flip_fired=fired,
        system="gamma" if use_gamma else "beta",
        same_slot=same,
        bob_slot=bob_slot,
        alice_slot=alice_slot,
        boundary_index=np.where(same, -1, k),
        boundary_angle=np.where(same, math.nan, bnd),
        u=np.where(same, math.nan, u),
        clamped=clamped,
    )


def _validate_message(msg: SlotMessage, hidden: HiddenState) -> None:
    if not 0 <= msg.cell <= 15:
        raise ProtocolError(f"cell index must lie in 0..15, got {msg.cell}")
    try:
        triple = geometry.cell_to_triple(msg.cell, hidden.theta)
    except ValueError as exc:
        raise ProtocolError(f"message cell {msg.cell} is impossible for this round: {exc}") from exc
    if triple != msg.triple:
        raise ProtocolError(
            f"message triple {msg.triple} does not decode from cell {msg.cell} "
            f"at theta={hidden.theta!r} (expected {triple})"
        )


def bob_round(
    b: float,
    msg: SlotMessage,
    hidden: HiddenState,
    rng: np.random.Generator | None = None,
    strategy: Strategy = NO_FLIP,
    coin: float | None = None,
) -> tuple[int, TrialRecord]:
    """Bob's output for one round, with a full replayable record.

    ``coin`` is the unit-interval draw compared against the acceptance
    probability; it is drawn from ``rng`` when not supplied, which lets
    two-Bob rounds share or split coins.
    """
    _validate_message(msg, hidden)
    if coin is None:
        if rng is None:
            raise ProtocolError("bob_round needs either a random generator or an explicit coin")
        coin = float(rng.random())
    if not 0.0 <= coin < 1.0:
        raise ProtocolError(f"coin must lie in [0, 1), got {coin!r}")

    ev = evaluate_bob(msg.alpha_slot, msg.beta_slot, msg.gamma_slot, b, hidden.theta, strategy)
    accept = float(ev.accept_prob)
    inner = hidden.c if coin < accept else -hidden.c
    c_b = -inner if ev.negate else inner

    if ev.terminated:
        branch = "flipped-terminated"
    elif bool(ev.same_slot):
        branch = "flipped-then-same-slot" if ev.flip_fired else "same-slot"
    else:
        branch = "flipped-then-cross-slot" if ev.flip_fired else "cross-slot"

    record = TrialRecord(
        a=math.nan,
        b=normalize_angle(b),
        c=hidden.c,
        theta=hidden.theta,
        message=msg,
        coin=coin,
        c_a=hidden.c,
        c_b=c_b,
        branch=branch,
        flip_fired=ev.flip_fired,
        negated=ev.negate,
        system=ev.system,
        bob_slot=int(ev.bob_slot),
        alice_active_slot=int(ev.alice_slot),
        boundary_angle=float(ev.boundary_angle),
        boundary_index=int(ev.boundary_index),
        u=float(ev.u),
        accept_prob=accept,
        clamped=bool(ev.clamped),
        flip_rule=strategy.flip_rule.value,
        flip_semantics=strategy.flip_semantics.value,
    )
    return c_b, record


def bct_trial(
    a: float,
    b: float,
    rng: np.random.Generator,
    strategy: Strategy = NO_FLIP,
) -> tuple[int, int, TrialRecord]:
    """One full round: draw shared randomness, run Alice, then Bob."""
    hidden = draw_hidden(rng)
    c_a, msg = alice_round(a, hidden)
    c_b, record = bob_round(b, msg, hidden, rng, strategy)
    return c_a, c_b, dataclasses.replace(record, a=normalize_angle(a))


def nbct_trial(
    a: float,
    b: float,
    rng: np.random.Generator,
    strategy: Strategy = NO_FLIP,
) -> tuple[int, int]:
    """Black-box round: same joint distribution, no hidden state exposed.

    The interface carries only the two settings in and the two outcomes out,
    as if the correlation arrived through a shared box rather than a message.
    """
    c_a, c_b, _ = bct_trial(a, b, rng, strategy)
    return c_a, c_b


@dataclass(frozen=True)
class TwoBobResult:
    c_a: int
    c_b1: int
    c_b2: int
    record_b1: TrialRecord
    record_b2: TrialRecord


def two_bob_trial(
    a: float,
    b1: float,
    rng: np.random.Generator,
    strategy: Strategy = NO_FLIP,
    coin_mode: CoinMode = CoinMode.INDEPENDENT,
) -> TwoBobResult:
    """Evaluate Bob's procedure at ``b1`` and ``b1 + pi`` against one message.

    One hidden draw, one message; the two evaluations either share a single
    acceptance coin or draw independent ones. Perfect anti-correlation between
    the two outputs is what an axis reversal should guarantee; this trial is
    the probe for its failure.
    """
    hidden = draw_hidden(rng)
    c_a, msg = alice_round(a, hidden)
    coin1 = float(rng.random())
    coin2 = coin1 if coin_mode is CoinMode.SHARED else float(rng.random())
    c_b1, rec1 = bob_round(b1, msg, hidden, strategy=strategy, coin=coin1)
    c_b2, rec2 = bob_round(b1 + math.pi, msg, hidden, strategy=strategy, coin=coin2)
    a_norm = normalize_angle(a)
    return TwoBobResult(
        c_a=c_a,
        c_b1=c_b1,
        c_b2=c_b2,
        record_b1=dataclasses.replace(rec1, a=a_norm),
        record_b2=dataclasses.replace(rec2, a=a_norm),
    )


def p_equal_given_theta(a: float, b: float, theta, strategy: Strategy = NO_FLIP):
    """Analytic P(Bob's output equals the shared sign | theta), no sampling.

    ``theta`` may be a scalar or an array. This is the per-round conditional
    the consistency audit and the sweep oracles are built on.
    """
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr < 0.0) or np.any(theta_arr >= THETA_SPAN):
        raise ProtocolError("theta values must lie in [0, 3*pi/5)")
    alpha, beta_slots, gamma_slots = alice_slot_arrays(a, theta_arr)
    ev = evaluate_bob(alpha, beta_slots, gamma_slots, b, theta_arr, strategy)
    return ev.p_equal if np.ndim(theta) else float(ev.p_equal)


def replay_bob(record: TrialRecord) -> int:
    """Recompute Bob's output from a stored record; equals ``record.c_b``."""
    hidden = HiddenState.make(record.c, record.theta)
    strategy = Strategy(FlipRule(record.flip_rule), FlipSemantics(record.flip_semantics))
    c_b, _ = bob_round(record.b, record.message, hidden, strategy=strategy, coin=record.coin)
    return c_b
