"""Two-state channel model, belief vectors, and one-step probabilistic primitives.

Channels are independent, statistically identical two-state Markov chains
("good" = 1, "bad" = 0) parametrised by the transition probabilities p01
(bad -> good) and p11 (good -> good).  The decision maker's information state
is the vector of per-channel probabilities of being good right now; this
module owns that representation and every single-step operation on it:
belief propagation for unobserved channels, Bayesian collapse to p11/p01 on
observation, outcome probabilities for a sensed subset, and the one-step
expected reward.

Channel indices are 1-based throughout the public API.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

#: Absolute tolerance for probability-domain and probability-sum checks.
PROB_TOL = 1e-12

#: Absolute tolerance for value (expected reward) comparisons.
VALUE_TOL = 1e-9


def _check_prob(p: float, name: str) -> None:
    if not (-PROB_TOL <= p <= 1.0 + PROB_TOL):
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")


@dataclass(frozen=True)
class TransitionModel:
    """Markov law of a single channel: p01 = P(bad -> good), p11 = P(good -> good)."""

    p01: float
    p11: float

    def __post_init__(self) -> None:
        _check_prob(self.p01, "p01")
        _check_prob(self.p11, "p11")

    @property
    def positively_correlated(self) -> bool:
        """True iff p11 >= p01, the regime in which greedy is provably optimal."""
        return self.p11 >= self.p01

    def stationary_belief(self) -> float:
        """Fixed point of the propagation operator, p01 / (1 - p11 + p01).

        Raises ValueError for the degenerate deterministic chain
        p11 = 1, p01 = 0, where every belief is stationary.
        """
        denom = 1.0 - self.p11 + self.p01
        if denom == 0.0:
            raise ValueError(
                "stationary belief undefined for p11=1, p01=0 (every point is fixed)"
            )
        return self.p01 / denom


@dataclass(frozen=True)
class HorizonSpec:
    """Horizon length T >= 1 and discount factor beta in [0, 1] (beta = 1 allowed)."""

    T: int
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.T < 1:
            raise ValueError(f"horizon T must be >= 1, got {self.T}")
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError(f"discount beta must lie in [0, 1], got {self.beta}")


# Provenance tags: each belief entry is exactly one of
#   ("G", m)    -- tau^m(p11), channel observed good m steps ago
#   ("B", m)    -- tau^m(p01), channel observed bad m steps ago
#   ("I", i, m) -- tau^m(omega_i(1)), channel i never observed since the start
# Tracking these lets exact solvers memoise on discrete keys instead of floats.
Tag = Tuple

OBSERVED_GOOD = "G"
OBSERVED_BAD = "B"
INITIAL = "I"


def age_tag(tag: Tag) -> Tag:
    """Tag after one more unobserved propagation step."""
    if tag[0] == INITIAL:
        return (INITIAL, tag[1], tag[2] + 1)
    return (tag[0], tag[1] + 1)


@dataclass(frozen=True)
class BeliefVector:
    """Information state: per-channel probability of being good, with optional provenance."""

    omega: Tuple[float, ...]
    tags: Optional[Tuple[Tag, ...]] = None

    def __post_init__(self) -> None:
        if len(self.omega) < 1:
            raise ValueError("belief vector must have at least one entry")
        for i, w in enumerate(self.omega):
            _check_prob(w, f"omega[{i}]")
        if self.tags is not None and len(self.tags) != len(self.omega):
            raise ValueError("provenance tags must align with omega")

    @classmethod
    def initial(cls, omega: Sequence[float]) -> "BeliefVector":
        """Fresh belief with Initial(i) provenance on every entry."""
        values = tuple(float(w) for w in omega)
        tags = tuple((INITIAL, i + 1, 0) for i in range(len(values)))
        return cls(values, tags)

    @property
    def n(self) -> int:
        return len(self.omega)


@dataclass(frozen=True)
class ActionSet:
    """A set of exactly k distinct 1-based channel indices to sense."""

    indices: Tuple[int, ...]

    def __post_init__(self) -> None:
        idx = tuple(sorted(self.indices))
        if len(set(idx)) != len(idx) or not idx:
            raise ValueError(f"action indices must be distinct and nonempty: {self.indices}")
        if idx[0] < 1:
            raise ValueError(f"channel indices are 1-based, got {self.indices}")
        object.__setattr__(self, "indices", idx)

    def validate_for(self, n: int, k: Optional[int] = None) -> None:
        if self.indices[-1] > n:
            raise ValueError(f"action {self.indices} out of range for n={n}")
        if k is not None and len(self.indices) != k:
            raise ValueError(f"action {self.indices} does not have k={k} channels")

    @property
    def k(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class OutcomeRealization:
    """Joint observation on a sensed subset: bits aligned with the sorted action."""

    bits: Tuple[int, ...]
    probability: float


def tau(omega: float, model: TransitionModel) -> float:
    """One-step belief propagation for an unobserved channel."""
    if not (-PROB_TOL <= omega <= 1.0 + PROB_TOL):
        raise ValueError(f"belief {omega!r} outside [0, 1]")
    omega = min(1.0, max(0.0, omega))
    return omega * model.p11 + (1.0 - omega) * model.p01


def tau_iterate(omega: float, model: TransitionModel, steps: int) -> float:
    """tau applied `steps` times; steps = 0 returns omega unchanged."""
    for _ in range(steps):
        omega = tau(omega, model)
    return omega


def tag_value(tag: Tag, model: TransitionModel, initial: Sequence[float]) -> float:
    """Numeric belief encoded by a provenance tag, given the initial belief."""
    if tag[0] == OBSERVED_GOOD:
        return tau_iterate(model.p11, model, tag[1])
    if tag[0] == OBSERVED_BAD:
        return tau_iterate(model.p01, model, tag[1])
    if tag[0] == INITIAL:
        return tau_iterate(float(initial[tag[1] - 1]), model, tag[2])
    raise ValueError(f"unknown provenance tag {tag!r}")


def outcome_probability(beliefs_on_action: Sequence[float], bits: Sequence[int]) -> float:
    """Probability that the sensed channels realise the given 0/1 pattern."""
    if len(beliefs_on_action) != len(bits):
        raise ValueError(
            f"length mismatch: {len(beliefs_on_action)} beliefs vs {len(bits)} bits"
        )
    p = 1.0
    for w, b in zip(beliefs_on_action, bits):
        _check_prob(w, "belief")
        p *= w if b else (1.0 - w)
    return p


def enumerate_outcomes(belief: BeliefVector, action: ActionSet) -> Iterator[OutcomeRealization]:
    """All 2^k joint realisations of the sensed channels with their probabilities."""
    action.validate_for(belief.n)
    sensed = [belief.omega[i - 1] for i in action.indices]
    for bits in itertools.product((0, 1), repeat=len(sensed)):
        yield OutcomeRealization(bits, outcome_probability(sensed, bits))


def update_belief(
    belief: BeliefVector,
    action: ActionSet,
    outcome: OutcomeRealization,
    model: TransitionModel,
) -> BeliefVector:
    """Next-step belief: observed channels collapse to p11/p01, the rest propagate by tau."""
    action.validate_for(belief.n)
    if len(outcome.bits) != action.k:
        raise ValueError(
            f"outcome has {len(outcome.bits)} bits but action senses {action.k} channels"
        )
    bit_by_channel = dict(zip(action.indices, outcome.bits))
    values = []
    tags: Optional[list] = [] if belief.tags is not None else None
    for i, w in enumerate(belief.omega, start=1):
        if i in bit_by_channel:
            good = bit_by_channel[i]
            values.append(model.p11 if good else model.p01)
            if tags is not None:
                tags.append((OBSERVED_GOOD, 0) if good else (OBSERVED_BAD, 0))
        else:
            values.append(tau(w, model))
            if tags is not None:
                tags.append(age_tag(belief.tags[i - 1]))
    return BeliefVector(tuple(values), tuple(tags) if tags is not None else None)


def immediate_reward(belief: BeliefVector, action: ActionSet) -> float:
    """One-step expected reward of sensing `action`: sum of the selected beliefs."""
    action.validate_for(belief.n)
    return sum(belief.omega[i - 1] for i in action.indices)


def enumerate_actions(n: int, k: int) -> list[ActionSet]:
    """All C(n, k) sensing sets in lexicographic order of sorted indices."""
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return [ActionSet(c) for c in itertools.combinations(range(1, n + 1), k)]
