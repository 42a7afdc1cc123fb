"""Core problem representation: instances, states, and the binomial depletion kernel.

An instance fixes a realized (clairvoyant) probability schedule: schedule[t][a][m]
is the per-item success probability for depleting type m when activity a runs at
epoch t.  Given the remaining counts x and an activity, the number of items
depleted per type is an independent Binomial(x_m, p_m) draw; outcomes across
types are independent, so the joint law is the product of binomial pmfs.

All operations here are pure functions of their inputs; random sampling takes
an explicit numpy Generator.  Instances should be treated as immutable once
constructed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, DomainError, EnumerationCapExceeded
from .rewards import (
    GeneralTabulatedReward,
    LinearDecayingReward,
    LinearReward,
    RewardSpec,
    SubmodularReward,
)

DEFAULT_OUTCOME_CAP = 10**6
DEFAULT_STATE_CAP = 10**7
DEFAULT_ACTIVITY_CAP = 10**5

# Binomial coefficients come from a precomputed Pascal triangle; per-type
# capacities are capped accordingly.
MAX_CAPACITY = 64

_PASCAL: list[list[int]] = [[1]]
for _n in range(1, MAX_CAPACITY + 1):
    _prev = _PASCAL[-1]
    _PASCAL.append([1] + [_prev[k - 1] + _prev[k] for k in range(1, _n)] + [1])


def binomial_coefficient(n: int, k: int) -> int:
    """C(n, k) from the precomputed triangle, n <= MAX_CAPACITY."""
    return _PASCAL[n][k]


class State(NamedTuple):
    """Reduced clairvoyant state: remaining items per type plus the epoch."""

    items: tuple[int, ...]
    epoch: int


@dataclass(eq=False)
class Instance:
    """A full stochastic depletion problem over a realized probability schedule.

    Fields mirror the canonical JSON form (see stodep.serialize).  The
    constructor enforces shapes and structural limits; value-level rules
    (probability bounds, reward monotonicity, arrival/deadline masking) are
    reported by validate_instance as data, not raised.
    """

    num_types: int
    capacities: tuple[int, ...]
    initial_items: tuple[int, ...]
    horizon: int
    activities: tuple[str, ...]
    schedule: np.ndarray  # shape (horizon, |activities|, num_types)
    reward: RewardSpec
    arrivals: tuple[int, ...] | None = None
    deadlines: tuple[int, ...] | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.num_types = int(self.num_types)
        self.horizon = int(self.horizon)
        self.capacities = tuple(int(c) for c in self.capacities)
        self.initial_items = tuple(int(v) for v in self.initial_items)
        self.activities = tuple(str(a) for a in self.activities)
        if self.num_types < 1:
            raise ConfigError("num_types must be >= 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if not self.activities:
            raise ConfigError("at least one activity is required")
        if len(self.capacities) != self.num_types:
            raise ConfigError("capacities must have one entry per type")
        if len(self.initial_items) != self.num_types:
            raise ConfigError("initial_items must have one entry per type")
        if any(c > MAX_CAPACITY for c in self.capacities):
            raise ConfigError(f"per-type capacity is capped at {MAX_CAPACITY}")
        if any(c < 0 for c in self.capacities):
            raise ConfigError("capacities must be non-negative")
        self.schedule = np.asarray(self.schedule, dtype=np.float64)
        expected = (self.horizon, len(self.activities), self.num_types)
        if self.schedule.shape != expected:
            raise ConfigError(
                f"schedule shape {self.schedule.shape} != (horizon, activities, types) {expected}"
            )
        if self.arrivals is not None:
            self.arrivals = tuple(int(v) for v in self.arrivals)
            if len(self.arrivals) != self.num_types:
                raise ConfigError("arrivals must have one entry per type")
        if self.deadlines is not None:
            self.deadlines = tuple(int(v) for v in self.deadlines)
            if len(self.deadlines) != self.num_types:
                raise ConfigError("deadlines must have one entry per type")
        # Plain-float view of the schedule for the hot loops.
        self._rows = tuple(
            tuple(tuple(float(p) for p in self.schedule[t, a]) for a in range(len(self.activities)))
            for t in range(self.horizon)
        )

    @property
    def num_activities(self) -> int:
        return len(self.activities)

    def probability_row(self, t: int, activity: int) -> tuple[float, ...]:
        """Per-type success probabilities for (epoch, activity)."""
        return self._rows[t][activity]

    def initial_state(self) -> State:
        return State(self.initial_items, 0)


def state_space_size(instance: Instance) -> int:
    """Number of dense table entries: prod(cap_m + 1) * (horizon + 1)."""
    size = instance.horizon + 1
    for c in instance.capacities:
        size *= c + 1
    return size


def outcome_space_size(items: Sequence[int]) -> int:
    """Full outcome-space size prod(x_m + 1) used for the enumeration cap."""
    size = 1
    for x in items:
        size *= x + 1
    return size


@dataclass
class RuleViolation:
    """One broken validation rule, naming the field and indices involved."""

    field: str
    indices: tuple
    rule: str

    def to_dict(self) -> dict:
        return {"field": self.field, "indices": list(self.indices), "rule": self.rule}


@dataclass
class ValidationReport:
    violations: list[RuleViolation]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"passed": self.passed, "violations": [v.to_dict() for v in self.violations]}


def _iter_box(bounds: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All integer vectors 0 <= v <= bounds, lexicographically ascending."""
    return itertools.product(*(range(b + 1) for b in bounds))


def validate_instance(instance: Instance) -> ValidationReport:
    """Check every value-level invariant; violations are data, not failures.

    An instance with an empty violation list is accepted by every other
    operation in the package.
    """
    out: list[RuleViolation] = []
    M, T, A = instance.num_types, instance.horizon, instance.num_activities

    for m, cap in enumerate(instance.capacities):
        if cap < 1:
            out.append(RuleViolation("capacities", (m,), "capacity below 1"))
    for m, x0 in enumerate(instance.initial_items):
        if x0 < 0 or x0 > instance.capacities[m]:
            out.append(RuleViolation("initial_items", (m,), "initial items out of [0, capacity]"))

    sched = instance.schedule
    bad = np.argwhere((sched < 0.0) | (sched > 1.0))
    for t, a, m in bad:
        out.append(RuleViolation("schedule", (int(t), int(a), int(m)), "probability out of [0,1]"))

    if instance.arrivals is not None or instance.deadlines is not None:
        arrivals = instance.arrivals or (0,) * M
        deadlines = instance.deadlines or (T,) * M
        for m in range(M):
            if not 0 <= arrivals[m] <= deadlines[m] <= T:
                out.append(
                    RuleViolation("arrivals/deadlines", (m,), "need 0 <= arrival <= deadline <= horizon")
                )
        for t in range(T):
            for m in range(M):
                if arrivals[m] <= t < deadlines[m]:
                    continue
                for a in range(A):
                    if sched[t, a, m] != 0.0:
                        out.append(
                            RuleViolation(
                                "schedule",
                                (t, a, m),
                                "nonzero probability outside the [arrival, deadline) window",
                            )
                        )
    out.extend(_validate_reward(instance))
    return ValidationReport(out)


def _validate_reward(instance: Instance) -> list[RuleViolation]:
    out: list[RuleViolation] = []
    rew = instance.reward
    M, T = instance.num_types, instance.horizon
    if isinstance(rew, LinearReward):
        if len(rew.weights) != M:
            out.append(RuleViolation("reward.weights", (), "length != num_types"))
            return out
        for m, w in enumerate(rew.weights):
            if w < 0:
                out.append(RuleViolation("reward.weights", (m,), "negative weight"))
    elif isinstance(rew, LinearDecayingReward):
        if len(rew.weights) != M:
            out.append(RuleViolation("reward.weights", (), "one row per type required"))
            return out
        for m, row in enumerate(rew.weights):
            if len(row) != T:
                out.append(RuleViolation("reward.weights", (m,), "row length != horizon"))
                continue
            for t, w in enumerate(row):
                if w < 0:
                    out.append(RuleViolation("reward.weights", (m, t), "negative weight"))
                if t + 1 < T and row[t + 1] > w:
                    out.append(RuleViolation("reward.weights", (m, t + 1), "w not non-increasing in t"))
    elif isinstance(rew, SubmodularReward):
        out.extend(_validate_submodular_structure(rew, M))
    elif isinstance(rew, GeneralTabulatedReward):
        out.extend(_validate_tabulated(rew, instance))
    else:
        out.append(RuleViolation("reward", (), f"unknown reward spec {type(rew).__name__}"))
    return out


def _validate_submodular_structure(rew: SubmodularReward, num_types: int) -> list[RuleViolation]:
    # Built-in evaluators are submodular by construction, so only their data
    # ranges need checking; custom evaluators are checked on demand by
    # stodep.properties.check_submodular.
    from .rewards import BudgetedLinearFunction, CoverageFunction

    out: list[RuleViolation] = []
    ev = rew.evaluator
    if isinstance(ev, CoverageFunction):
        if len(ev.covers) != num_types:
            out.append(RuleViolation("reward.covers", (), "one cover per type required"))
        for e, w in enumerate(ev.element_weights):
            if w < 0:
                out.append(RuleViolation("reward.element_weights", (e,), "negative weight"))
    elif isinstance(ev, BudgetedLinearFunction):
        if len(ev.values) != num_types:
            out.append(RuleViolation("reward.values", (), "one value per type required"))
        for g, b in enumerate(ev.budgets):
            if b < 0:
                out.append(RuleViolation("reward.budgets", (g,), "negative budget"))
        for m, v in enumerate(ev.values):
            if v < 0:
                out.append(RuleViolation("reward.values", (m,), "negative value"))
    return out


def _validate_tabulated(rew: GeneralTabulatedReward, instance: Instance) -> list[RuleViolation]:
    out: list[RuleViolation] = []
    T = instance.horizon
    for x in _iter_box(instance.capacities):
        for x_next in _iter_box(x):
            previous = None
            for t in range(T + 1):
                value = rew.table.get((x, x_next, t))
                if value is None:
                    if t < T:
                        out.append(RuleViolation("reward.table", (x, x_next, t), "missing entry"))
                        previous = None
                        continue
                    value = 0.0  # terminal entries default to zero
                if value < 0:
                    out.append(RuleViolation("reward.table", (x, x_next, t), "negative reward"))
                if t == T and value != 0.0:
                    out.append(RuleViolation("reward.table", (x, x_next, t), "terminal reward nonzero"))
                if previous is not None and value > previous:
                    out.append(RuleViolation("reward.table", (x, x_next, t), "g not non-increasing in t"))
                previous = value
    return out


def _type_support(count: int, p: float) -> tuple[tuple[int, float], ...]:
    """Positive-probability (count, probability) pairs for one type, ascending."""
    if count == 0 or p == 0.0:
        return ((0, 1.0),)
    if p == 1.0:
        return ((count, 1.0),)
    q = 1.0 - p
    return tuple(
        (j, binomial_coefficient(count, j) * p**j * q ** (count - j)) for j in range(count + 1)
    )


def depletion_pmf(
    state: State,
    activity: int,
    instance: Instance,
    *,
    outcome_cap: int = DEFAULT_OUTCOME_CAP,
) -> list[tuple[tuple[int, ...], float]]:
    """Exact joint law of depletion counts: the product of per-type binomials.

    Returns the support only (outcomes with positive probability), ordered
    lexicographically in the outcome vector.  The cap applies to the full
    outcome-space size prod(x_m + 1) before any support pruning.
    """
    x, t = state.items, state.epoch
    if t > instance.horizon - 1:
        raise DomainError(f"epoch {t} has no decision (horizon {instance.horizon})")
    if not 0 <= activity < instance.num_activities:
        raise DomainError(f"activity index {activity} out of range")
    if outcome_space_size(x) > outcome_cap:
        raise EnumerationCapExceeded(
            f"outcome space {outcome_space_size(x)} exceeds cap {outcome_cap}"
        )
    p_row = instance.probability_row(t, activity)
    supports = [_type_support(x[m], p_row[m]) for m in range(instance.num_types)]
    pmf = []
    for combo in itertools.product(*supports):
        prob = 1.0
        for _, pr in combo:
            prob *= pr
        pmf.append((tuple(j for j, _ in combo), prob))
    return pmf


def sample_depletion(
    state: State, activity: int, instance: Instance, rng: np.random.Generator
) -> tuple[int, ...]:
    """Draw one outcome vector; per-type binomial draws in type order."""
    x, t = state.items, state.epoch
    if t > instance.horizon - 1:
        raise DomainError(f"epoch {t} has no decision (horizon {instance.horizon})")
    p_row = instance.probability_row(t, activity)
    return tuple(
        int(rng.binomial(x[m], p_row[m])) if x[m] > 0 else 0 for m in range(instance.num_types)
    )


def reward(
    x: Sequence[int], x_next: Sequence[int], t: int, instance: Instance
) -> float:
    """g(x, x', t) for this instance's reward spec; zero at the terminal epoch."""
    x = tuple(x)
    x_next = tuple(x_next)
    if any(n > v for n, v in zip(x_next, x)):
        raise DomainError(f"x_next {x_next} not componentwise <= x {x}")
    if any(v > c for v, c in zip(x, instance.capacities)):
        raise DomainError(f"x {x} exceeds capacities {instance.capacities}")
    return instance.reward.amount(
        x, x_next, t, horizon=instance.horizon, capacities=instance.capacities
    )


def outcome_reward_fn(instance: Instance):
    """Specialized g(x, alpha, t) on depletion counts, for the solver hot loops.

    Bit-identical to reward(x, x - alpha, t, instance) for alpha <= x; inputs
    are assumed valid by construction.
    """
    rew = instance.reward
    T = instance.horizon
    M = instance.num_types
    caps = instance.capacities
    if isinstance(rew, LinearReward):
        w = rew.weights

        def linear(x, alpha, t):
            if t >= T:
                return 0.0
            return sum(w[m] * alpha[m] for m in range(M))

        return linear
    if isinstance(rew, LinearDecayingReward):
        rows = rew.weights

        def decaying(x, alpha, t):
            if t >= T:
                return 0.0
            return sum(rows[m][t] * alpha[m] for m in range(M))

        return decaying
    if isinstance(rew, SubmodularReward):
        w = rew.w

        def telescoped(x, alpha, t):
            if t >= T:
                return 0.0
            before = tuple(caps[m] - x[m] for m in range(M))
            after = tuple(before[m] + alpha[m] for m in range(M))
            return w(after) - w(before)

        return telescoped

    def tabulated(x, alpha, t):
        x_next = tuple(x[m] - alpha[m] for m in range(M))
        return rew.amount(x, x_next, t, horizon=T, capacities=caps)

    return tabulated


def expected_one_step_reward(
    state: State,
    activity: int,
    instance: Instance,
    *,
    method: str = "auto",
    outcome_cap: int = DEFAULT_OUTCOME_CAP,
) -> float:
    """E[g(x, x - X, t)] for one activity at one state.

    For linear and linear-decaying rewards the closed form
    sum_m w[m][t] * x_m * p_m is used (method="auto"/"closed_form"); the general
    path enumerates the depletion pmf.  Both paths agree within 1e-12 wherever
    both apply.
    """
    x, t = state.items, state.epoch
    if t > instance.horizon - 1:
        raise DomainError(f"epoch {t} has no decision (horizon {instance.horizon})")
    rew = instance.reward
    if method not in ("auto", "enumerate", "closed_form"):
        raise ConfigError(f"unknown method {method!r}")
    linear_kind = isinstance(rew, (LinearReward, LinearDecayingReward))
    if method == "closed_form" and not linear_kind:
        raise ConfigError("closed form only applies to linear and linear-decaying rewards")
    if linear_kind and method != "enumerate":
        p_row = instance.probability_row(t, activity)
        if isinstance(rew, LinearReward):
            weights = rew.weights
        else:
            weights = tuple(row[t] for row in rew.weights)
        return sum(weights[m] * x[m] * p_row[m] for m in range(instance.num_types))
    g = outcome_reward_fn(instance)
    total = 0.0
    for alpha, prob in depletion_pmf(state, activity, instance, outcome_cap=outcome_cap):
        total += prob * g(x, alpha, t)
    return total


def apply_depletion_with_step(state: State, alpha: Sequence[int]) -> State:
    """Deplete alpha items (clamped at zero) and advance the epoch."""
    items = tuple(max(0, v - a) for v, a in zip(state.items, alpha))
    return State(items, state.epoch + 1)


def apply_depletion_no_step(state: State, alpha: Sequence[int]) -> State:
    """Deplete alpha items (clamped at zero) without consuming an epoch."""
    items = tuple(max(0, v - a) for v, a in zip(state.items, alpha))
    return State(items, state.epoch)
