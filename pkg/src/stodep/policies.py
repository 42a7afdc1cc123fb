"""Deterministic activity-selection policies behind one interface.

Every policy is a total mapping (state, instance) -> activity index with a
stable name; the same inputs always produce the same choice, so exact policy
evaluation and seeded simulation are reproducible.
"""

from __future__ import annotations

import weakref

from .errors import ConfigError, DomainError
from .model import Instance, State, expected_one_step_reward


class Policy:
    """Deterministic total mapping from (state, instance) to an activity index."""

    name: str = "abstract"

    def select(self, state: State, instance: Instance) -> int:
        raise NotImplementedError


def _one_step_values(state: State, instance: Instance) -> list[float]:
    return [
        expected_one_step_reward(state, a, instance)
        for a in range(instance.num_activities)
    ]


class MyopicPolicy(Policy):
    """Maximizes the expected reward of the next epoch; ties to the lowest index.

    Decisions are memoized per instance (keyed weakly) since they depend only
    on (items, epoch).
    """

    name = "myopic"

    def __init__(self):
        self._memo: weakref.WeakKeyDictionary[Instance, dict] = weakref.WeakKeyDictionary()

    def select(self, state: State, instance: Instance) -> int:
        cache = self._memo.setdefault(instance, {})
        key = (state.items, state.epoch)
        choice = cache.get(key)
        if choice is None:
            values = _one_step_values(state, instance)
            best = 0
            for a in range(1, len(values)):
                if values[a] > values[best]:
                    best = a
            choice = best
            cache[key] = choice
        return choice


class ApproxMyopicPolicy(Policy):
    """Adversarial 1/alpha-approximate one-step oracle.

    Among activities whose expected one-step reward is at least (1/alpha) times
    the maximum, picks the one with the smallest expected reward (ties to the
    lowest index).  This is the weakest oracle the 1+alpha guarantee admits,
    which is what makes it useful for stress-testing that bound.
    """

    def __init__(self, alpha: float):
        if alpha < 1.0:
            raise ConfigError("alpha must be >= 1")
        self.alpha = float(alpha)
        self.name = f"approx:{self.alpha:g}"
        self._memo: weakref.WeakKeyDictionary[Instance, dict] = weakref.WeakKeyDictionary()

    def select(self, state: State, instance: Instance) -> int:
        cache = self._memo.setdefault(instance, {})
        key = (state.items, state.epoch)
        choice = cache.get(key)
        if choice is None:
            values = _one_step_values(state, instance)
            threshold = max(values) / self.alpha
            choice = None
            for a, v in enumerate(values):
                if v >= threshold and (choice is None or v < values[choice]):
                    choice = a
            cache[key] = choice
        return choice


class TablePolicy(Policy):
    """Greedy maximizer read off a solved value table."""

    name = "optimal"

    def __init__(self, table):
        self.table = table
        self._verified: weakref.WeakKeyDictionary[Instance, bool] = weakref.WeakKeyDictionary()

    def select(self, state: State, instance: Instance) -> int:
        if not self._verified.get(instance, False):
            self.table.require_match(instance)
            self._verified[instance] = True
        if state.epoch >= self.table.horizon:
            raise DomainError("no activity is defined at the terminal epoch")
        return int(self.table.best_activity[self.table.state_index(state.items), state.epoch])


class FixedPolicy(Policy):
    """Always the same activity."""

    def __init__(self, activity: int):
        if activity < 0:
            raise ConfigError("activity index must be non-negative")
        self.activity = int(activity)
        self.name = f"fixed:{self.activity}"

    def select(self, state: State, instance: Instance) -> int:
        if self.activity >= instance.num_activities:
            raise ConfigError(
                f"fixed activity {self.activity} out of range for {instance.num_activities} activities"
            )
        return self.activity


class RoundRobinPolicy(Policy):
    """Epoch t selects activity t mod |activities|."""

    name = "round_robin"

    def select(self, state: State, instance: Instance) -> int:
        return state.epoch % instance.num_activities


class SeededRandomPolicy(Policy):
    """Pseudo-random but deterministic: the choice is a hash of (seed, state).

    Folding items and epoch through the splitmix64 mixer keeps the mapping a
    pure function, so repeated calls on the same state agree.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.name = f"random:{self.seed}"

    def select(self, state: State, instance: Instance) -> int:
        from .simulate import mix64

        h = mix64(self.seed, state.epoch)
        for v in state.items:
            h = mix64(h, v)
        return h % instance.num_activities


def myopic_policy() -> Policy:
    return MyopicPolicy()


def approx_myopic_policy(alpha: float) -> Policy:
    return ApproxMyopicPolicy(alpha)


def optimal_policy_from_table(table) -> Policy:
    return TablePolicy(table)


def baseline_policies() -> dict:
    """Factories for the experimental-control policies."""
    return {
        "random": SeededRandomPolicy,
        "fixed": FixedPolicy,
        "round_robin": RoundRobinPolicy,
    }


def policy_from_name(name: str, *, table=None) -> Policy:
    """Parse a CLI policy spec: myopic|optimal|approx:<a>|random:<seed>|fixed:<a>|round_robin."""
    if name == "myopic":
        return MyopicPolicy()
    if name == "optimal":
        if table is None:
            raise ConfigError("the optimal policy requires a solved value table")
        return TablePolicy(table)
    if name == "round_robin":
        return RoundRobinPolicy()
    if ":" in name:
        head, _, arg = name.partition(":")
        try:
            if head == "approx":
                return ApproxMyopicPolicy(float(arg))
            if head == "random":
                return SeededRandomPolicy(int(arg))
            if head == "fixed":
                return FixedPolicy(int(arg))
        except ValueError as exc:
            raise ConfigError(f"bad policy argument in {name!r}") from exc
    raise ConfigError(f"unknown policy {name!r}")
