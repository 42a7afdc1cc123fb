"""Exact clairvoyant finite-horizon dynamic programming over the reduced state space.

The dense value table covers every (x, t) with 0 <= x <= capacities
componentwise and 0 <= t <= horizon, because the property checkers quantify
over all states, not just those reachable from the initial items.

State indexing is mixed-radix with type 0 least significant:

    index(x) = sum_m x_m * prod_{m' < m} (cap_{m'} + 1)

so external tools can address exported tables directly.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainError,
    EnumerationCapExceeded,
    FingerprintMismatch,
    StateSpaceCapExceeded,
)
from .model import (
    DEFAULT_OUTCOME_CAP,
    DEFAULT_STATE_CAP,
    Instance,
    State,
    _type_support,
    outcome_reward_fn,
    outcome_space_size,
    state_space_size,
)
from .serialize import instance_fingerprint


def mixed_radix_radices(capacities: Sequence[int]) -> tuple[int, ...]:
    radices = [1]
    for cap in capacities[:-1]:
        radices.append(radices[-1] * (cap + 1))
    return tuple(radices)


def state_index(items: Sequence[int], radices: Sequence[int]) -> int:
    return sum(v * r for v, r in zip(items, radices))


def decode_state(index: int, capacities: Sequence[int]) -> tuple[int, ...]:
    items = []
    for cap in capacities:
        index, v = divmod(index, cap + 1)
        items.append(v)
    return tuple(items)


@dataclass(eq=False)
class ValueTable:
    """Dense J(x, t) plus the maximizing activity per (x, t < horizon).

    For tables produced by evaluate_policy_exact, best_activity holds the
    policy's chosen activity and policy_name records which policy.
    """

    capacities: tuple[int, ...]
    horizon: int
    num_activities: int
    fingerprint: str
    values: np.ndarray  # (num_states, horizon + 1)
    best_activity: np.ndarray  # (num_states, horizon), int32
    policy_name: str | None = None

    def __post_init__(self):
        self.radices = mixed_radix_radices(self.capacities)

    @property
    def num_states(self) -> int:
        return self.values.shape[0]

    def state_index(self, items: Sequence[int]) -> int:
        return state_index(items, self.radices)

    def matches(self, instance: Instance) -> bool:
        return self.fingerprint == instance_fingerprint(instance)

    def require_match(self, instance: Instance) -> None:
        if not self.matches(instance):
            raise FingerprintMismatch(
                "value table fingerprint does not match the supplied instance"
            )

    def to_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "capacities": list(self.capacities),
            "horizon": self.horizon,
            "num_activities": self.num_activities,
            "policy_name": self.policy_name,
            "values": self.values.tolist(),
            "best_activity": self.best_activity.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ValueTable":
        return cls(
            capacities=tuple(data["capacities"]),
            horizon=data["horizon"],
            num_activities=data["num_activities"],
            fingerprint=data["fingerprint"],
            values=np.asarray(data["values"], dtype=np.float64),
            best_activity=np.asarray(data["best_activity"], dtype=np.int32),
            policy_name=data.get("policy_name"),
        )

    def save_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)


def _check_state(table: ValueTable, state: State) -> int:
    if len(state.items) != len(table.capacities):
        raise DomainError("state dimensionality does not match the table")
    if any(v < 0 or v > c for v, c in zip(state.items, table.capacities)):
        raise DomainError(f"items {state.items} outside capacities {table.capacities}")
    if not 0 <= state.epoch <= table.horizon:
        raise DomainError(f"epoch {state.epoch} outside [0, {table.horizon}]")
    return table.state_index(state.items)


def optimal_value(table: ValueTable, state: State, instance: Instance | None = None) -> float:
    """Constant-time J(x, t) lookup; verifies the fingerprint if an instance is given."""
    if instance is not None:
        table.require_match(instance)
    idx = _check_state(table, state)
    return float(table.values[idx, state.epoch])


def best_activity(table: ValueTable, state: State) -> int:
    idx = _check_state(table, state)
    if state.epoch >= table.horizon:
        raise DomainError("no activity is chosen at the terminal epoch")
    return int(table.best_activity[idx, state.epoch])


def _outcome_terms(
    x: tuple[int, ...], p_row: Sequence[float], radices: Sequence[int]
) -> list[tuple[tuple[int, ...], float, int]]:
    """Support outcomes as (alpha, probability, index delta), lexicographic."""
    supports = [_type_support(x[m], p_row[m]) for m in range(len(x))]
    terms = []
    for combo in itertools.product(*supports):
        prob = 1.0
        delta = 0
        for m, (j, pr) in enumerate(combo):
            prob *= pr
            delta += j * radices[m]
        terms.append((tuple(j for j, _ in combo), prob, delta))
    return terms


def _prepare(instance: Instance, state_cap: int, outcome_cap: int):
    caps = instance.capacities
    n_entries = state_space_size(instance)
    if n_entries > state_cap:
        raise StateSpaceCapExceeded(f"state space {n_entries} exceeds cap {state_cap}")
    if outcome_space_size(caps) > outcome_cap:
        raise EnumerationCapExceeded(
            f"outcome space {outcome_space_size(caps)} exceeds cap {outcome_cap}"
        )
    radices = mixed_radix_radices(caps)
    n_states = n_entries // (instance.horizon + 1)
    states = [decode_state(i, caps) for i in range(n_states)]
    return radices, states


def _backward_sweep(
    instance: Instance,
    select: Callable[[State], int] | None,
    state_cap: int,
    outcome_cap: int,
) -> ValueTable:
    """Backward induction; select=None maximizes (ties to the lowest index)."""
    radices, states = _prepare(instance, state_cap, outcome_cap)
    T = instance.horizon
    A = instance.num_activities
    g = outcome_reward_fn(instance)
    values = np.zeros((len(states), T + 1), dtype=np.float64)
    chosen = np.full((len(states), T), -1, dtype=np.int32)
    for t in range(T - 1, -1, -1):
        next_col = values[:, t + 1]
        for si, x in enumerate(states):
            if select is None:
                best_q = -np.inf
                best_a = -1
                for a in range(A):
                    q = 0.0
                    for alpha, prob, delta in _outcome_terms(
                        x, instance.probability_row(t, a), radices
                    ):
                        q += prob * (g(x, alpha, t) + next_col[si - delta])
                    if q > best_q:
                        best_q, best_a = q, a
                values[si, t] = best_q
                chosen[si, t] = best_a
            else:
                a = select(State(x, t))
                q = 0.0
                for alpha, prob, delta in _outcome_terms(
                    x, instance.probability_row(t, a), radices
                ):
                    q += prob * (g(x, alpha, t) + next_col[si - delta])
                values[si, t] = q
                chosen[si, t] = a
    return ValueTable(
        capacities=instance.capacities,
        horizon=T,
        num_activities=A,
        fingerprint=instance_fingerprint(instance),
        values=values,
        best_activity=chosen,
    )


def solve_clairvoyant(
    instance: Instance,
    *,
    state_cap: int = DEFAULT_STATE_CAP,
    outcome_cap: int = DEFAULT_OUTCOME_CAP,
) -> ValueTable:
    """Exact J* by backward induction over the full reduced state space.

    Deterministic: outcomes are accumulated in lexicographic order and
    activity ties resolve to the lowest index.
    """
    return _backward_sweep(instance, None, state_cap, outcome_cap)


def evaluate_policy_exact(
    instance: Instance,
    policy,
    *,
    state_cap: int = DEFAULT_STATE_CAP,
    outcome_cap: int = DEFAULT_OUTCOME_CAP,
) -> ValueTable:
    """Exact J^pi via the same recursion with the policy's activity fixed."""
    table = _backward_sweep(
        instance,
        lambda state: policy.select(state, instance),
        state_cap,
        outcome_cap,
    )
    table.policy_name = getattr(policy, "name", str(policy))
    return table


@dataclass
class AuditReport:
    """Result of the one-sweep backward-consistency audit."""

    entries_checked: int
    max_residual: float
    failures: list[dict]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "entries_checked": self.entries_checked,
            "max_residual": self.max_residual,
            "passed": self.passed,
            "failures": self.failures,
        }


def audit_table(
    instance: Instance,
    table: ValueTable,
    *,
    tol: float = 1e-12,
    policy=None,
    outcome_cap: int = DEFAULT_OUTCOME_CAP,
) -> AuditReport:
    """Recompute one backward step at every (x, t) and compare with the table.

    With policy=None the table is audited against the maximizing recursion
    (including that best_activity attains the maximum); otherwise against the
    policy's fixed choice.
    """
    table.require_match(instance)
    radices, states = _prepare(instance, state_cap=2**62, outcome_cap=outcome_cap)
    T = instance.horizon
    g = outcome_reward_fn(instance)
    failures: list[dict] = []
    max_residual = 0.0
    checked = 0
    for t in range(T - 1, -1, -1):
        next_col = table.values[:, t + 1]
        for si, x in enumerate(states):
            q_by_activity = []
            if policy is None:
                acts = range(instance.num_activities)
            else:
                acts = [policy.select(State(x, t), instance)]
            for a in acts:
                q = 0.0
                for alpha, prob, delta in _outcome_terms(
                    x, instance.probability_row(t, a), radices
                ):
                    q += prob * (g(x, alpha, t) + next_col[si - delta])
                q_by_activity.append((q, a))
            target = max(q for q, _ in q_by_activity)
            residual = abs(float(table.values[si, t]) - target)
            max_residual = max(max_residual, residual)
            checked += 1
            stored_a = int(table.best_activity[si, t])
            attained = next((q for q, a in q_by_activity if a == stored_a), None)
            if residual > tol or attained is None or abs(attained - target) > tol:
                failures.append(
                    {
                        "items": list(x),
                        "t": t,
                        "stored": float(table.values[si, t]),
                        "recomputed": target,
                        "residual": residual,
                    }
                )
    # Terminal boundary: J(x, horizon) must be exactly zero.
    for si, x in enumerate(states):
        checked += 1
        if table.values[si, T] != 0.0:
            failures.append(
                {"items": list(x), "t": T, "stored": float(table.values[si, T]), "recomputed": 0.0,
                 "residual": abs(float(table.values[si, T]))}
            )
    return AuditReport(entries_checked=checked, max_residual=max_residual, failures=failures)
