"""Submodular maximization over cardinality and partition matroids, plus
stochastic selection.

Both reductions use one unit-capacity type per ground-set element and one
activity per element.  Under the cardinality bound k the horizon is k and any
element may be attempted in any epoch; under a partition the horizon is
sum_i k_i and consecutive time blocks of length k_i admit only elements of
block i (the myopic policy then coincides with the local-greedy heuristic).
Selection is deterministic unless per-element success sequences are supplied,
in which case attempting element e at epoch t succeeds with probability
P_t^e (stochastic selection).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ..errors import ActivityCapExceeded, ConfigError, InvalidPartition
from ..model import DEFAULT_ACTIVITY_CAP, Instance
from ..rewards import (
    BudgetedLinearFunction,
    CoverageFunction,
    SetFunctionEvaluator,
    SubmodularReward,
)


@dataclass
class MatroidParams:
    """Ground set with a monotone submodular value and a matroid constraint.

    value: a count-vector evaluator (CoverageFunction, BudgetedLinearFunction)
    or a set-function callable f(frozenset of element indices) -> float.
    Exactly one of `cardinality` or `partition` must be given.  partition is a
    list of (element-index list, k_i) blocks.  selection_probs is None for
    deterministic selection, a constant in [0, 1], or a mapping from element
    index to a per-epoch probability list.
    """

    elements: tuple[str, ...]
    value: object
    cardinality: int | None = None
    partition: tuple[tuple[tuple[int, ...], int], ...] | None = None
    selection_probs: object = None

    def __post_init__(self):
        self.elements = tuple(str(e) for e in self.elements)
        if (self.cardinality is None) == (self.partition is None):
            raise ConfigError("exactly one of cardinality or partition must be set")


def _reward_for(params: MatroidParams) -> SubmodularReward:
    value = params.value
    if isinstance(value, (CoverageFunction, BudgetedLinearFunction, SetFunctionEvaluator)):
        return SubmodularReward(value)
    if callable(value):
        return SubmodularReward(SetFunctionEvaluator(value))
    raise ConfigError("value must be an evaluator or a set-function callable")


def _success(params: MatroidParams, m: int, t: int) -> float:
    probs = params.selection_probs
    if probs is None:
        return 1.0
    if isinstance(probs, (int, float)):
        return float(probs)
    seq = probs[m]
    return float(seq[t])


def build_cardinality_matroid_instance(
    params: MatroidParams, *, activity_cap: int = DEFAULT_ACTIVITY_CAP
) -> Instance:
    if params.cardinality is None:
        raise ConfigError("cardinality bound required")
    n = len(params.elements)
    k = int(params.cardinality)
    if not 1 <= k <= n:
        raise ConfigError("need 1 <= k <= |elements|")
    if n > activity_cap:
        raise ActivityCapExceeded(f"{n} activities exceed cap {activity_cap}")
    schedule = np.zeros((k, n, n))
    for t in range(k):
        for j in range(n):
            schedule[t, j, j] = _success(params, j, t)
    return Instance(
        num_types=n,
        capacities=(1,) * n,
        initial_items=(1,) * n,
        horizon=k,
        activities=params.elements,
        schedule=schedule,
        reward=_reward_for(params),
        metadata={"app": "matroid-card", "k": k,
                  "stochastic": params.selection_probs is not None},
    )


def build_partition_matroid_instance(
    params: MatroidParams, *, activity_cap: int = DEFAULT_ACTIVITY_CAP
) -> Instance:
    if params.partition is None:
        raise ConfigError("partition blocks required")
    n = len(params.elements)
    if n > activity_cap:
        raise ActivityCapExceeded(f"{n} activities exceed cap {activity_cap}")
    seen: set[int] = set()
    for members, _ in params.partition:
        members = set(members)
        if members & seen:
            raise InvalidPartition("partition blocks overlap")
        if any(m < 0 or m >= n for m in members):
            raise InvalidPartition("partition references an unknown element")
        seen |= members
    if seen != set(range(n)):
        raise InvalidPartition("partition does not cover the ground set")
    horizon = sum(int(k_i) for _, k_i in params.partition)
    if horizon < 1:
        raise ConfigError("partition must admit at least one selection")
    # block_of_epoch[t] = members selectable during epoch t
    block_members: list[frozenset[int]] = []
    for members, k_i in params.partition:
        block_members.extend([frozenset(members)] * int(k_i))
    schedule = np.zeros((horizon, n, n))
    for t, members in enumerate(block_members):
        for j in members:
            schedule[t, j, j] = _success(params, j, t)
    return Instance(
        num_types=n,
        capacities=(1,) * n,
        initial_items=(1,) * n,
        horizon=horizon,
        activities=params.elements,
        schedule=schedule,
        reward=_reward_for(params),
        metadata={
            "app": "matroid-part",
            "blocks": [[sorted(int(m) for m in members), int(k_i)] for members, k_i in params.partition],
            "stochastic": params.selection_probs is not None,
        },
    )


def matroid_params_from_dict(data: Mapping) -> MatroidParams:
    """Parse JSON matroid parameters (value must be a built-in evaluator spec)."""
    from ..rewards import reward_from_dict

    value_spec = data["value"]
    reward = reward_from_dict(value_spec)
    if not isinstance(reward, SubmodularReward):
        raise ConfigError("matroid value must be a submodular evaluator spec")
    partition = None
    if data.get("partition") is not None:
        partition = tuple(
            (tuple(int(m) for m in block["elements"]), int(block["k"]))
            for block in data["partition"]
        )
    return MatroidParams(
        elements=tuple(data["elements"]),
        value=reward.evaluator,
        cardinality=data.get("cardinality"),
        partition=partition,
        selection_probs=data.get("selection_probs"),
    )
