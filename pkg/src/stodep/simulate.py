"""Monte Carlo episode simulation and statistical policy evaluation.

Reproducibility contract: replication k of a Monte Carlo run uses the seed
mix64(master_seed, k), where mix64 is a splitmix64-style avalanche of
master_seed + (k + 1) * 0x9E3779B97F4A7C15 (mod 2^64).  Per-replication totals
are stored by replication index and combined with math.fsum, so results do not
depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Instance, State, apply_depletion_with_step, reward, sample_depletion

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(seed: int, k: int) -> int:
    """Deterministic 64-bit avalanche mix of a seed and an index."""
    z = (seed + (k + 1) * _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass
class EpisodeStep:
    state: State
    activity: int
    outcome: tuple[int, ...]
    reward: float

    def to_dict(self) -> dict:
        return {
            "items": list(self.state.items),
            "t": self.state.epoch,
            "activity": self.activity,
            "outcome": list(self.outcome),
            "reward": self.reward,
        }


@dataclass
class EpisodeTrace:
    """One realized trajectory; per-step rewards sum exactly to total_reward."""

    steps: list[EpisodeStep]
    total_reward: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "total_reward": self.total_reward,
            "steps": [s.to_dict() for s in self.steps],
        }


@dataclass
class EvalSummary:
    mean: float
    stddev: float
    n_reps: int
    std_error: float
    master_seed: int
    policy_name: str

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stddev": self.stddev,
            "n_reps": self.n_reps,
            "std_error": self.std_error,
            "master_seed": self.master_seed,
            "policy_name": self.policy_name,
        }


def simulate_episode(instance: Instance, policy, seed: int) -> EpisodeTrace:
    """Roll out one episode from the initial items under the given policy.

    Bit-reproducible per (instance, policy, seed) on a platform; the caller is
    responsible for passing a validated instance.
    """
    rng = np.random.default_rng(seed)
    items = instance.initial_items
    steps: list[EpisodeStep] = []
    total = 0.0
    for t in range(instance.horizon):
        state = State(items, t)
        activity = policy.select(state, instance)
        alpha = sample_depletion(state, activity, instance, rng)
        next_items = apply_depletion_with_step(state, alpha).items
        earned = reward(items, next_items, t, instance)
        steps.append(EpisodeStep(state=state, activity=activity, outcome=alpha, reward=earned))
        total += earned
        items = next_items
    return EpisodeTrace(steps=steps, total_reward=total, seed=seed)


def summarize_totals(totals, master_seed: int, policy_name: str) -> EvalSummary:
    """Mean/sample-stddev summary of per-replication totals in index order."""
    n = len(totals)
    if n < 1:
        raise ValueError("at least one replication is required")
    mean = math.fsum(totals) / n
    if n > 1:
        variance = math.fsum((v - mean) ** 2 for v in totals) / (n - 1)
        stddev = math.sqrt(variance)
    else:
        stddev = 0.0
    return EvalSummary(
        mean=mean,
        stddev=stddev,
        n_reps=n,
        std_error=stddev / math.sqrt(n),
        master_seed=master_seed,
        policy_name=policy_name,
    )


def monte_carlo_value(
    instance: Instance, policy, n_reps: int, master_seed: int
) -> EvalSummary:
    """Sample mean of the episode total over n_reps seeded replications."""
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    totals = [
        simulate_episode(instance, policy, mix64(master_seed, k)).total_reward
        for k in range(n_reps)
    ]
    return summarize_totals(totals, master_seed, getattr(policy, "name", str(policy)))
