"""The sharp two-type worst case for the myopic policy.

Two items, two epochs, two activities.  Activity 0 can deplete the type-0 item
in either epoch; activity 1 can deplete the type-1 item in the first epoch
only.  Type-0 depletion pays 1, type-1 pays 1 - epsilon, so the myopic policy
grabs type 0 first and strands type 1, earning 1, while depleting type 1 first
earns 2 - epsilon in total.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..model import Instance
from ..rewards import LinearReward


def build_worst_case_instance(epsilon: float) -> Instance:
    if not 0.0 < epsilon < 1.0:
        raise ConfigError("epsilon must be in (0, 1)")
    schedule = np.array(
        [
            [[1.0, 0.0], [0.0, 1.0]],  # t = 0: activity 0 -> type 0, activity 1 -> type 1
            [[1.0, 0.0], [0.0, 0.0]],  # t = 1: only type 0 remains depletable
        ]
    )
    return Instance(
        num_types=2,
        capacities=(1, 1),
        initial_items=(1, 1),
        horizon=2,
        activities=("deplete-first", "deplete-second"),
        schedule=schedule,
        reward=LinearReward((1.0, 1.0 - epsilon)),
        metadata={"app": "worstcase", "epsilon": epsilon},
    )
