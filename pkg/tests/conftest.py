import numpy as np
import pytest

from stodep import Instance, LinearReward
from stodep.apps import build_worst_case_instance


def make_instance(
    capacities,
    horizon,
    schedule,
    reward,
    initial_items=None,
    activities=None,
    **kwargs,
):
    """Small-instance helper: derives counts from the shapes supplied."""
    schedule = np.asarray(schedule, dtype=float)
    num_types = len(capacities)
    num_activities = schedule.shape[1]
    return Instance(
        num_types=num_types,
        capacities=tuple(capacities),
        initial_items=tuple(initial_items if initial_items is not None else capacities),
        horizon=horizon,
        activities=tuple(activities if activities is not None else (f"a{j}" for j in range(num_activities))),
        schedule=schedule,
        reward=reward,
        **kwargs,
    )


@pytest.fixture
def worst_case_tenth():
    """The sharp two-type example with epsilon = 0.1."""
    return build_worst_case_instance(0.1)


@pytest.fixture
def single_type_instance():
    """One type, capacity 2, one activity with p = 0.5, unit reward, T = 2."""
    return make_instance(
        capacities=(2,),
        horizon=2,
        schedule=[[[0.5]], [[0.5]]],
        reward=LinearReward((1.0,)),
    )
