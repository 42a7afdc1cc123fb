import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import stodep
from stodep import (
    BudgetedLinearFunction,
    CoverageFunction,
    DomainError,
    EnumerationCapExceeded,
    GeneralTabulatedReward,
    LinearDecayingReward,
    LinearReward,
    State,
    SubmodularReward,
    apply_depletion_no_step,
    apply_depletion_with_step,
    depletion_pmf,
    expected_one_step_reward,
    reward,
    sample_depletion,
    validate_instance,
)

from conftest import make_instance
from oracles import binomial_pmf_oracle


# ---------------------------------------------------------------- validation


def test_worst_case_instance_validates(worst_case_tenth):
    assert validate_instance(worst_case_tenth).passed


def test_probability_out_of_bounds_reported(worst_case_tenth):
    bad = make_instance(
        capacities=(1,),
        horizon=1,
        schedule=[[[1.3]]],
        reward=LinearReward((1.0,)),
    )
    report = validate_instance(bad)
    assert not report.passed
    assert any(v.rule == "probability out of [0,1]" for v in report.violations)


def test_decaying_weights_must_not_increase():
    bad = make_instance(
        capacities=(1,),
        horizon=2,
        schedule=[[[0.5]], [[0.5]]],
        reward=LinearDecayingReward(((1.0, 1.5),)),
    )
    report = validate_instance(bad)
    assert any(v.rule == "w not non-increasing in t" for v in report.violations)


def test_arrival_deadline_masking_enforced():
    inst = make_instance(
        capacities=(1,),
        horizon=3,
        schedule=[[[0.4]], [[0.4]], [[0.4]]],
        reward=LinearReward((1.0,)),
        arrivals=(1,),
        deadlines=(2,),
    )
    report = validate_instance(inst)
    rules = {v.rule for v in report.violations}
    assert "nonzero probability outside the [arrival, deadline) window" in rules
    # Zeroing the masked slots fixes it.
    ok = make_instance(
        capacities=(1,),
        horizon=3,
        schedule=[[[0.0]], [[0.4]], [[0.0]]],
        reward=LinearReward((1.0,)),
        arrivals=(1,),
        deadlines=(2,),
    )
    assert validate_instance(ok).passed


# ----------------------------------------------------------------------- pmf


def test_pmf_single_type_binomial(single_type_instance):
    pmf = dict(depletion_pmf(State((2,), 0), 0, single_type_instance))
    assert pmf == {(0,): 0.25, (1,): 0.5, (2,): 0.25}


def test_pmf_deterministic_activity(worst_case_tenth):
    # activity 0 depletes type 0 with probability 1 and type 1 never
    pmf = depletion_pmf(State((1, 1), 0), 0, worst_case_tenth)
    assert pmf == [((1, 0), 1.0)]


def test_pmf_matches_factorial_formula_oracle():
    inst = make_instance(
        capacities=(1, 2),
        horizon=1,
        schedule=[[[0.3, 0.6]]],
        reward=LinearReward((1.0, 1.0)),
    )
    pmf = depletion_pmf(State((1, 2), 0), 0, inst)
    expected = binomial_pmf_oracle((1, 2), (0.3, 0.6))
    assert len(pmf) == 6
    for alpha, prob in pmf:
        assert prob == pytest.approx(expected[alpha], abs=1e-15)
    assert math.fsum(p for _, p in pmf) == pytest.approx(1.0, abs=1e-12)


def test_pmf_is_lexicographically_ordered(single_type_instance):
    inst = make_instance(
        capacities=(2, 1),
        horizon=1,
        schedule=[[[0.4, 0.7]]],
        reward=LinearReward((1.0, 1.0)),
    )
    outcomes = [alpha for alpha, _ in depletion_pmf(State((2, 1), 0), 0, inst)]
    assert outcomes == sorted(outcomes)


def test_pmf_cap_enforced():
    inst = make_instance(
        capacities=(9, 9, 9),
        horizon=1,
        schedule=[[[0.5, 0.5, 0.5]]],
        reward=LinearReward((1.0, 1.0, 1.0)),
    )
    with pytest.raises(EnumerationCapExceeded):
        depletion_pmf(State((9, 9, 9), 0), 0, inst, outcome_cap=100)


@settings(max_examples=40, deadline=None)
@given(
    counts=st.lists(st.integers(0, 3), min_size=1, max_size=3),
    probs=st.data(),
)
def test_pmf_sums_to_one(counts, probs):
    p = [probs.draw(st.floats(0.0, 1.0)) for _ in counts]
    caps = [max(c, 1) for c in counts]
    inst = make_instance(
        capacities=caps,
        horizon=1,
        schedule=[[p]],
        reward=LinearReward([1.0] * len(counts)),
    )
    pmf = depletion_pmf(State(tuple(counts), 0), 0, inst)
    assert math.fsum(pr for _, pr in pmf) == pytest.approx(1.0, abs=1e-12)
    for alpha, pr in pmf:
        assert all(0 <= a <= c for a, c in zip(alpha, counts))
        # probabilities may underflow to exactly zero for subnormal p
        assert pr >= 0.0


# ------------------------------------------------------------------ sampling


def test_sample_certain_and_impossible():
    inst = make_instance(
        capacities=(2, 2),
        horizon=1,
        schedule=[[[1.0, 0.0]]],
        reward=LinearReward((1.0, 1.0)),
    )
    rng = np.random.default_rng(0)
    assert sample_depletion(State((2, 2), 0), 0, inst, rng) == (2, 0)


def test_sample_frequencies_match_pmf(single_type_instance):
    rng = np.random.default_rng(12345)
    n = 100_000
    counts = [0, 0, 0]
    state = State((2,), 0)
    for _ in range(n):
        counts[sample_depletion(state, 0, single_type_instance, rng)[0]] += 1
    for k, expected_p in enumerate((0.25, 0.5, 0.25)):
        sigma = math.sqrt(n * expected_p * (1 - expected_p))
        assert abs(counts[k] - n * expected_p) <= 3 * sigma


def test_sampling_reproducible(single_type_instance):
    a = sample_depletion(State((2,), 0), 0, single_type_instance, np.random.default_rng(7))
    b = sample_depletion(State((2,), 0), 0, single_type_instance, np.random.default_rng(7))
    assert a == b


# ------------------------------------------------------------------- rewards


def test_example_reward_values(worst_case_tenth):
    assert reward((1, 1), (0, 1), 0, worst_case_tenth) == 1.0
    assert reward((1, 1), (1, 0), 0, worst_case_tenth) == pytest.approx(0.9)
    # terminal epoch always pays zero
    assert reward((1, 1), (0, 0), worst_case_tenth.horizon, worst_case_tenth) == 0.0


def test_reward_domain_error(worst_case_tenth):
    with pytest.raises(DomainError):
        reward((0, 1), (1, 1), 0, worst_case_tenth)


def test_budgeted_linear_truncates():
    w = BudgetedLinearFunction(budgets=(5.0,), values=(3.0, 3.0), groups=(0, 0))
    rew = SubmodularReward(w)
    inst = make_instance(
        capacities=(1, 1),
        horizon=1,
        schedule=[[[1.0, 1.0]]],
        reward=rew,
    )
    # depleting both items in one step pays w(1,1) - w(0,0) = min(5, 6) = 5
    assert reward((1, 1), (0, 0), 0, inst) == 5.0
    # and stepwise the total telescopes to the same 5, not 6
    assert reward((1, 1), (0, 1), 0, inst) + reward((0, 1), (0, 0), 0, inst) == 5.0


def test_no_depletion_no_reward():
    cov = CoverageFunction(2, (frozenset({0}), frozenset({1})), (1.0, 2.0))
    inst = make_instance(
        capacities=(1, 1),
        horizon=2,
        schedule=[[[0.5, 0.5]], [[0.5, 0.5]]],
        reward=SubmodularReward(cov),
    )
    for x in itertools.product(range(2), range(2)):
        assert reward(x, x, 0, inst) == 0.0


def test_submodular_telescoping_exact():
    # dyadic weights keep every partial sum exactly representable
    cov = CoverageFunction(
        3,
        (frozenset({0, 1}), frozenset({1, 2}), frozenset({2})),
        (0.25, 0.5, 0.125),
    )
    inst = make_instance(
        capacities=(1, 2, 1),
        horizon=3,
        schedule=[[[0.5, 0.5, 0.5]]] * 3,
        reward=SubmodularReward(cov),
    )
    trajectory = [(1, 2, 1), (1, 1, 1), (0, 1, 0), (0, 0, 0)]
    total = 0.0
    for t, (x, x_next) in enumerate(zip(trajectory, trajectory[1:])):
        total += reward(x, x_next, t, inst)
    w = inst.reward.w
    assert total == w((1, 2, 1)) - w((0, 0, 0))


def test_tabulated_reward_lookup_and_terminal_default():
    table = {((1,), (0,), 0): 2.0, ((1,), (1,), 0): 0.0, ((0,), (0,), 0): 0.0}
    rew = GeneralTabulatedReward(table)
    inst = make_instance(
        capacities=(1,),
        horizon=1,
        schedule=[[[0.5]]],
        reward=rew,
    )
    assert reward((1,), (0,), 0, inst) == 2.0
    assert reward((1,), (0,), 1, inst) == 0.0  # terminal entries default to zero
    assert validate_instance(inst).passed


# ------------------------------------------------------ expected step reward


def test_expected_reward_example_values(worst_case_tenth):
    s = State((1, 1), 0)
    assert expected_one_step_reward(s, 0, worst_case_tenth) == 1.0
    assert expected_one_step_reward(s, 1, worst_case_tenth) == pytest.approx(0.9)


def test_expected_reward_zero_probabilities(worst_case_tenth):
    assert expected_one_step_reward(State((1, 1), 1), 1, worst_case_tenth) == 0.0


def test_expected_reward_paths_agree():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        caps = (1, 2)
        inst = make_instance(
            capacities=caps,
            horizon=2,
            schedule=rng.random((2, 2, 2)),
            reward=LinearDecayingReward(
                tuple(tuple(sorted((rng.random() for _ in range(2)), reverse=True)) for _ in caps)
            ),
        )
        for t in range(2):
            for a in range(2):
                s = State(caps, t)
                fast = expected_one_step_reward(s, a, inst, method="closed_form")
                slow = expected_one_step_reward(s, a, inst, method="enumerate")
                assert fast == pytest.approx(slow, abs=1e-12)


def test_expected_reward_enumeration_matches_scripted_sum():
    rng = np.random.default_rng(42)
    cov = CoverageFunction(4, (frozenset({0, 1}), frozenset({2, 3})), tuple(rng.random(4)))
    inst = make_instance(
        capacities=(1, 2),
        horizon=1,
        schedule=[[[0.35, 0.65]]],
        reward=SubmodularReward(cov),
    )
    s = State((1, 2), 0)
    # outcome-by-outcome oracle with the factorial pmf and direct evaluator calls
    expected = 0.0
    for alpha, prob in binomial_pmf_oracle((1, 2), (0.35, 0.65)).items():
        expected += prob * (cov((alpha[0], alpha[1])) - cov((0, 0)))
    assert expected_one_step_reward(s, 0, inst) == pytest.approx(expected, abs=1e-12)


# ---------------------------------------------------------------- transforms


def test_transforms_examples():
    assert apply_depletion_with_step(State((1, 1), 0), (1, 0)) == State((0, 1), 1)
    assert apply_depletion_with_step(State((1, 1), 0), (0, 0)) == State((1, 1), 1)
    assert apply_depletion_no_step(State((2, 1), 3), (1, 1)) == State((1, 0), 3)
    assert apply_depletion_no_step(State((2, 1), 3), (0, 0)) == State((2, 1), 3)
    # over-depletion clamps at zero
    assert apply_depletion_with_step(State((1, 0), 0), (4, 2)) == State((0, 0), 1)


@settings(max_examples=60, deadline=None)
@given(
    items=st.lists(st.integers(0, 5), min_size=1, max_size=4),
    data=st.data(),
)
def test_no_step_after_empty_step_equals_step(items, data):
    alpha = tuple(data.draw(st.integers(0, 6)) for _ in items)
    s = State(tuple(items), data.draw(st.integers(0, 3)))
    via_pause = apply_depletion_no_step(apply_depletion_with_step(s, (0,) * len(items)), alpha)
    assert via_pause == apply_depletion_with_step(s, alpha)
