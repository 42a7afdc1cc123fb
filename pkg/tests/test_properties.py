import math

import numpy as np
import pytest

import stodep
from stodep import (
    BudgetedLinearFunction,
    ConfigError,
    CoverageFunction,
    GeneralTabulatedReward,
    LinearDecayingReward,
    LinearReward,
    State,
    SubmodularReward,
    check_assumption1,
    check_ir,
    check_ratio,
    check_submodular,
    check_vfm,
    myopic_policy,
    solve_clairvoyant,
)
from stodep.apps import (
    build_worst_case_instance,
    random_linear_decaying_instance,
    random_submodular_instance,
)

from conftest import make_instance


def test_vfm_and_ir_hold_on_both_families():
    for seed in range(6):
        for generator in (random_submodular_instance, random_linear_decaying_instance):
            inst = generator(seed)
            table = solve_clairvoyant(inst)
            vfm = check_vfm(inst, table)
            ir = check_ir(inst, table)
            assert vfm.passed, (generator.__name__, seed, vfm.violations[:1])
            assert ir.passed, (generator.__name__, seed, ir.violations[:1])
            assert vfm.checked > 0 and ir.checked > 0


def non_submodular_counterexample():
    """Monotone but supermodular potential; one activity reaches only type 1."""
    potential = lambda y: float((y[0] + y[1]) ** 2)
    reward = GeneralTabulatedReward.from_potential(potential, (1, 1), 1)
    return make_instance(
        capacities=(1, 1),
        horizon=1,
        schedule=[[[0.0, 1.0]]],
        reward=reward,
    )


def test_vfm_violated_without_submodularity():
    inst = non_submodular_counterexample()
    assert stodep.validate_instance(inst).passed  # monotone => valid reward data
    table = solve_clairvoyant(inst)
    report = check_vfm(inst, table)
    assert not report.passed
    # the witness: dropping the type-0 item raises the value from 1 to 3
    assert stodep.optimal_value(table, State((1, 1), 0)) == 1.0
    assert stodep.optimal_value(table, State((0, 1), 0)) == 3.0


def test_ir_alpha_zero_is_trivial(worst_case_tenth):
    table = solve_clairvoyant(worst_case_tenth)
    report = check_ir(worst_case_tenth, table)
    assert report.passed
    # alpha = 0 pairs are included and satisfied with equality
    assert report.checked >= table.num_states * (worst_case_tenth.horizon + 1)


def test_ir_cap():
    inst = random_submodular_instance(0)
    table = solve_clairvoyant(inst)
    with pytest.raises(stodep.EnumerationCapExceeded):
        check_ir(inst, table, pair_cap=2)


def test_check_submodular_builtins_pass():
    coverage = SubmodularReward(
        CoverageFunction(3, (frozenset({0, 1}), frozenset({2})), (1.0, 2.0, 0.5))
    )
    assert check_submodular(coverage, (2, 2)).passed
    budgeted = SubmodularReward(
        BudgetedLinearFunction(budgets=(1.0, math.inf), values=(2.0, 0.3), groups=(0, 1))
    )
    assert check_submodular(budgeted, (2, 2)).passed


def test_check_submodular_flags_supermodular():
    rew = SubmodularReward(lambda y: float(sum(y)) ** 2, label="sum-squared")
    report = check_submodular(rew, (1, 1))
    assert not report.passed
    kinds = {v.witness["kind"] for v in report.violations}
    assert kinds == {"diminishing_returns"}  # monotone, so only the DR side fails
    witnessed = {
        (tuple(v.witness["y_prime"]), tuple(v.witness["y"]), v.witness["m"])
        for v in report.violations
    }
    assert ((0, 0), (1, 0), 1) in witnessed


def test_check_submodular_rejects_other_variants():
    with pytest.raises(ConfigError):
        check_submodular(LinearReward((1.0,)), (1,))


def test_assumption1_linear_decaying():
    good = make_instance(
        capacities=(1,),
        horizon=2,
        schedule=[[[0.5]], [[0.5]]],
        reward=LinearDecayingReward(((0.9, 0.2),)),
    )
    assert check_assumption1(good).passed


def test_assumption1_tabulated_violations():
    table = {
        ((1,), (0,), 0): 1.0,
        ((1,), (0,), 1): 2.0,  # increases in t
        ((1,), (1,), 0): 0.0,
        ((1,), (1,), 1): 0.0,
        ((0,), (0,), 0): 0.0,
        ((0,), (0,), 1): 0.0,
        ((1,), (0,), 2): 0.5,  # nonzero terminal entry
    }
    inst = make_instance(
        capacities=(1,),
        horizon=2,
        schedule=[[[0.5]], [[0.5]]],
        reward=GeneralTabulatedReward(table),
    )
    report = check_assumption1(inst)
    rules = {v.witness["rule"] for v in report.violations}
    assert "non-increasing in t" in rules
    assert "terminal reward nonzero" in rules


def test_ratio_worst_case_is_sharp():
    for epsilon in (0.5, 0.1):
        inst = build_worst_case_instance(epsilon)
        report = check_ratio(inst, myopic_policy(), 2.0)
        assert report.passed
        assert report.max_ratio == pytest.approx(2.0 - epsilon, abs=1e-12)
        assert report.initial_ratio == pytest.approx(2.0 - epsilon, abs=1e-12)
        assert report.slack == pytest.approx(epsilon, abs=1e-12)
        assert not report.zero_value_states


def test_ratio_single_step_is_one():
    rng = np.random.default_rng(3)
    inst = make_instance(
        capacities=(2, 1),
        horizon=1,
        schedule=rng.random((1, 3, 2)),
        reward=LinearReward((1.0, 0.5)),
    )
    report = check_ratio(inst, myopic_policy(), 2.0)
    assert report.max_ratio == pytest.approx(1.0, abs=1e-12)


def test_ratio_flags_zero_policy_value():
    # a mean-spirited fixed policy that never earns, while the optimum does
    inst = build_worst_case_instance(0.1)
    report = check_ratio(inst, stodep.FixedPolicy(1), 1000.0)
    # fixed(1) still earns at t=0 from (1,1), but at ((0,1),1) both are zero;
    # from ((1,0),0) the optimum earns 1 via activity 0 and fixed(1) earns 0.
    assert report.zero_value_states
    assert not report.passed


def test_tolerance_semantics():
    inst = random_submodular_instance(5)
    table = solve_clairvoyant(inst)
    # absurdly huge tolerance: nothing can be flagged
    assert check_vfm(inst, table, tol=1e6).passed
    # negative-gap worst case is still reported in worst_gap
    report = check_vfm(inst, table)
    assert report.worst_gap <= 1e-12
