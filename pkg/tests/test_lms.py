from collections import Counter

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dickesim.dicke_states import dicke, ghz
from dickesim.lms import (
    CountTable,
    CoverageError,
    check_plan_covers,
    decompose,
    fidelity_from_counts,
    plan_settings,
    reference_lms_table,
    support_mask,
)
from dickesim.states import (
    MeasurementSetting,
    QubitDensity,
    QubitPureState,
    outcome_distribution,
)

# greedy setting counts are deterministic; frozen after exhaustive runs
GREEDY_COUNTS = {
    "dicke_6_3": 207,
    "dicke_4_2": 21,
    "dicke_4_1": 23,
    "ghz_4": 9,
}


def exact_counts(state, plan, events=1e6):
    table = CountTable()
    for assignment in plan.assignments:
        probs = outcome_distribution(state, assignment.setting)
        table[assignment.setting.label()] = probs * events
    return table


def test_projector_decomposition_size_and_weights():
    decomp = decompose(dicke(6, 3))
    assert len(decomp) == 544
    assert_allclose(decomp.identity_coefficient, 1.0 / 64.0, atol=1e-12)
    weights = Counter(
        sum(1 for c in s if c != "I") for s in decomp.nonidentity_strings()
    )
    assert weights == {2: 45, 4: 315, 6: 183}


def test_decomposition_reconstructs_projector():
    psi = dicke(4, 2)
    decomp = decompose(psi)
    projector = np.outer(psi.amplitudes, psi.amplitudes.conj())
    assert_allclose(decomp.reconstruct(), projector, atol=1e-12)


def test_known_coefficient_value():
    # <ZZIIII> on the half-excited state is -0.2, scaled by 1/2^6
    decomp = decompose(dicke(6, 3))
    assert_allclose(decomp.coefficient("ZZIIII"), -0.2 / 64.0, atol=1e-12)


def test_decompose_rejects_large_registers():
    amps = np.zeros(2**9)
    amps[0] = 1.0
    with pytest.raises(ValueError):
        decompose(QubitPureState(9, amps))


def test_support_mask_marks_nonidentity_positions():
    # qubit 0 = MSB, so position 1 maps to bit 2 of a 4-bit mask
    assert support_mask("IXZI", 4) == 0b0110
    assert support_mask("XIII", 4) == 0b1000


def test_greedy_counts_are_frozen():
    targets = {
        "dicke_6_3": dicke(6, 3),
        "dicke_4_2": dicke(4, 2),
        "dicke_4_1": dicke(4, 1),
        "ghz_4": ghz(4),
    }
    for name, state in targets.items():
        plan = plan_settings(decompose(state))
        assert plan.num_settings == GREEDY_COUNTS[name], name


def test_greedy_plan_partitions_all_strings():
    decomp = decompose(dicke(4, 2))
    plan = plan_settings(decomp)
    check_plan_covers(plan, decomp)
    covered = [s for a in plan.assignments for s in a.covered]
    assert sorted(covered) == sorted(decomp.nonidentity_strings())


def test_greedy_assignments_are_sound():
    # every covered string must agree letter-by-letter with its setting's axes
    decomp = decompose(dicke(4, 2))
    plan = plan_settings(decomp)
    for assignment in plan.assignments:
        axes = assignment.setting.label().split(",")
        for string in assignment.covered:
            for letter, axis in zip(string, axes):
                if letter != "I":
                    assert letter.lower() == axis


def test_greedy_plan_is_deterministic():
    decomp = decompose(dicke(4, 2))
    labels_a = [a.setting.label() for a in plan_settings(decomp).assignments]
    labels_b = [a.setting.label() for a in plan_settings(decomp).assignments]
    assert labels_a == labels_b


def test_greedy_never_exceeds_distinct_support_patterns():
    for state in (dicke(4, 2), dicke(6, 3)):
        decomp = decompose(state)
        plan = plan_settings(decomp)
        assert plan.num_settings <= len(set(decomp.nonidentity_strings()))


def test_ghz_special_plan_has_five_settings():
    decomp = decompose(ghz(4))
    plan = plan_settings(decomp, strategy="ghz_special")
    assert plan.num_settings == 5
    check_plan_covers(plan, decomp)
    labels = [a.setting.label() for a in plan.assignments]
    assert "z,z,z,z" in labels
    assert sum(1 for lab in labels if "xy:" in lab) == 4


def test_ghz_special_rejects_other_targets():
    with pytest.raises(ValueError):
        plan_settings(decompose(dicke(4, 2)), strategy="ghz_special")
    with pytest.raises(ValueError):
        plan_settings(decompose(dicke(4, 2)), strategy="magic")


def test_check_plan_covers_flags_missing_strings():
    decomp = decompose(dicke(4, 2))
    plan = plan_settings(decompose(ghz(4)), strategy="ghz_special")
    with pytest.raises(CoverageError):
        check_plan_covers(plan, decomp)


def test_estimator_recovers_unit_fidelity_from_exact_counts():
    for state in (dicke(4, 2), dicke(6, 3)):
        decomp = decompose(state)
        plan = plan_settings(decomp)
        est = fidelity_from_counts(decomp, plan, exact_counts(state, plan))
        assert_allclose(est.value, 1.0, atol=1e-9)
        assert len(est.per_setting) == plan.num_settings


def test_estimator_on_ghz_special_plan_has_zero_variance():
    # all covered correlators are +-1 on the target, so no shot noise at all
    state = ghz(4)
    decomp = decompose(state)
    plan = plan_settings(decomp, strategy="ghz_special")
    est = fidelity_from_counts(decomp, plan, exact_counts(state, plan))
    assert_allclose(est.value, 1.0, atol=1e-12)
    assert est.std_error <= 1e-9


def test_estimator_on_maximally_mixed_state():
    decomp = decompose(dicke(4, 2))
    plan = plan_settings(decomp)
    mixed = QubitDensity(4, np.eye(16) / 16.0)
    est = fidelity_from_counts(decomp, plan, exact_counts(mixed, plan))
    assert_allclose(est.value, 1.0 / 16.0, atol=1e-9)


def test_estimator_input_validation():
    decomp = decompose(dicke(4, 2))
    plan = plan_settings(decomp)
    with pytest.raises(ValueError, match="missing counts"):
        fidelity_from_counts(decomp, plan, CountTable())
    short = {a.setting.label(): np.ones(8) for a in plan.assignments}
    with pytest.raises(ValueError, match="outcome counts"):
        fidelity_from_counts(decomp, plan, short)
    negative = exact_counts(dicke(4, 2), plan)
    negative[plan.assignments[0].setting.label()] = -np.ones(16)
    with pytest.raises(ValueError, match="negative"):
        fidelity_from_counts(decomp, plan, negative)


def test_reference_table_values():
    assert reference_lms_table() == {
        "dicke_6_3": 21,
        "dicke_4_2": 9,
        "dicke_4_1": 7,
        "ghz_4": 5,
    }
