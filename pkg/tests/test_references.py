import math

from numpy.testing import assert_allclose

from dickesim.references import (
    REFERENCE_VALUES,
    compare_values,
    reference_table,
)


def test_table_keys_are_unique():
    keys = [entry.key for entry in REFERENCE_VALUES]
    assert len(keys) == len(set(keys))
    assert set(reference_table()) == set(keys)


def test_benchmark_constants():
    table = reference_table()
    assert table["biseparable_bound_n6"].value == 11.02
    assert table["biseparable_bound_n5"].value == 7.87
    assert table["biseparable_bound_n4"].value == 5.23
    assert table["fidelity_dicke_6_3"].value == 0.56
    assert table["fidelity_dicke_6_3"].uncertainty == 0.02
    assert table["qber_four_party"].value == 0.25
    assert table["qber_six_party"].value == 0.29
    assert table["lms_settings_dicke_6_3"].value == 21
    assert table["lms_settings_ghz_4"].value == 5
    assert_allclose(
        table["three_pair_selection_probability"].value, 5.0 / 324.0, atol=1e-15
    )


def test_compare_values_pairs_and_scalars():
    rows = compare_values(
        {
            "fidelity_dicke_6_3": (0.60, 0.01),
            "biseparable_bound_n6": 11.018,
            "not_a_reference_key": 1.0,
        }
    )
    assert [r.key for r in rows] == ["biseparable_bound_n6", "fidelity_dicke_6_3"]
    bound, fid = rows
    assert bound.computed_error is None
    assert bound.sigma is None  # no uncertainty on either side
    assert_allclose(bound.deviation, 11.018 - 11.02, atol=1e-12)
    assert fid.computed_error == 0.01
    combined = math.hypot(0.01, 0.02)
    assert_allclose(fid.sigma, (0.60 - 0.56) / combined, atol=1e-12)


def test_compare_values_empty_input():
    assert compare_values({}) == []
