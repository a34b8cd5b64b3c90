import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dickesim.dicke_states import dicke, ghz
from dickesim.protocols import (
    PSI_MINUS,
    PSI_PLUS,
    maximal_singlet_fraction,
    odt_report,
    pair_channel,
    pair_channel_report,
    pair_state,
    psi_plus_fraction,
    qss_run,
    telecloning_report,
    teleport_fidelity_max,
    werner,
)
from dickesim.states import QubitDensity, QubitPureState, apply_local, fidelity
from dickesim.witness import dephased


def test_pair_state_psi_plus_fractions():
    assert_allclose(psi_plus_fraction(pair_state(6)), 0.6, atol=1e-12)
    assert_allclose(psi_plus_fraction(pair_state(4)), 2.0 / 3.0, atol=1e-12)


def test_pair_channel_matches_pair_state():
    rho = pair_channel(dicke(6, 3), 0, 1)
    assert_allclose(rho.matrix, pair_state(6).matrix, atol=1e-12)
    # symmetry: any pair of a symmetric state gives the same channel
    other = pair_channel(dicke(6, 3), 2, 5)
    assert_allclose(other.matrix, rho.matrix, atol=1e-12)
    with pytest.raises(ValueError):
        pair_channel(dicke(6, 3), 3, 3)


def test_teleport_fidelity_conversion():
    assert_allclose(teleport_fidelity_max(1.0), 1.0, atol=1e-12)
    assert_allclose(teleport_fidelity_max(0.25), 0.5, atol=1e-12)
    assert_allclose(teleport_fidelity_max(0.6), 11.0 / 15.0, atol=1e-12)


def test_singlet_fraction_of_singlet_is_one():
    amps = PSI_MINUS.amplitudes
    rho = QubitDensity(2, np.outer(amps, amps.conj()))
    result = maximal_singlet_fraction(rho, restarts=8, seed=0)
    assert_allclose(result.value, 1.0, atol=1e-8)
    assert result.converged


def test_singlet_fraction_of_maximally_mixed():
    rho = QubitDensity(2, np.eye(4) / 4.0)
    result = maximal_singlet_fraction(rho, restarts=8, seed=0)
    assert_allclose(result.value, 0.25, atol=1e-8)


def test_singlet_fraction_of_product_state():
    # best local rotation aligns a product state with half the singlet
    rho = QubitDensity(2, np.diag([1.0, 0.0, 0.0, 0.0]))
    result = maximal_singlet_fraction(rho, restarts=16, seed=1)
    assert_allclose(result.value, 0.5, atol=1e-7)


def test_singlet_fraction_of_shared_pairs():
    result = maximal_singlet_fraction(pair_state(6), restarts=16, seed=0)
    assert_allclose(result.value, 0.6, atol=1e-7)
    result4 = maximal_singlet_fraction(pair_state(4), restarts=16, seed=0)
    assert_allclose(result4.value, 2.0 / 3.0, atol=1e-7)


def test_singlet_fraction_is_local_unitary_invariant():
    rng = np.random.default_rng(9)

    def haar_unitary():
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    base = pair_state(6)
    rotated = apply_local(base, [haar_unitary(), haar_unitary()])
    a = maximal_singlet_fraction(base, restarts=16, seed=0).value
    b = maximal_singlet_fraction(rotated, restarts=16, seed=0).value
    assert_allclose(a, b, atol=1e-6)


def test_pair_channel_report_keys():
    report = pair_channel_report(6, restarts=8, seed=0)
    assert_allclose(report["psi_plus_fraction"], 0.6, atol=1e-12)
    assert_allclose(report["max_singlet_fraction"], 0.6, atol=1e-6)
    assert_allclose(report["teleport_fidelity"], 11.0 / 15.0, atol=1e-6)


def test_telecloning_report_six_qubit_ideal():
    report = telecloning_report(dicke(6, 3), restarts=8, seed=0)
    assert report.num_qubits == 6
    assert report.symmetric
    assert len(report.pair_fidelity) == 15
    for value in report.pair_fidelity.values():
        assert_allclose(value, 11.0 / 15.0, atol=1e-6)
    assert_allclose(report.ideal_threshold, 11.0 / 15.0, atol=1e-12)
    assert_allclose(report.classical_threshold, 2.0 / 3.0, atol=1e-12)
    assert report.all_above_classical


def test_telecloning_report_four_qubit_beats_threshold():
    report = telecloning_report(dicke(4, 2), restarts=8, seed=0)
    assert len(report.pair_fidelity) == 6
    for value in report.pair_fidelity.values():
        assert_allclose(value, 7.0 / 9.0, atol=1e-6)
    assert report.all_above_classical


def test_odt_ideal_six_qubits():
    result = odt_report(dicke(6, 3))
    assert result.keep == (0, 1)
    assert len(result.patterns) == 16
    assert len(result.balanced()) == 6
    assert_allclose(result.p_success, 0.6, atol=1e-12)
    assert_allclose(result.mean_heralded_fidelity, 1.0, atol=1e-12)
    assert_allclose(result.channel_consistency, 0.6, atol=1e-12)


def test_odt_ideal_four_qubits():
    result = odt_report(dicke(4, 2))
    assert len(result.patterns) == 4
    assert_allclose(result.p_success, 2.0 / 3.0, atol=1e-12)
    assert_allclose(result.mean_heralded_fidelity, 1.0, atol=1e-12)


def test_odt_consistency_equals_direct_pair_fraction():
    for state in (dicke(6, 3), dephased(dicke(6, 3))):
        result = odt_report(state)
        direct = psi_plus_fraction(pair_channel(state, 0, 1))
        assert_allclose(result.channel_consistency, direct, atol=1e-10)


def test_odt_dephased_heralds_classical_mixture():
    result = odt_report(dephased(dicke(6, 3)))
    assert_allclose(result.p_success, 0.6, atol=1e-12)
    assert_allclose(result.mean_heralded_fidelity, 0.5, atol=1e-12)


def test_odt_impossible_patterns_get_zero_fidelity():
    # four V detections would need four excitations; only three exist
    result = odt_report(dicke(6, 3))
    all_v = [p for p in result.patterns if p.outcomes == "VVVV"]
    assert len(all_v) == 1
    assert_allclose(all_v[0].prob, 0.0, atol=1e-12)
    assert all_v[0].fidelity == 0.0


def test_odt_other_kept_pairs():
    result = odt_report(dicke(6, 3), keep=(2, 4))
    assert result.keep == (2, 4)
    assert_allclose(result.p_success, 0.6, atol=1e-12)
    assert_allclose(result.mean_heralded_fidelity, 1.0, atol=1e-12)


def test_qss_noiseless_run_has_no_errors():
    run = qss_run(dicke(6, 3), 10000, seed=0)
    assert run.rounds == 10000
    assert run.errors == 0
    assert run.qber == 0.0
    assert_allclose(run.expected_sift_rate, 2.0**-5, atol=1e-12)
    p = run.expected_sift_rate
    sigma = math.sqrt(p * (1 - p) / run.rounds)
    assert abs(run.sift_rate - p) <= 3 * sigma
    # rounds survive sifting only when every party chose the same
    # equatorial basis, so exactly two basis labels can appear
    assert set(run.per_basis) <= {"x", "y"}


def test_qss_werner_noise_raises_qber():
    noisy = werner(6, 0.5, base=dicke(6, 3))
    run = qss_run(noisy, 40000, seed=1)
    expected = (1.0 - 0.5) / 2.0
    sigma = math.sqrt(expected * (1 - expected) / run.sifted_bits)
    assert abs(run.qber - expected) <= 3 * sigma


def test_werner_limits():
    base = dicke(6, 3)
    pure = werner(6, 1.0, base=base)
    assert_allclose(fidelity(pure, base), 1.0, atol=1e-12)
    flat = werner(6, 0.0, base=base)
    assert_allclose(flat.matrix, np.eye(64) / 64.0, atol=1e-12)
    default_base = werner(4, 1.0)
    assert_allclose(fidelity(default_base, ghz(4)), 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        werner(4, 1.5)
