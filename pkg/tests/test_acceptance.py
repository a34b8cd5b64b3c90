"""End-to-end acceptance checks.

Run with ``pytest tests/test_acceptance.py -v`` to get one verdict line
per check; each test also prints the measured numbers it signed off on.
"""

import json
import math
import time

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dickesim.cli import main as cli_main
from dickesim.dicke_states import dicke, ghz, recursion_residual
from dickesim.fock import LossConfig, SpdcConfig, calibrate, pick_calibration, simulate_experiment
from dickesim.lms import (
    decompose,
    fidelity_from_counts,
    plan_settings,
    reference_lms_table,
)
from dickesim.protocols import (
    maximal_singlet_fraction,
    odt_report,
    pair_channel,
    qss_run,
    teleport_fidelity_max,
    werner,
)
from dickesim.sampling import ExperimentPlan, histograms_to_table, run_plan
from dickesim.states import QubitDensity, fidelity
from dickesim.witness import (
    SeeSawOptions,
    biseparable_bound,
    correlator_scan,
    witness_operator,
    witness_value,
)


def test_dicke_construction_support_and_recursion():
    start = time.perf_counter()
    psi = dicke(6, 3)
    amps = psi.amplitudes
    hot = np.flatnonzero(np.abs(amps) > 1e-14)
    assert len(hot) == 20
    assert_allclose(amps[hot], np.full(20, 1.0 / math.sqrt(20)), atol=1e-12)
    worst = 0.0
    for n in range(2, 9):
        for k in range(1, n):
            worst = max(worst, recursion_residual(n, k))
    assert worst <= 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(
        f"PASS: 20 equal amplitudes, max recursion residual {worst:.2e}, "
        f"{elapsed:.3f} s"
    )


def test_witness_ideal_values_match_operator_traces():
    cases = [(6, 3, 12.0), (5, 2, 8.5), (4, 2, 6.0), (4, 1, 5.0)]
    for n, k, expected in cases:
        psi = dicke(n, k)
        value = witness_value(psi, 0.0)
        assert_allclose(value, expected, atol=1e-9)
        op = witness_operator(n, 0.0)
        brute = np.vdot(psi.amplitudes, op @ psi.amplitudes).real
        assert_allclose(value, brute, atol=1e-9)
    # the quadratic weight cannot shift a half-filled state's value
    for alpha in (-3.0, 1.0):
        assert_allclose(witness_value(dicke(6, 3), alpha), 12.0, atol=1e-9)
    print("PASS: ideal witness values 12 / 8.5 / 6 / 5, traces agree to 1e-9")


def test_biseparable_bounds_match_published_numbers():
    published = {4: 5.23, 5: 7.87, 6: 11.02}
    start = time.perf_counter()
    bounds = {}
    for n, target in published.items():
        est = biseparable_bound(n, 0.0, SeeSawOptions(restarts=50, seed=0))
        bounds[n] = est.value
        assert abs(est.value - target) <= 0.02, (n, est.value)
    squeezed = biseparable_bound(6, -3.0, SeeSawOptions(restarts=50, seed=0))
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    gap_squeezed = 12.0 - squeezed.value
    gap_plain = 12.0 - bounds[6]
    assert gap_squeezed > gap_plain > 0.0
    print(
        "PASS: bounds "
        + ", ".join(f"N={n}: {v:.6f}" for n, v in sorted(bounds.items()))
        + f"; squeezed-weight gap {gap_squeezed:.4f} > {gap_plain:.4f} > 0; "
        + f"{elapsed:.1f} s"
    )


def test_correlator_scan_closed_form_and_endpoints():
    thetas = np.linspace(0.0, math.pi / 2, 100)
    values = correlator_scan(dicke(6, 3), "xz", thetas)
    closed = (3.0 * np.cos(2.0 * thetas) + 5.0 * np.cos(6.0 * thetas)) / 8.0
    deviation = float(np.abs(values - closed).max())
    assert deviation <= 1e-10
    assert_allclose(values[0], 1.0, atol=1e-10)
    assert_allclose(values[-1], -1.0, atol=1e-10)
    print(
        f"PASS: 100-point scan matches the closed form to {deviation:.2e}, "
        "endpoints +1 / -1"
    )


def test_source_simulation_exact_limit_and_calibration(
    noisy_simulation, calibration_record
):
    exact = simulate_experiment(SpdcConfig(lam=0.6, max_order=3), LossConfig())
    assert abs(exact.fidelity_vs_d63 - 1.0) <= 1e-12
    assert abs(exact.p_exact - 5.0 / 324.0) <= 1e-12
    records = calibrate([0.65, 0.75, 0.85], [0.30], max_order=4)
    fids = [rec["fidelity"] for rec in records]
    assert all(a > b for a, b in zip(fids, fids[1:]))  # monotone in pumping
    picked = pick_calibration(records, target_fidelity=0.61)
    assert 0.56 <= picked["fidelity"] <= 0.66
    assert_allclose(
        noisy_simulation.fidelity_vs_d63, calibration_record["fidelity"], atol=1e-9
    )
    print(
        f"PASS: lossless pipeline exact (p = 5/324, fidelity 1); sweep fidelities "
        + ", ".join(f"{f:.4f}" for f in fids)
        + f"; operating point {picked['fidelity']:.4f} in [0.56, 0.66]"
    )


def test_projector_decomposition_and_setting_plans():
    start = time.perf_counter()
    decomp = decompose(dicke(6, 3))
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    assert len(decomp) == 544
    ghz_plan = plan_settings(decompose(ghz(4)), strategy="ghz_special")
    assert ghz_plan.num_settings == 5
    plan = plan_settings(decomp)
    target = reference_lms_table()["dicke_6_3"]
    print(
        f"544 terms in {elapsed:.2f} s; GHZ special plan 5 settings; greedy "
        f"plan {plan.num_settings} settings against the {target}-setting target"
    )
    # Exact-match grouping (a string joins a setting only when every
    # non-identity letter equals that qubit's axis) admits no plan below
    # 183 settings here: 183 of the strings have no identity letter, and
    # each is compatible with exactly one axis assignment.  The published
    # hand-built count uses a different grouping principle, so this cap
    # is not reachable and the check records that honestly.
    assert plan.num_settings <= 30, (
        f"greedy needs {plan.num_settings} settings; any exact-match plan "
        f"needs >= 183 because the 183 full-support strings each pin a "
        f"distinct setting, so the <= 30 cap cannot be met"
    )
    print("PASS: greedy plan within the setting cap")


def test_pair_protocols_figures_of_merit():
    # two qubits of the six-qubit state: 0.6 Bell + 0.4 classical mixture
    psi_plus = np.zeros(4)
    psi_plus[1] = psi_plus[2] = 1.0 / math.sqrt(2)
    mixture = (
        0.6 * np.outer(psi_plus, psi_plus)
        + 0.2 * np.diag([1.0, 0.0, 0.0, 0.0])
        + 0.2 * np.diag([0.0, 0.0, 0.0, 1.0])
    )
    pair = pair_channel(dicke(6, 3), 0, 1)
    assert_allclose(pair.matrix, mixture, atol=1e-12)
    msf = maximal_singlet_fraction(pair, restarts=32, seed=0)
    assert abs(msf.value - 0.6) <= 1e-6
    assert_allclose(teleport_fidelity_max(msf.value), 11.0 / 15.0, atol=1e-6)
    odt = odt_report(dicke(6, 3))
    assert_allclose(odt.p_success, 0.6, atol=1e-12)
    assert_allclose(odt.mean_heralded_fidelity, 1.0, atol=1e-12)
    pair4 = pair_channel(dicke(4, 2), 0, 1)
    msf4 = maximal_singlet_fraction(pair4, restarts=32, seed=0)
    assert abs(msf4.value - 2.0 / 3.0) <= 1e-6
    odt4 = odt_report(dicke(4, 2))
    assert_allclose(odt4.p_success, 2.0 / 3.0, atol=1e-12)
    print(
        f"PASS: pair mixture exact, msf {msf.value:.7f}, teleport max "
        f"{teleport_fidelity_max(msf.value):.6f} = 11/15, heralding 0.6 -> "
        f"fidelity 1; four-qubit analogues at 2/3"
    )


def test_secret_sharing_error_rates():
    clean = qss_run(dicke(6, 3), 10000, seed=0)
    assert clean.errors == 0
    assert clean.qber == 0.0
    noisy_state = werner(6, 0.5, base=dicke(6, 3))
    noisy = qss_run(noisy_state, 10000, seed=0)
    expected_qber = 0.25
    sigma_qber = math.sqrt(expected_qber * (1 - expected_qber) / noisy.sifted_bits)
    assert abs(noisy.qber - expected_qber) <= 3 * sigma_qber
    for run in (clean, noisy):
        rate = 2.0 ** (1 - 6)
        sigma = math.sqrt(rate * (1 - rate) / run.rounds)
        assert abs(run.sift_rate - rate) <= 3 * sigma
    print(
        f"PASS: clean QBER 0 over 10k rounds; Werner(0.5) QBER "
        f"{noisy.qber:.4f} vs 0.25 within 3 sigma; sift rates near 1/32"
    )


def test_end_to_end_fidelity_estimator(rho_sim):
    target = dicke(4, 2)
    decomp = decompose(target)
    plan = plan_settings(decomp)
    experiment = ExperimentPlan(
        settings=tuple(plan.settings()), events_per_setting=100000, seed=7
    )
    histograms = run_plan(target, experiment)
    est = fidelity_from_counts(decomp, plan, histograms_to_table(histograms))
    assert abs(est.value - 1.0) <= 0.01
    assert est.std_error <= 0.01

    target6 = dicke(6, 3)
    decomp6 = decompose(target6)
    plan6 = plan_settings(decomp6)
    experiment6 = ExperimentPlan(
        settings=tuple(plan6.settings()), events_per_setting=100000, seed=7
    )
    histograms6 = run_plan(rho_sim, experiment6)
    est6 = fidelity_from_counts(decomp6, plan6, histograms_to_table(histograms6))
    direct = fidelity(rho_sim, target6)
    assert abs(est6.value - direct) <= 2 * est6.std_error
    print(
        f"PASS: ideal four-qubit estimate {est.value:.4f} +- {est.std_error:.4f}; "
        f"simulated-source estimate {est6.value:.4f} +- {est6.std_error:.4f} vs "
        f"direct {direct:.4f} ({abs(est6.value - direct) / est6.std_error:.2f} sigma)"
    )


def test_artifacts_are_deterministic(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"state": "dicke_4_2", "events": 20000}))
    scan_config = tmp_path / "scan.json"
    scan_config.write_text(json.dumps({"points": 40}))
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert cli_main(
            ["sample", "--config", str(config), "--seed", "11", "--out", str(out)]
        ) == 0
        assert cli_main(
            ["scan", "--config", str(scan_config), "--seed", "11", "--out", str(out)]
        ) == 0
    capsys.readouterr()
    compared = []
    for name in ("sample.json", "fig_histograms.csv", "scan.json",
                 "fig_correlator_scan.csv"):
        a = (outs[0] / name).read_bytes()
        b = (outs[1] / name).read_bytes()
        assert a == b, f"{name} differs between identical runs"
        compared.append(name)
    print(f"PASS: byte-identical artifacts {', '.join(compared)}")
