"""Batch command-line front end.

One verb per activity: state | simulate | witness | bound | scan | lms |
sample | protocols | qss | compare.  Every command reads an optional
JSON config (schema-validated, unknown keys rejected), writes a JSON
report embedding the config hash and package version, and emits
plot-ready CSV files where applicable.  Outputs are deterministic for
fixed seeds; floats are printed with 12 significant digits.

Exit codes: 0 ok, 2 config error, 3 numerical failure.

Heavy numerical imports happen after argument parsing so that --threads
can cap the linear-algebra thread pools via environment variables.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_REQUIRED = object()


class ConfigError(Exception):
    """Invalid configuration; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Schema validation


def _number(lo=None, hi=None, hi_exclusive=False):
    def check(value, path):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        v = float(value)
        if lo is not None and v < lo:
            raise ConfigError(f"{path}: {v} is below the minimum {lo}")
        if hi is not None and (v >= hi if hi_exclusive else v > hi):
            bound = f"< {hi}" if hi_exclusive else f"<= {hi}"
            raise ConfigError(f"{path}: {v} violates {bound}")
        return v

    return check


def _integer(lo=None, hi=None):
    def check(value, path):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        if lo is not None and value < lo:
            raise ConfigError(f"{path}: {value} is below the minimum {lo}")
        if hi is not None and value > hi:
            raise ConfigError(f"{path}: {value} is above the maximum {hi}")
        return int(value)

    return check


def _string(choices=None):
    def check(value, path):
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        if choices is not None and value not in choices:
            raise ConfigError(
                f"{path}: {value!r} is not one of {sorted(choices)}"
            )
        return value

    return check


def _boolean():
    def check(value, path):
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value

    return check


def _list_of(item_check):
    def check(value, path):
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{path}: expected a nonempty list")
        return [item_check(v, f"{path}[{k}]") for k, v in enumerate(value)]

    return check


def _nested(schema):
    def check(value, path):
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected an object")
        return validate(value, schema, path)

    return check


def _navigation_step(value, path):
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object with qubit and outcome")
    step = validate(
        value,
        {"qubit": (_integer(0, 9), _REQUIRED), "outcome": (_string({"H", "V", "+", "-"}), _REQUIRED)},
        path,
    )
    return step


def validate(config, schema, path="config") -> dict:
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    unknown = sorted(set(config) - set(schema))
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {unknown}; allowed: {sorted(schema)}")
    out = {}
    for key, (check, default) in schema.items():
        if key in config:
            out[key] = check(config[key], f"{path}.{key}")
        elif default is _REQUIRED:
            raise ConfigError(f"{path}: missing required key {key!r}")
        else:
            out[key] = default
    return out


SIMULATE_SCHEMA = {
    "lambda": (_number(0.0, 1.0, hi_exclusive=True), 0.65),
    "max_order": (_integer(1, 7), 4),
    "eta_H": (_number(0.0, 1.0), 1.0),
    "eta_V": (_number(0.0, 1.0), 1.0),
    # pulsed-pump repetition rate in Hz, only used to turn the per-pulse
    # event probability into a rate figure for comparison reports
    "rep_rate": (_number(0.0, 1e12), 8.0e7),
}

SCHEMAS = {
    "state": {
        "state": (_string(), "dicke_6_3"),
        "navigate": (_list_of(_navigation_step), None),
    },
    "simulate": SIMULATE_SCHEMA,
    "witness": {
        "state": (_string(), "dicke_6_3"),
        "alpha": (_number(), 0.0),
    },
    "bound": {
        "num_qubits": (_integer(2, 7), 6),
        "alpha": (_number(), 0.0),
        "alphas": (_list_of(_number()), None),
        "restarts": (_integer(1, 500), 50),
        "state": (_string(), None),
    },
    "scan": {
        "state": (_string(), "dicke_6_3"),
        "plane": (_string({"xz", "yz"}), "xz"),
        "points": (_integer(2, 100000), 100),
        "dephased": (_boolean(), False),
    },
    "lms": {
        "state": (_string(), "dicke_6_3"),
        "strategy": (_string({"greedy", "ghz_special"}), "greedy"),
    },
    "sample": {
        "state": (_string(), "dicke_4_2"),
        "simulate": (_nested(SIMULATE_SCHEMA), None),
        "target": (_string(), None),
        "strategy": (_string({"greedy", "ghz_special"}), "greedy"),
        "events": (_integer(1, 10**9), 100000),
    },
    "protocols": {
        "num_qubits": (_integer(4, 8), 6),
        "restarts": (_integer(1, 500), 32),
        "simulate": (_nested(SIMULATE_SCHEMA), None),
    },
    "qss": {
        "state": (_string(), "dicke_6_3"),
        "rounds": (_integer(1, 10**8), 10000),
        "visibility": (_number(0.0, 1.0), None),
    },
    "compare": {
        "reports": (_list_of(_string()), None),
    },
}


# ---------------------------------------------------------------------------
# Report plumbing


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def _round_floats(obj):
    """Canonicalize a report tree: floats to 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _round_floats(obj.item())
    raise TypeError(f"cannot serialize {type(obj)!r}")


def config_digest(config: dict) -> str:
    canonical = json.dumps(_round_floats(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_report(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(_round_floats(payload), fh, sort_keys=True, indent=1)
        fh.write("\n")


def _write_csv(path: str, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [_fmt(v) if isinstance(v, float) else v for v in row]
            )


def emit_plotdata(report: dict, out_dir: str) -> list[str]:
    """Write plot-ready CSV files for a command's report.

    Returns the written paths; raises ValueError on an empty report.
    """
    if not report or not report.get("results"):
        raise ValueError("empty report: nothing to plot")
    command = report.get("command")
    results = report["results"]
    written = []

    def path_for(name):
        target = os.path.join(out_dir, name)
        written.append(target)
        return target

    if command == "bound" and results.get("curve"):
        rows = results["curve"]
        with_state = all("state_value" in r for r in rows)
        header = ["alpha", "biseparable_bound"] + (["state_value"] if with_state else [])
        _write_csv(
            path_for("fig_bound_curve.csv"),
            header,
            [
                [r["alpha"], r["bound"]] + ([r["state_value"]] if with_state else [])
                for r in rows
            ],
        )
    elif command == "scan":
        rows = results["rows"]
        with_closed = all("closed_form" in r for r in rows)
        header = ["theta", "correlator"] + (["closed_form"] if with_closed else [])
        _write_csv(
            path_for("fig_correlator_scan.csv"),
            header,
            [
                [r["theta"], r["correlator"]]
                + ([r["closed_form"]] if with_closed else [])
                for r in rows
            ],
        )
    elif command == "protocols" and results.get("pair_fidelity_rows"):
        teleport = results["teleport"]
        _write_csv(
            path_for("fig_pair_teleport_fidelity.csv"),
            ["first_qubit", "second_qubit", "f_max", "ideal_value", "classical_threshold"],
            [
                [r["first"], r["second"], r["f_max"], teleport["ideal"], teleport["classical"]]
                for r in results["pair_fidelity_rows"]
            ],
        )
    elif command == "sample" and results.get("histograms"):
        rows = []
        for hist in results["histograms"]:
            width = results["num_qubits"]
            for index, count in enumerate(hist["counts"]):
                rows.append([hist["setting"], format(index, f"0{width}b"), count])
        _write_csv(path_for("fig_histograms.csv"), ["setting", "outcome", "count"], rows)
    return written


@dataclass(frozen=True)
class Context:
    seed: int
    out_dir: str


def _parse_state_label(label: str, path: str = "config.state"):
    from .dicke_states import dicke, ghz, w_state

    parts = label.split("_")
    try:
        if parts[0] == "dicke" and len(parts) == 3:
            return dicke(int(parts[1]), int(parts[2]))
        if parts[0] == "ghz" and len(parts) == 2:
            return ghz(int(parts[1]))
        if parts[0] == "w" and len(parts) == 2:
            return w_state(int(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(
        f"{path}: unknown state label {label!r}; use dicke_N_M, ghz_N, or w_N"
    )


# ---------------------------------------------------------------------------
# Command handlers: each returns a results dict


def cmd_state(config: dict, ctx: Context) -> dict:
    import numpy as np

    from .dicke_states import NavigationStep, navigate
    from .states import save_state

    state = _parse_state_label(config["state"])
    amps = np.abs(state.amplitudes)
    results = {
        "state": config["state"],
        "num_qubits": state.num_qubits,
        "support": int(np.count_nonzero(amps > 1e-12)),
        "max_amplitude": float(amps.max()),
    }
    final = state
    if config["navigate"]:
        steps = [NavigationStep(s["qubit"], s["outcome"]) for s in config["navigate"]]
        chain = []
        previous = 1.0
        for k in range(1, len(steps) + 1):
            _, p = navigate(state, steps[:k])
            chain.append(p / previous)
            previous = p
        final, total = navigate(state, steps)
        results["navigation"] = {
            "steps": [dict(s) for s in config["navigate"]],
            "probability": total,
            "per_step": chain,
            "final_num_qubits": final.num_qubits,
        }
    artifact = os.path.join(ctx.out_dir, "state_vector.json")
    save_state(final, artifact)
    results["state_file"] = os.path.basename(artifact)
    return results


def cmd_simulate(config: dict, ctx: Context) -> dict:
    from .fock import LossConfig, SpdcConfig, simulate_experiment
    from .states import save_state

    outcome = simulate_experiment(
        SpdcConfig(lam=config["lambda"], max_order=config["max_order"]),
        LossConfig(eta_h=config["eta_H"], eta_v=config["eta_V"]),
    )
    save_state(outcome.rho_sim, os.path.join(ctx.out_dir, "rho_sim.json"))
    results = outcome.report()
    results["rep_rate"] = config["rep_rate"]
    results["sixfold_rate_per_s"] = config["rep_rate"] * results["p_event"]
    results["rho_file"] = "rho_sim.json"
    return results


def cmd_witness(config: dict, ctx: Context) -> dict:
    from .witness import collective_spin_sq, witness_value

    state = _parse_state_label(config["state"])
    alpha = config["alpha"]
    return {
        "state": config["state"],
        "num_qubits": state.num_qubits,
        "alpha": alpha,
        "witness_value": witness_value(state, alpha),
        "jx_sq": collective_spin_sq(state, "x"),
        "jy_sq": collective_spin_sq(state, "y"),
        "jz_sq": collective_spin_sq(state, "z"),
    }


def cmd_bound(config: dict, ctx: Context) -> dict:
    from .witness import SeeSawOptions, biseparable_bound, witness_value

    n = config["num_qubits"]
    options = SeeSawOptions(restarts=config["restarts"], seed=ctx.seed)
    label = config["state"]
    if label is None and n % 2 == 0:
        label = f"dicke_{n}_{n // 2}"
    state = _parse_state_label(label) if label else None
    if state is not None and state.num_qubits != n:
        raise ConfigError(
            f"config.state: {label} has {state.num_qubits} qubits, expected {n}"
        )
    estimate = biseparable_bound(n, alpha=config["alpha"], options=options)
    results = {
        "num_qubits": n,
        "alpha": config["alpha"],
        "bound": estimate.value,
        "restarts": estimate.restarts,
        "converged": estimate.converged,
        "bipartition": list(estimate.bipartition),
        "per_bipartition": {
            "+".join(map(str, part)): value
            for part, value in estimate.per_bipartition.items()
        },
    }
    if state is not None:
        value = witness_value(state, config["alpha"])
        results["state_value"] = value
        results["gap"] = estimate.value - value
    if config["alphas"]:
        rows = []
        for alpha in config["alphas"]:
            est = biseparable_bound(n, alpha=alpha, options=options)
            row = {"alpha": alpha, "bound": est.value}
            if state is not None:
                row["state_value"] = witness_value(state, alpha)
            rows.append(row)
        results["curve"] = rows
    return results


def cmd_scan(config: dict, ctx: Context) -> dict:
    import numpy as np

    from .witness import correlator_scan, dephased

    state = _parse_state_label(config["state"])
    if config["dephased"]:
        source = dephased(state)
    else:
        source = state
    thetas = np.linspace(0.0, math.pi, config["points"])
    values = correlator_scan(source, config["plane"], thetas)
    rows = [
        {"theta": float(t), "correlator": float(v)} for t, v in zip(thetas, values)
    ]
    results = {
        "state": config["state"],
        "plane": config["plane"],
        "dephased": config["dephased"],
        "points": config["points"],
        "rows": rows,
    }
    if config["state"] == "dicke_6_3" and not config["dephased"]:
        closed = (3.0 * np.cos(2.0 * thetas) + 5.0 * np.cos(6.0 * thetas)) / 8.0
        for row, cf in zip(rows, closed):
            row["closed_form"] = float(cf)
        results["max_closed_form_deviation"] = float(np.abs(values - closed).max())
    return results


def cmd_lms(config: dict, ctx: Context) -> dict:
    from .lms import decompose, plan_settings, reference_lms_table

    target = _parse_state_label(config["state"])
    if target.num_qubits > 8:
        raise ConfigError("config.state: decomposition supports at most 8 qubits")
    decomp = decompose(target)
    plan = plan_settings(decomp, strategy=config["strategy"])
    return {
        "target": config["state"],
        "strategy": config["strategy"],
        "term_count": len(decomp),
        "identity_coefficient": decomp.identity_coefficient,
        "num_settings": plan.num_settings,
        "published_count": reference_lms_table().get(config["state"]),
        "settings": [a.setting.label() for a in plan.assignments],
        "strings_per_setting": [len(a.covered) for a in plan.assignments],
        "collective_strings": len(plan.collective_strings),
    }


def cmd_sample(config: dict, ctx: Context) -> dict:
    from .fock import LossConfig, SpdcConfig, simulate_experiment
    from .lms import decompose, fidelity_from_counts, plan_settings
    from .sampling import ExperimentPlan, histograms_to_table, run_plan
    from .states import fidelity

    if config["simulate"] is not None:
        sim = config["simulate"]
        outcome = simulate_experiment(
            SpdcConfig(lam=sim["lambda"], max_order=sim["max_order"]),
            LossConfig(eta_h=sim["eta_H"], eta_v=sim["eta_V"]),
        )
        source = outcome.rho_sim
        source_desc = {"simulate": sim}
        target_label = config["target"] or "dicke_6_3"
    else:
        source = _parse_state_label(config["state"])
        source_desc = {"state": config["state"]}
        target_label = config["target"] or config["state"]
    target = _parse_state_label(target_label, "config.target")
    if target.num_qubits != source.num_qubits:
        raise ConfigError(
            f"config.target: {target_label} has {target.num_qubits} qubits, "
            f"the source has {source.num_qubits}"
        )
    decomp = decompose(target)
    plan = plan_settings(decomp, strategy=config["strategy"])
    experiment = ExperimentPlan(
        settings=tuple(plan.settings()),
        events_per_setting=config["events"],
        seed=ctx.seed,
    )
    histograms = run_plan(source, experiment)
    estimate = fidelity_from_counts(decomp, plan, histograms_to_table(histograms))
    direct = fidelity(source, target)
    deviation = (
        abs(estimate.value - direct) / estimate.std_error
        if estimate.std_error > 0
        else None
    )
    return {
        "target": target_label,
        "source": source_desc,
        "num_qubits": target.num_qubits,
        "strategy": config["strategy"],
        "events_per_setting": config["events"],
        "num_settings": plan.num_settings,
        "estimate": estimate.value,
        "std_error": estimate.std_error,
        "direct_fidelity": direct,
        "deviation_sigma": deviation,
        "histograms": [
            {"setting": h.setting.label(), "counts": [int(c) for c in h.counts]}
            for h in histograms
        ],
    }


def cmd_protocols(config: dict, ctx: Context) -> dict:
    from .dicke_states import dicke
    from .protocols import (
        odt_report,
        pair_channel,
        psi_plus_fraction,
        telecloning_report,
    )

    n = config["num_qubits"]
    if n % 2:
        raise ConfigError("config.num_qubits: protocols need an even qubit count")
    if config["simulate"] is not None:
        from .fock import LossConfig, SpdcConfig, simulate_experiment

        sim = config["simulate"]
        if n != 6:
            raise ConfigError(
                "config.num_qubits: the source simulation emits six qubits"
            )
        state = simulate_experiment(
            SpdcConfig(lam=sim["lambda"], max_order=sim["max_order"]),
            LossConfig(eta_h=sim["eta_H"], eta_v=sim["eta_V"]),
        ).rho_sim
        source_desc = {"simulate": sim}
    else:
        state = dicke(n, n // 2)
        source_desc = {"state": f"dicke_{n}_{n // 2}"}
    telecloning = telecloning_report(state, restarts=config["restarts"], seed=ctx.seed)
    odt = odt_report(state)
    pair = pair_channel(state, 0, 1)
    rows = [
        {"first": i, "second": j, "f_max": value}
        for (i, j), value in sorted(telecloning.pair_fidelity.items())
    ]
    return {
        "num_qubits": n,
        "source": source_desc,
        "pair": {
            "psi_plus_fraction": psi_plus_fraction(pair),
        },
        "odt": {
            "p_success": odt.p_success,
            "mean_heralded_fidelity": odt.mean_heralded_fidelity,
            "channel_consistency": odt.channel_consistency,
            "num_patterns": len(odt.patterns),
        },
        "teleport": {
            "f_max": rows[0]["f_max"],
            "ideal": (2.0 * n - 1.0) / (3.0 * (n - 1.0)),
            "classical": telecloning.classical_threshold,
            "symmetric_pairs": telecloning.symmetric,
            "all_above_classical": telecloning.all_above_classical,
        },
        "pair_fidelity_rows": rows,
    }


def cmd_qss(config: dict, ctx: Context) -> dict:
    import math as _math

    from .protocols import qss_run, werner

    state = _parse_state_label(config["state"])
    reference = state
    if config["visibility"] is not None:
        source = werner(state.num_qubits, config["visibility"], base=state)
    else:
        source = state
    run = qss_run(source, config["rounds"], seed=ctx.seed, reference=reference)
    qber_error = (
        _math.sqrt(max(run.qber * (1.0 - run.qber), 0.0) / run.sifted_bits)
        if run.sifted_bits
        else None
    )
    return {
        "state": config["state"],
        "num_qubits": state.num_qubits,
        "visibility": config["visibility"],
        "rounds": run.rounds,
        "sifted_bits": run.sifted_bits,
        "sift_rate": run.sift_rate,
        "expected_sift_rate": run.expected_sift_rate,
        "qber": run.qber,
        "qber_error": qber_error,
        "qber_error_flagged": run.errors == 0,
        "errors": run.errors,
        "per_basis": run.per_basis,
    }


def _extract_computed(report: dict) -> dict:
    command = report.get("command")
    results = report.get("results", {})
    out = {}
    if command == "simulate":
        out["three_pair_selection_probability"] = results["p_exact"]
        out["simulated_state_fidelity"] = results["fidelity_vs_D63"]
        out["sixfold_rate_per_s"] = results["sixfold_rate_per_s"]
    elif command == "bound":
        out[f"biseparable_bound_n{results['num_qubits']}"] = results["bound"]
    elif command == "lms":
        out[f"lms_settings_{results['target']}"] = results["num_settings"]
    elif command == "sample":
        out[f"fidelity_{results['target']}"] = (
            results["estimate"],
            results["std_error"],
        )
    elif command == "protocols":
        out["odt_success_mean"] = results["odt"]["p_success"]
        out["heralded_pair_fidelity_mean"] = results["odt"]["mean_heralded_fidelity"]
    elif command == "qss":
        key = {4: "qber_four_party", 6: "qber_six_party"}.get(results["num_qubits"])
        if key is not None and results["qber_error"] is not None:
            out[key] = (results["qber"], results["qber_error"])
    return out


def cmd_compare(config: dict, ctx: Context) -> dict:
    from .references import compare_values

    default_names = [
        "simulate.json",
        "bound.json",
        "lms.json",
        "sample.json",
        "protocols.json",
        "qss.json",
    ]
    if config["reports"] is not None:
        paths = list(config["reports"])
        optional = False
    else:
        paths = [os.path.join(ctx.out_dir, name) for name in default_names]
        optional = True
    computed = {}
    used = []
    for path in paths:
        if not os.path.exists(path):
            if optional:
                continue
            raise ConfigError(f"config.reports: {path} does not exist")
        with open(path) as fh:
            try:
                report = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        extracted = _extract_computed(report)
        if extracted:
            used.append(os.path.basename(path))
            computed.update(extracted)
    rows = compare_values(computed)
    if not rows:
        raise ConfigError(
            "no comparable values found; run other subcommands into this "
            "output directory first or pass config.reports"
        )
    _write_csv(
        os.path.join(ctx.out_dir, "compare.csv"),
        [
            "key",
            "computed",
            "computed_error",
            "reference",
            "reference_error",
            "deviation",
            "sigma",
        ],
        [
            [
                r.key,
                r.computed,
                "" if r.computed_error is None else r.computed_error,
                r.reference,
                "" if r.reference_error is None else r.reference_error,
                r.deviation,
                "" if r.sigma is None else r.sigma,
            ]
            for r in rows
        ],
    )
    return {
        "sources": used,
        "rows": [asdict(r) for r in rows],
        "table_file": "compare.csv",
    }


HANDLERS = {
    "state": cmd_state,
    "simulate": cmd_simulate,
    "witness": cmd_witness,
    "bound": cmd_bound,
    "scan": cmd_scan,
    "lms": cmd_lms,
    "sample": cmd_sample,
    "protocols": cmd_protocols,
    "qss": cmd_qss,
    "compare": cmd_compare,
}

_HELP = {
    "state": "construct a named state, optionally navigating by measurements",
    "simulate": "run the down-conversion source model end to end",
    "witness": "evaluate the collective-spin witness on an ideal state",
    "bound": "optimize the biseparable bound (see-saw), optionally over a grid",
    "scan": "sweep the full-product correlator over a measurement plane",
    "lms": "decompose a projector and plan measurement settings",
    "sample": "sample counts and estimate fidelity from them",
    "protocols": "evaluate pair extraction, teleportation, and heralding",
    "qss": "simulate parity-based secret-sharing rounds",
    "compare": "tabulate computed values against the published references",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--seed", type=int, default=0, metavar="U64")
    common.add_argument("--out", default="out", metavar="DIR")
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        metavar="N",
        help="cap numerical thread pools (default: library defaults)",
    )
    parser = argparse.ArgumentParser(
        prog="dickesim",
        description="Batch computations for symmetric multiphoton states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        sub.add_parser(name, parents=[common], help=_HELP[name])
    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return raw


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be positive", file=sys.stderr)
            return EXIT_CONFIG
        for var in (
            "OMP_NUM_THREADS",
            "OPENBLAS_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ[var] = str(args.threads)
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must fit in 64 bits", file=sys.stderr)
        return EXIT_CONFIG
    try:
        raw = _load_config(args.config)
        config = validate(raw, SCHEMAS[args.command])
        os.makedirs(args.out, exist_ok=True)
        ctx = Context(seed=args.seed, out_dir=args.out)
        results = HANDLERS[args.command](config, ctx)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # numerical failures surface with context
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    from . import __version__

    report = {
        "command": args.command,
        "seed": args.seed,
        "config": config,
        "config_sha256": config_digest(config),
        "version": __version__,
        "results": results,
    }
    report_path = os.path.join(args.out, f"{args.command}.json")
    write_report(report_path, report)
    written = [report_path]
    try:
        written.extend(emit_plotdata(report, args.out))
    except ValueError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
