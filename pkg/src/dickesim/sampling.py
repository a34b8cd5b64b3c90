"""Deterministic coincidence-count sampling.

Histograms emulate the experiment's count-level data: multinomial draws
from a state's outcome distribution (or from the optical threshold
model), with Poissonian uncertainties.  Randomness comes from numpy's
PCG64 generator seeded through SeedSequence((seed, setting_index)), so
identical inputs give byte-identical histograms on any platform.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .fock import FockKet, FockMixture, threshold_counts
from .lms import CountTable
from .states import (
    MeasurementSetting,
    QubitDensity,
    QubitPureState,
    outcome_distribution,
)

GENERATOR_NAME = "PCG64"


def stream_generator(seed: int, stream_index: int = 0) -> np.random.Generator:
    """Independent generator for one (seed, stream) pair."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((int(seed), int(stream_index))))
    )


@dataclass(frozen=True)
class CoincidenceHistogram:
    setting: MeasurementSetting
    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.min() < 0:
            raise ValueError("counts must be a nonnegative vector")
        if int(counts.sum()) != self.total:
            raise ValueError("total does not match the counts")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            raise ValueError("histogram holds no events")
        return self.counts / self.total


@dataclass(frozen=True)
class ExperimentPlan:
    settings: tuple
    events_per_setting: int
    seed: int = 0

    def __post_init__(self):
        settings = tuple(self.settings)
        if not settings:
            raise ValueError("plan needs at least one setting")
        if self.events_per_setting < 1:
            raise ValueError("events per setting must be positive")
        object.__setattr__(self, "settings", settings)

    def to_json(self) -> dict:
        return {
            "settings": [s.label() for s in self.settings],
            "events": self.events_per_setting,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentPlan":
        return cls(
            settings=tuple(
                MeasurementSetting.from_label(text) for text in data["settings"]
            ),
            events_per_setting=int(data["events"]),
            seed=int(data.get("seed", 0)),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ExperimentPlan":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def outcome_probabilities(source, setting: MeasurementSetting) -> np.ndarray:
    """Outcome distribution for either a qubit state or an optical state.

    Optical sources go through the threshold-detector model and return
    the distribution conditioned on a valid sixfold event.
    """
    if isinstance(source, (QubitPureState, QubitDensity)):
        return outcome_distribution(source, setting)
    if isinstance(source, (FockKet, FockMixture)):
        probs, p_event = threshold_counts(source, setting)
        if p_event <= 0.0:
            raise ValueError("the optical source produces no valid events")
        return probs
    raise TypeError(f"cannot sample from {type(source)!r}")


def sample(
    source, setting: MeasurementSetting, n_events: int, seed: int, stream_index: int = 0
) -> CoincidenceHistogram:
    """Multinomial histogram of ``n_events`` draws from one setting."""
    if n_events < 1:
        raise ValueError("n_events must be positive")
    probs = outcome_probabilities(source, setting)
    counts = stream_generator(seed, stream_index).multinomial(int(n_events), probs)
    return CoincidenceHistogram(setting, counts.astype(np.int64), int(n_events))


def poisson_error(count) -> tuple[float, bool]:
    """Counting-statistics uncertainty sqrt(count).

    Zero counts cannot certify zero rate, so they report an uncertainty
    of 1 with the flag set.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return 1.0, True
    return math.sqrt(count), False


def run_plan(source, plan: ExperimentPlan) -> list[CoincidenceHistogram]:
    """One histogram per plan setting, with per-setting random streams."""
    return [
        sample(source, setting, plan.events_per_setting, plan.seed, stream_index=k)
        for k, setting in enumerate(plan.settings)
    ]


def histograms_to_table(histograms) -> CountTable:
    return CountTable.from_histograms(histograms)


def write_csv(histograms, path) -> None:
    """Serialize histograms as rows (setting id, outcome bitstring, count).

    All 2^N outcomes are written in index order; bit 0 of the bitstring
    is the first qubit's outcome (0 = +1 eigenvector).
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["setting", "outcome", "count"])
        for hist in histograms:
            label = hist.setting.label()
            n = hist.setting.num_qubits
            for index, count in enumerate(hist.counts):
                writer.writerow([label, format(index, f"0{n}b"), int(count)])


def read_csv(path) -> CountTable:
    """Rebuild a CountTable from the CSV layout written by write_csv."""
    rows: dict[str, dict[int, int]] = {}
    widths: dict[str, int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["setting", "outcome", "count"]:
            raise ValueError(f"unexpected CSV header {header!r}")
        for label, bits, count in reader:
            widths.setdefault(label, len(bits))
            if len(bits) != widths[label]:
                raise ValueError(f"inconsistent outcome width for setting {label!r}")
            rows.setdefault(label, {})[int(bits, 2)] = int(count)
    table = CountTable()
    for label, entries in rows.items():
        vec = np.zeros(2 ** widths[label], dtype=np.int64)
        for index, count in entries.items():
            vec[index] = count
        table[label] = vec
    return table
