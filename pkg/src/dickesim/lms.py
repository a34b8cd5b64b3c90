"""Projector decompositions and local measurement setting plans.

A target projector |psi><psi| expands as sum_P c_P P over Pauli strings
with c_P = <psi|P|psi> / 2^N.  Each string is evaluated from one product
measurement whose axes match the string's non-identity letters; grouping
strings into few settings is a set-cover problem solved greedily here,
with a dedicated equatorial construction for GHZ targets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .states import (
    _POPCOUNT,
    PAULI,
    MeasurementSetting,
    QubitPureState,
    check_pauli_string,
    expectation,
)

COEFF_TOL = 1e-12
MAX_DECOMPOSE_QUBITS = 8


def pauli_matrix(letters: str) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for ch in letters:
        out = np.kron(out, PAULI[ch])
    return out


@dataclass(frozen=True)
class PauliDecomposition:
    """Sparse real Pauli expansion of a pure-state projector."""

    num_qubits: int
    terms: tuple  # ((coefficient, string), ...) in generation order
    target_label: str | None = None

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def identity_string(self) -> str:
        return "I" * self.num_qubits

    @property
    def identity_coefficient(self) -> float:
        return self.coefficient(self.identity_string)

    def coefficient(self, string: str) -> float:
        return self._by_string().get(string, 0.0)

    def _by_string(self) -> dict:
        cached = self.__dict__.get("_cache")
        if cached is None:
            cached = {s: c for c, s in self.terms}
            object.__setattr__(self, "_cache", cached)
        return cached

    def nonidentity_strings(self) -> list[str]:
        return [s for _, s in self.terms if s != self.identity_string]

    def reconstruct(self) -> np.ndarray:
        dim = 2**self.num_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for coeff, string in self.terms:
            out += coeff * pauli_matrix(string)
        return out


def decompose(target: QubitPureState, tol: float = COEFF_TOL) -> PauliDecomposition:
    """Exhaustive Pauli expansion of |target><target|.

    Enumerates all 4^N strings and keeps coefficients above ``tol``; the
    identity term (coefficient 2^-N) is always present.
    """
    n = target.num_qubits
    if n > MAX_DECOMPOSE_QUBITS:
        raise ValueError(f"decomposition supports at most {MAX_DECOMPOSE_QUBITS} qubits")
    scale = 1.0 / 2**n
    terms = []
    for letters in itertools.product("IXYZ", repeat=n):
        string = "".join(letters)
        coeff = expectation(target, string) * scale
        if abs(coeff) > tol:
            terms.append((coeff, string))
    return PauliDecomposition(n, tuple(terms), target_label=target.label)


# ---------------------------------------------------------------------------
# Setting plans


def support_mask(string: str, num_qubits: int) -> int:
    """Bit mask of the non-identity positions (qubit 0 = MSB)."""
    mask = 0
    for k, letter in enumerate(string):
        if letter != "I":
            mask |= 1 << (num_qubits - 1 - k)
    return mask


def _setting_covers(axes: tuple, string: str) -> bool:
    return all(
        letter == "I" or axes[k] == letter.lower() for k, letter in enumerate(string)
    )


@dataclass(frozen=True)
class SettingAssignment:
    """One measurement setting plus the strings it evaluates.

    ``covered`` strings are read out through per-string eigenvalue
    averages (identity positions marginalized).  A non-None
    ``collective_weight`` adds that multiple of the full-product parity
    to this setting's estimator, which is how the equatorial GHZ
    construction evaluates its off-diagonal block.
    """

    setting: MeasurementSetting
    covered: tuple
    collective_weight: float | None = None


@dataclass(frozen=True)
class SettingPlan:
    method: str
    num_qubits: int
    target_label: str | None
    assignments: tuple
    collective_strings: tuple = ()

    @property
    def num_settings(self) -> int:
        return len(self.assignments)

    def coverage(self) -> dict:
        """Map each evaluated string to the indices of its settings."""
        cov: dict[str, list] = {}
        for idx, assignment in enumerate(self.assignments):
            for string in assignment.covered:
                cov.setdefault(string, []).append(idx)
        collective = [
            idx
            for idx, assignment in enumerate(self.assignments)
            if assignment.collective_weight is not None
        ]
        for string in self.collective_strings:
            cov.setdefault(string, []).extend(collective)
        return {s: tuple(v) for s, v in cov.items()}

    def settings(self) -> list[MeasurementSetting]:
        return [a.setting for a in self.assignments]


class CoverageError(ValueError):
    """A plan does not evaluate every string of a decomposition."""


def check_plan_covers(plan: SettingPlan, decomp: PauliDecomposition) -> None:
    required = set(decomp.nonidentity_strings())
    provided = set(plan.coverage())
    missing = required - provided
    if missing:
        raise CoverageError(f"plan misses {len(missing)} strings, e.g. {sorted(missing)[:3]}")
    for idx, assignment in enumerate(plan.assignments):
        axes = assignment.setting.axes
        for string in assignment.covered:
            if any(isinstance(a, tuple) for a in axes) or not _setting_covers(axes, string):
                raise CoverageError(f"setting {idx} cannot evaluate {string}")


def _greedy_plan(decomp: PauliDecomposition) -> SettingPlan:
    n = decomp.num_qubits
    strings = decomp.nonidentity_strings()
    # enumerate, per string, every axis assignment that can read it out;
    # identity positions are free and range over all three axes
    by_candidate: dict[tuple, set] = {}
    for string in strings:
        fixed = [
            "xyz" if letter == "I" else letter.lower() for letter in string
        ]
        for axes in itertools.product(*fixed):
            by_candidate.setdefault(axes, set()).add(string)
    uncovered = set(strings)
    assignments = []
    while uncovered:
        best_axes = None
        best_gain = 0
        for axes in sorted(by_candidate):
            gain = len(by_candidate[axes] & uncovered)
            if gain > best_gain:
                best_axes, best_gain = axes, gain
        if best_axes is None:
            raise AssertionError("greedy cover stalled with strings left")
        taken = sorted(by_candidate[best_axes] & uncovered)
        uncovered -= set(taken)
        assignments.append(
            SettingAssignment(MeasurementSetting(best_axes), tuple(taken))
        )
    return SettingPlan(
        method="greedy",
        num_qubits=n,
        target_label=decomp.target_label,
        assignments=tuple(assignments),
    )


def _ghz_special_plan(decomp: PauliDecomposition) -> SettingPlan:
    n = decomp.num_qubits
    z_sector = []
    xy_sector = []
    for string in decomp.nonidentity_strings():
        if set(string) <= {"I", "Z"}:
            z_sector.append(string)
        elif set(string) <= {"X", "Y"}:
            xy_sector.append(string)
        else:
            raise ValueError(
                "ghz_special needs a GHZ-type target whose strings are all "
                f"diagonal or all-equatorial; found {string}"
            )
    assignments = [
        SettingAssignment(MeasurementSetting.uniform("z", n), tuple(z_sector))
    ]
    # N settings along cos(k pi / N) x + sin(k pi / N) y jointly estimate
    # the off-diagonal block via the alternating full-product parity sum
    for k in range(n):
        assignments.append(
            SettingAssignment(
                MeasurementSetting.in_plane("xy", k * math.pi / n, n),
                (),
                collective_weight=(-1.0) ** k / (2.0 * n),
            )
        )
    return SettingPlan(
        method="ghz_special",
        num_qubits=n,
        target_label=decomp.target_label,
        assignments=tuple(assignments),
        collective_strings=tuple(xy_sector),
    )


def plan_settings(decomp: PauliDecomposition, strategy: str = "greedy") -> SettingPlan:
    """Group a decomposition's strings into measurement settings.

    ``greedy``: repeatedly pick the axis assignment evaluating the most
    uncovered strings (ties broken toward the lexicographically smallest
    axis string), assigning each string to exactly one setting.
    ``ghz_special``: the N+1-setting construction for GHZ targets, one
    diagonal setting plus N equatorial ones.
    """
    if not len(decomp):
        raise ValueError("cannot plan settings for an empty decomposition")
    if strategy == "greedy":
        return _greedy_plan(decomp)
    if strategy == "ghz_special":
        return _ghz_special_plan(decomp)
    raise ValueError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# Estimation from counts


@dataclass(frozen=True)
class SettingEstimate:
    label: str
    total_counts: float
    contribution: float
    variance: float


@dataclass(frozen=True)
class FidelityEstimate:
    value: float
    std_error: float
    per_setting: tuple = field(repr=False, default=())


def _counts_vector(counts, key: str, dim: int) -> np.ndarray:
    try:
        raw = counts[key]
    except KeyError:
        raise ValueError(f"missing counts for setting {key!r}") from None
    vec = np.asarray(raw, dtype=float).reshape(-1)
    if vec.size != dim:
        raise ValueError(f"setting {key!r} needs {dim} outcome counts, got {vec.size}")
    if vec.min() < 0:
        raise ValueError(f"negative count in setting {key!r}")
    if vec.sum() <= 0:
        raise ValueError(f"zero total counts for setting {key!r}")
    return vec


def fidelity_from_counts(
    decomp: PauliDecomposition, plan: SettingPlan, counts
) -> FidelityEstimate:
    """Estimate fidelity = sum_P c_P <P> from per-setting outcome counts.

    ``counts`` maps each plan setting's label() to its 2^N outcome counts
    (bit 0 of an outcome = +1 eigenvector, qubit 0 = MSB).  The identity
    term enters analytically.  Settings are treated as independent
    multinomial samples; the returned standard error adds their plug-in
    variances.
    """
    check_plan_covers(plan, decomp)
    n = decomp.num_qubits
    dim = 2**n
    outcomes = np.arange(dim)
    full_parity = (-1.0) ** _POPCOUNT[outcomes]
    value = decomp.identity_coefficient
    variance = 0.0
    per_setting = []
    for assignment in plan.assignments:
        key = assignment.setting.label()
        vec = _counts_vector(counts, key, dim)
        weights = np.zeros(dim)
        for string in assignment.covered:
            mask = support_mask(string, n)
            weights += decomp.coefficient(string) * (-1.0) ** _POPCOUNT[outcomes & mask]
        if assignment.collective_weight is not None:
            weights += assignment.collective_weight * full_parity
        total = vec.sum()
        probs = vec / total
        mean = float(probs @ weights)
        var = (float(probs @ weights**2) - mean**2) / total
        value += mean
        variance += max(var, 0.0)
        per_setting.append(SettingEstimate(key, float(total), mean, var))
    return FidelityEstimate(
        value=float(value),
        std_error=math.sqrt(variance),
        per_setting=tuple(per_setting),
    )


class CountTable(dict):
    """Outcome counts per setting label, the estimator's input format.

    Values are length-2^N vectors of nonnegative counts; any mapping with
    this shape works, the class only adds converters.
    """

    @classmethod
    def from_histograms(cls, histograms) -> "CountTable":
        table = cls()
        for hist in histograms:
            table[hist.setting.label()] = np.asarray(hist.counts)
        return table

    def totals(self) -> dict:
        return {key: float(np.sum(vec)) for key, vec in self.items()}


def reference_lms_table() -> dict:
    """Published setting counts for the four benchmark targets."""
    return {"dicke_6_3": 21, "dicke_4_2": 9, "dicke_4_1": 7, "ghz_4": 5}
