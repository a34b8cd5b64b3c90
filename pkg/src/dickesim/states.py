"""Dense polarization-qubit registers and measurement primitives.

Conventions used throughout the package:

* qubit 0 is the most significant bit of the computational index,
* bit 0 is |H> and bit 1 is |V>,
* sigma_z |H> = +|H>, and sigma_y |H> = i |V>.

States are small (at most ``MAX_QUBITS`` qubits) and stored densely.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 10
NORM_TOL = 1e-9
HERMITICITY_TOL = 1e-9
EIGENVALUE_TOL = 1e-8
IMPOSSIBLE_OUTCOME_TOL = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

AXIS_VECTORS = {
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}

# unit vectors spanning each measurement plane, in the order (cos, sin)
PLANE_SPANS = {
    "xy": ("x", "y"),
    "xz": ("x", "z"),
    "yz": ("y", "z"),
}


class ImpossibleOutcomeError(ValueError):
    """Raised when a projection outcome has probability below threshold."""


def _check_num_qubits(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_QUBITS:
        raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {n!r}")


class QubitPureState:
    """Normalized pure state of ``num_qubits`` polarization qubits.

    The amplitude array is frozen after validation; operations return new
    states.  An optional ``label`` names well-known preparations so that
    downstream tables (settings plans, reference lookups) can key on them.
    """

    def __init__(self, num_qubits: int, amplitudes, label: str | None = None):
        _check_num_qubits(num_qubits)
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1).copy()
        if amps.size != 2**num_qubits:
            raise ValueError(
                f"expected {2**num_qubits} amplitudes, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")
        amps.flags.writeable = False
        self.num_qubits = int(num_qubits)
        self.amplitudes = amps
        self.label = label

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "QubitDensity":
        return QubitDensity(self.num_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self):
        tag = f" label={self.label!r}" if self.label else ""
        return f"<QubitPureState n={self.num_qubits}{tag}>"


class QubitDensity:
    """Density matrix on ``num_qubits`` qubits.

    Validated at construction: Hermitian, unit trace, and no eigenvalue
    below ``-EIGENVALUE_TOL``.
    """

    def __init__(self, num_qubits: int, matrix, label: str | None = None):
        _check_num_qubits(num_qubits)
        mat = np.asarray(matrix, dtype=complex).copy()
        dim = 2**num_qubits
        if mat.shape != (dim, dim):
            raise ValueError(f"expected shape {(dim, dim)}, got {mat.shape}")
        if np.abs(mat - mat.conj().T).max() > HERMITICITY_TOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond {NORM_TOL}")
        low = np.linalg.eigvalsh(mat)[0]
        if low < -EIGENVALUE_TOL:
            raise ValueError(f"negative eigenvalue {low} below -{EIGENVALUE_TOL}")
        mat.flags.writeable = False
        self.num_qubits = int(num_qubits)
        self.matrix = mat
        self.label = label

    @classmethod
    def from_pure(cls, state: QubitPureState) -> "QubitDensity":
        return state.density()

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"<QubitDensity n={self.num_qubits}>"


State = QubitPureState | QubitDensity


def _as_density_matrix(state: State) -> np.ndarray:
    if isinstance(state, QubitPureState):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    return state.matrix


# ---------------------------------------------------------------------------
# Pauli strings


def check_pauli_string(letters: str, num_qubits: int) -> str:
    letters = str(letters).upper()
    if len(letters) != num_qubits:
        raise ValueError(f"Pauli string length {len(letters)} != {num_qubits} qubits")
    bad = set(letters) - set("IXYZ")
    if bad:
        raise ValueError(f"invalid Pauli letters {sorted(bad)!r}")
    return letters


_POPCOUNT = np.array([bin(i).count("1") for i in range(2**MAX_QUBITS)], dtype=np.int64)


def _pauli_masks(letters: str, n: int):
    """Bit masks implementing P|b> = phase(b) |b ^ flip>.

    phase(b) = i^(#Y) * (-1)^popcount(b & sign_mask), with Y and Z letters
    contributing sign flips on set bits and X/Y letters flipping bits.
    """
    flip = 0
    sign = 0
    n_y = 0
    for k, letter in enumerate(letters):
        bit = 1 << (n - 1 - k)
        if letter in "XY":
            flip |= bit
        if letter in "YZ":
            sign |= bit
        if letter == "Y":
            n_y += 1
    return flip, sign, n_y


def expectation(state: State, letters: str) -> float:
    """Real expectation value <P> of a Pauli string on a state."""
    n = state.num_qubits
    letters = check_pauli_string(letters, n)
    flip, sign, n_y = _pauli_masks(letters, n)
    idx = np.arange(2**n)
    phase = (1j) ** n_y * (-1.0) ** _POPCOUNT[idx & sign]
    if isinstance(state, QubitPureState):
        amps = state.amplitudes
        val = np.sum(amps.conj()[idx ^ flip] * phase * amps)
    else:
        val = np.sum(state.matrix[idx ^ flip, idx] * phase)
    if abs(val.imag) > 1e-9:
        raise ValueError(f"expectation has imaginary part {val.imag}")
    return float(val.real)


# ---------------------------------------------------------------------------
# Fidelity, partial trace, projection


def fidelity(state: State, target: QubitPureState) -> float:
    """Overlap <target| rho |target> with a pure target."""
    if state.num_qubits != target.num_qubits:
        raise ValueError("qubit count mismatch")
    t = target.amplitudes
    if isinstance(state, QubitPureState):
        return float(abs(np.vdot(t, state.amplitudes)) ** 2)
    val = (t.conj() @ state.matrix @ t).real
    return float(min(max(val, 0.0), 1.0))


def partial_trace(state: State, keep) -> QubitDensity:
    """Reduced density matrix on the kept qubits, in the order given."""
    n = state.num_qubits
    keep = tuple(int(k) for k in keep)
    if len(keep) != len(set(keep)):
        raise ValueError(f"duplicate indices in keep={keep}")
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep={keep} out of range for {n} qubits")
    rho = _as_density_matrix(state)
    traced = [q for q in range(n) if q not in keep]
    tensor = rho.reshape([2] * (2 * n))
    # shared einsum index on the row/column axes of each traced qubit
    row = list(range(n))
    col = list(range(n, 2 * n))
    for q in traced:
        col[q] = row[q]
    reduced = np.einsum(tensor, row + col, [row[q] for q in keep] + [col[q] for q in keep])
    d = 2 ** len(keep)
    return QubitDensity(len(keep), reduced.reshape(d, d))


def project(state: State, qubit: int, outcome_ket) -> tuple[State, float]:
    """Project one qubit onto a single-qubit ket and drop it.

    Returns the renormalized post-measurement state on the remaining
    qubits together with the outcome probability.  Probabilities below
    ``IMPOSSIBLE_OUTCOME_TOL`` raise :class:`ImpossibleOutcomeError`.
    """
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range")
    if n == 1:
        raise ValueError("cannot project the last remaining qubit")
    ket = np.asarray(outcome_ket, dtype=complex).reshape(2)
    if abs(np.linalg.norm(ket) - 1.0) > NORM_TOL:
        raise ValueError("outcome ket must be normalized")
    if isinstance(state, QubitPureState):
        tensor = state.amplitudes.reshape([2] * n)
        new = np.tensordot(ket.conj(), tensor, axes=[[0], [qubit]])
        p = float(np.vdot(new, new).real)
        if p < IMPOSSIBLE_OUTCOME_TOL:
            raise ImpossibleOutcomeError(
                f"outcome probability {p:.3e} below {IMPOSSIBLE_OUTCOME_TOL}"
            )
        return QubitPureState(n - 1, new.reshape(-1) / math.sqrt(p)), p
    tensor = state.matrix.reshape([2] * (2 * n))
    half = np.tensordot(ket.conj(), tensor, axes=[[0], [qubit]])
    # row qubit axis is gone; the matching column axis moved to n-1+qubit
    new = np.tensordot(half, ket, axes=[[n - 1 + qubit], [0]])
    d = 2 ** (n - 1)
    mat = new.reshape(d, d)
    p = float(np.trace(mat).real)
    if p < IMPOSSIBLE_OUTCOME_TOL:
        raise ImpossibleOutcomeError(
            f"outcome probability {p:.3e} below {IMPOSSIBLE_OUTCOME_TOL}"
        )
    return QubitDensity(n - 1, mat / p), p


# ---------------------------------------------------------------------------
# Measurement settings


def _axis_entry(axis):
    """Normalize one per-qubit axis entry to ('x'|'y'|'z') or (plane, theta)."""
    if isinstance(axis, str):
        a = axis.lower()
        if a in AXIS_VECTORS:
            return a
        raise ValueError(f"unknown axis label {axis!r}")
    plane, theta = axis
    plane = str(plane).lower()
    if plane not in PLANE_SPANS:
        raise ValueError(f"unknown plane {plane!r}; expected one of {sorted(PLANE_SPANS)}")
    return (plane, float(theta))


class MeasurementSetting:
    """Per-qubit measurement axes.

    Each entry is a Pauli label ('x', 'y', 'z') or an in-plane axis
    ``(plane, theta)`` with plane in {'xy', 'xz', 'yz'}, meaning
    cos(theta) * first_axis + sin(theta) * second_axis.
    """

    def __init__(self, axes):
        axes = tuple(_axis_entry(a) for a in axes)
        if not 1 <= len(axes) <= MAX_QUBITS:
            raise ValueError(f"setting must cover 1..{MAX_QUBITS} qubits")
        self.axes = axes
        self.num_qubits = len(axes)

    @classmethod
    def pauli(cls, labels: str) -> "MeasurementSetting":
        """All-Pauli setting from a compact string such as 'zzxy'."""
        return cls(tuple(labels.lower()))

    @classmethod
    def uniform(cls, axis, num_qubits: int) -> "MeasurementSetting":
        return cls((axis,) * num_qubits)

    @classmethod
    def in_plane(cls, plane: str, theta: float, num_qubits: int) -> "MeasurementSetting":
        return cls(((plane, theta),) * num_qubits)

    def bloch_vector(self, qubit: int) -> np.ndarray:
        axis = self.axes[qubit]
        if isinstance(axis, str):
            return AXIS_VECTORS[axis].copy()
        plane, theta = axis
        a, b = PLANE_SPANS[plane]
        return math.cos(theta) * AXIS_VECTORS[a] + math.sin(theta) * AXIS_VECTORS[b]

    def rotation(self, qubit: int) -> np.ndarray:
        """2x2 unitary whose rows are the bras of the +1 / -1 eigenvectors."""
        nx, ny, nz = self.bloch_vector(qubit)
        big = math.acos(min(1.0, max(-1.0, nz)))
        phi = math.atan2(ny, nx)
        c, s = math.cos(big / 2.0), math.sin(big / 2.0)
        plus = np.array([c, s * np.exp(1j * phi)])
        minus = np.array([-s, c * np.exp(1j * phi)])
        return np.array([plus.conj(), minus.conj()])

    def observable(self, qubit: int) -> np.ndarray:
        nx, ny, nz = self.bloch_vector(qubit)
        return nx * PAULI["X"] + ny * PAULI["Y"] + nz * PAULI["Z"]

    def label(self) -> str:
        parts = []
        for axis in self.axes:
            if isinstance(axis, str):
                parts.append(axis)
            else:
                plane, theta = axis
                parts.append(f"{plane}:{theta:.12g}")
        return ",".join(parts)

    @classmethod
    def from_label(cls, text: str) -> "MeasurementSetting":
        axes = []
        for tok in text.split(","):
            if ":" in tok:
                plane, theta = tok.split(":")
                axes.append((plane, float(theta)))
            else:
                axes.append(tok)
        return cls(axes)

    def __eq__(self, other):
        return isinstance(other, MeasurementSetting) and self.axes == other.axes

    def __hash__(self):
        return hash(self.axes)

    def __repr__(self):
        return f"<MeasurementSetting {self.label()}>"


def outcome_distribution(state: State, setting: MeasurementSetting) -> np.ndarray:
    """Probabilities over the 2^N outcome bitstrings of a product measurement.

    Outcome bit 0 on a qubit means the +1 eigenvector of that qubit's axis.
    """
    n = state.num_qubits
    if setting.num_qubits != n:
        raise ValueError("setting covers a different number of qubits")
    rotations = [setting.rotation(q) for q in range(n)]
    rotated = apply_local(state, rotations)
    if isinstance(rotated, QubitPureState):
        probs = np.abs(rotated.amplitudes) ** 2
    else:
        probs = rotated.matrix.diagonal().real.copy()
    if probs.min() < -NORM_TOL or abs(probs.sum() - 1.0) > NORM_TOL:
        raise ValueError("outcome distribution failed sanity check")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def apply_local(state: State, unitaries) -> State:
    """Apply one 2x2 unitary per qubit."""
    n = state.num_qubits
    us = [np.asarray(u, dtype=complex) for u in unitaries]
    if len(us) != n:
        raise ValueError(f"need {n} unitaries, got {len(us)}")
    for u in us:
        if u.shape != (2, 2) or np.abs(u @ u.conj().T - np.eye(2)).max() > 1e-9:
            raise ValueError("entries must be 2x2 unitaries")
    if isinstance(state, QubitPureState):
        tensor = state.amplitudes.reshape([2] * n)
        for q, u in enumerate(us):
            tensor = np.moveaxis(np.tensordot(u, tensor, axes=[[1], [q]]), 0, q)
        return QubitPureState(n, tensor.reshape(-1))
    tensor = state.matrix.reshape([2] * (2 * n))
    for q, u in enumerate(us):
        tensor = np.moveaxis(np.tensordot(u, tensor, axes=[[1], [q]]), 0, q)
        tensor = np.moveaxis(np.tensordot(u.conj(), tensor, axes=[[1], [n + q]]), 0, n + q)
    d = 2**n
    return QubitDensity(n, tensor.reshape(d, d))


# ---------------------------------------------------------------------------
# JSON serialization


def state_to_dict(state: State) -> dict:
    if isinstance(state, QubitPureState):
        out = {
            "num_qubits": state.num_qubits,
            "amplitudes": [[z.real, z.imag] for z in state.amplitudes],
        }
    else:
        out = {
            "num_qubits": state.num_qubits,
            "matrix": [[[z.real, z.imag] for z in row] for row in state.matrix],
        }
    if state.label:
        out["label"] = state.label
    return out


def state_from_dict(data: dict) -> State:
    n = data["num_qubits"]
    label = data.get("label")
    if "amplitudes" in data:
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return QubitPureState(n, amps, label=label)
    if "matrix" in data:
        mat = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
        return QubitDensity(n, mat, label=label)
    raise ValueError("state dict needs 'amplitudes' or 'matrix'")


def save_state(state: State, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_dict(state), fh, indent=1)
        fh.write("\n")


def load_state(path) -> State:
    with open(path) as fh:
        return state_from_dict(json.load(fh))
