"""Collective-spin witnesses, biseparable bounds, and correlator scans.

The witness family is W(alpha) = Jx^2 + Jy^2 + alpha * Jz^2 with
J_i = (1/2) sum_k sigma_i^(k).  Genuine multipartite entanglement is
signalled when a measured witness value exceeds the maximum attainable
by states that are product across some bipartition; those maxima are
estimated by an alternating top-eigenvector (see-saw) search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .dicke_states import dicke, ghz
from .states import (
    PAULI,
    MeasurementSetting,
    QubitDensity,
    QubitPureState,
    State,
    _as_density_matrix,
    apply_local,
    expectation,
    fidelity,
)

DEGENERACY_TOL = 1e-12
PATH_AGREEMENT_TOL = 1e-9


def _embed(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    out = np.array([[1.0]], dtype=complex)
    for k in range(n):
        out = np.kron(out, op if k == qubit else np.eye(2))
    return out


@lru_cache(maxsize=32)
def collective_spin_operator(num_qubits: int, axis: str) -> np.ndarray:
    axis = axis.lower()
    if axis not in "xyz":
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    sigma = PAULI[axis.upper()]
    total = sum(_embed(sigma, q, num_qubits) for q in range(num_qubits))
    out = 0.5 * total
    out.flags.writeable = False
    return out


@lru_cache(maxsize=32)
def witness_operator(num_qubits: int, alpha: float) -> np.ndarray:
    """Dense W(alpha); real symmetric since Jy^2 has real entries."""
    jx = collective_spin_operator(num_qubits, "x")
    jy = collective_spin_operator(num_qubits, "y")
    jz = collective_spin_operator(num_qubits, "z")
    w = jx @ jx + jy @ jy + alpha * (jz @ jz)
    if np.abs(w.imag).max() > 1e-12:
        raise AssertionError("witness operator should be real")
    w = np.ascontiguousarray(w.real)
    w.flags.writeable = False
    return w


def collective_spin_sq(state: State, axis: str) -> float:
    """<J_axis^2>, computed two ways and cross-checked.

    Path one contracts the dense operator; path two uses
    (N + sum_{j!=k} <sigma_j sigma_k>) / 4 from two-qubit correlators.
    """
    n = state.num_qubits
    rho = _as_density_matrix(state)
    j = collective_spin_operator(n, axis)
    dense = float(np.trace(j @ j @ rho).real)

    letter = axis.upper()
    corr = 0.0
    for a, b in itertools.permutations(range(n), 2):
        letters = "".join(letter if q in (a, b) else "I" for q in range(n))
        corr += expectation(state, letters)
    pairwise = (n + corr) / 4.0
    if abs(dense - pairwise) > PATH_AGREEMENT_TOL:
        raise AssertionError(
            f"collective spin paths disagree: {dense} vs {pairwise}"
        )
    return dense


def witness_value(state: State, alpha: float) -> float:
    """<W(alpha)> on a state."""
    rho = _as_density_matrix(state)
    w = witness_operator(state.num_qubits, float(alpha))
    return float(np.trace(w @ rho).real)


def pairwise_corr_matrix(state: State, axis: str) -> np.ndarray:
    """Symmetric matrix of <sigma_axis^(j) sigma_axis^(k)>; unit diagonal."""
    n = state.num_qubits
    letter = axis.upper()
    out = np.eye(n)
    for a in range(n):
        for b in range(a + 1, n):
            letters = "".join(letter if q in (a, b) else "I" for q in range(n))
            out[a, b] = out[b, a] = expectation(state, letters)
    return out


# ---------------------------------------------------------------------------
# Biseparable bound by see-saw


@dataclass(frozen=True)
class SeeSawOptions:
    restarts: int = 50
    max_iter: int = 500
    tol: float = 1e-10
    seed: int = 0


@dataclass(frozen=True)
class BoundEstimate:
    value: float
    bipartition: tuple[int, ...]
    restarts: int
    iterations: int
    converged: bool
    per_bipartition: dict = field(repr=False, default_factory=dict)


def bipartitions(num_qubits: int):
    """All proper bipartitions, one representative per complement pair."""
    rest = range(1, num_qubits)
    for r in range(0, num_qubits - 1):
        for tail in itertools.combinations(rest, r):
            yield (0,) + tail


def _top_eigenvector(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Leading eigenvector; degenerate ties broken by the lexicographically
    largest absolute-amplitude profile so reruns pick the same vector."""
    vals, vecs = np.linalg.eigh(matrix)
    top = vals[-1]
    candidates = [k for k in range(len(vals)) if vals[k] > top - DEGENERACY_TOL]
    if len(candidates) == 1:
        return vecs[:, -1], float(top)
    best = max(candidates, key=lambda k: tuple(np.round(np.abs(vecs[:, k]), 12)))
    return vecs[:, best], float(top)


def _seesaw_once(w4, d_a, d_b, rng, max_iter, tol):
    psi_a = rng.normal(size=d_a) + 1j * rng.normal(size=d_a)
    psi_a /= np.linalg.norm(psi_a)
    psi_b = rng.normal(size=d_b) + 1j * rng.normal(size=d_b)
    psi_b /= np.linalg.norm(psi_b)
    value = -np.inf
    for it in range(1, max_iter + 1):
        m_b = np.einsum("ajbk,a,b->jk", w4, psi_a.conj(), psi_a)
        psi_b, _ = _top_eigenvector(m_b)
        m_a = np.einsum("ajbk,j,k->ab", w4, psi_b.conj(), psi_b)
        psi_a, new_value = _top_eigenvector(m_a)
        if new_value - value < tol:
            return new_value, it, True
        value = new_value
    return value, max_iter, False


def biseparable_bound(
    num_qubits: int, alpha: float = 0.0, options: SeeSawOptions | None = None
) -> BoundEstimate:
    """Estimate max <W(alpha)> over pure states product across a bipartition.

    Every proper bipartition is optimized from ``options.restarts`` random
    product starts; each half-step replaces one side by the top eigenvector
    of the witness contracted with the other side, so the objective is
    monotone.  The overall best value, its bipartition, and per-bipartition
    maxima are returned.
    """
    opts = options or SeeSawOptions()
    n = int(num_qubits)
    if n < 2:
        raise ValueError("need at least 2 qubits for a bipartition")
    w = witness_operator(n, float(alpha))
    tensor = w.reshape([2] * (2 * n))

    best = BoundEstimate(-np.inf, (), opts.restarts, 0, True)
    per_part: dict[tuple[int, ...], float] = {}
    for part_index, part_a in enumerate(bipartitions(n)):
        part_b = tuple(q for q in range(n) if q not in part_a)
        perm = list(part_a) + list(part_b)
        d_a, d_b = 2 ** len(part_a), 2 ** len(part_b)
        w4 = tensor.transpose(perm + [n + p for p in perm]).reshape(d_a, d_b, d_a, d_b)
        part_best = -np.inf
        for restart in range(opts.restarts):
            rng = np.random.default_rng(
                np.random.SeedSequence((opts.seed, part_index, restart))
            )
            value, iters, converged = _seesaw_once(
                w4, d_a, d_b, rng, opts.max_iter, opts.tol
            )
            part_best = max(part_best, value)
            if value > best.value:
                best = BoundEstimate(
                    value, part_a, opts.restarts, iters, converged
                )
        per_part[part_a] = part_best
    return BoundEstimate(
        best.value, best.bipartition, best.restarts, best.iterations,
        best.converged, per_part,
    )


def bound_curve(num_qubits, alphas, options=None):
    """[(alpha, biseparable bound)] over a grid of alpha values."""
    return [
        (float(a), biseparable_bound(num_qubits, float(a), options).value)
        for a in alphas
    ]


# ---------------------------------------------------------------------------
# Tensor-product correlators


def correlator_scan(state: State, plane: str, thetas) -> np.ndarray:
    """<(cos(t) sigma_i + sin(t) sigma_z)^xN> over the angle grid.

    ``plane`` selects sigma_x ('xz') or sigma_y ('yz') as the in-plane
    partner of sigma_z.
    """
    if plane not in ("xz", "yz"):
        raise ValueError(f"plane must be 'xz' or 'yz', got {plane!r}")
    first = PAULI["X"] if plane == "xz" else PAULI["Y"]
    n = state.num_qubits
    rho = _as_density_matrix(state)
    out = np.empty(len(thetas))
    for i, theta in enumerate(np.asarray(thetas, dtype=float)):
        op = np.cos(theta) * first + np.sin(theta) * PAULI["Z"]
        tensor = rho.reshape([2] * (2 * n))
        for q in range(n):
            tensor = np.moveaxis(
                np.tensordot(op, tensor, axes=[[1], [q]]), 0, q
            )
        val = np.trace(tensor.reshape(2**n, 2**n))
        out[i] = val.real
    return out


def dephased(state: State) -> QubitDensity:
    """Populations-only copy of a state in the computational basis."""
    rho = _as_density_matrix(state)
    return QubitDensity(state.num_qubits, np.diag(rho.diagonal().real.astype(complex)))


# ---------------------------------------------------------------------------
# GHZ-type witness after local rotation


_HALF_SQRT = 1.0 / np.sqrt(2.0)
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * _HALF_SQRT
_SQRT_Z = np.diag([1.0, 1.0j])
_SIGMA_Z = np.diag([1.0, -1.0])


def ghz_rotation_unitaries(num_qubits: int = 4):
    """Per-qubit unitaries turning GHZ_N into the odd Dicke superposition.

    The circuit applies sigma_z to qubit 0 first, then Hadamard followed by
    sqrt(sigma_z) on every qubit.  For N = 4 the output state equals
    (dicke(4,1) - dicke(4,3)) / sqrt(2) up to global phase.
    """
    per_qubit = _SQRT_Z @ _HADAMARD
    ops = [per_qubit] * num_qubits
    ops[0] = per_qubit @ _SIGMA_Z
    return ops


def rotated_ghz_target(num_qubits: int = 4) -> QubitPureState:
    state = apply_local(ghz(num_qubits), ghz_rotation_unitaries(num_qubits))
    return QubitPureState(num_qubits, state.amplitudes, label=f"ghz_{num_qubits}_rotated")


def ghz_witness(state: State) -> float:
    """1/2 - fidelity against the locally rotated GHZ_4 target.

    Negative values certify GHZ-type entanglement of four-qubit states
    navigated out of the six-photon Dicke state with +/- outcomes.
    """
    if state.num_qubits != 4:
        raise ValueError("ghz_witness is defined for 4-qubit states")
    return 0.5 - fidelity(state, rotated_ghz_target(4))
