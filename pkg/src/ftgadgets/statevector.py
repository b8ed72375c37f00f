"""Dense statevector simulation.

Amplitude index ``b`` stores qubit ``q`` in bit ``q`` of ``b`` (qubit 0 is the
least significant bit).  Gate kernels work on reshaped views of the amplitude
array, so a one- or two-qubit gate costs O(2^n) without building matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .pauli import CliffordGate, CliffordMap, DimensionError, GateKind, PauliString

__all__ = [
    "CapacityError",
    "DenseState",
    "MeasurementBranch",
    "DEFAULT_MAX_QUBITS",
    "IMPOSSIBLE",
    "gate_matrix",
    "pauli_matrix",
    "apply_gate",
    "apply_unitary",
    "apply_pauli",
    "measure_z",
    "measure_pauli",
    "expectation",
    "fidelity",
    "clifford_unitary",
]

DEFAULT_MAX_QUBITS = 26
IMPOSSIBLE = 1e-12

_SQ2 = 1 / np.sqrt(2)
_ONE_QUBIT = {
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.S_DAG: np.diag([1, -1j]).astype(complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.diag([1, -1]).astype(complex),
}


class CapacityError(RuntimeError):
    """A dense state would exceed the configured qubit limit."""


@dataclass
class DenseState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise DimensionError(
                f"{self.n_qubits} qubits need {1 << self.n_qubits} amplitudes, "
                f"got shape {self.amplitudes.shape}"
            )
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)

    @classmethod
    def zeros(cls, n_qubits: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> DenseState:
        check_capacity(n_qubits, max_qubits)
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amps: Sequence[complex] | np.ndarray) -> DenseState:
        arr = np.asarray(amps, dtype=complex)
        n = int(arr.size).bit_length() - 1
        if arr.size != 1 << n:
            raise DimensionError("amplitude count is not a power of two")
        return cls(n, arr.copy())

    def copy(self) -> DenseState:
        return DenseState(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> DenseState:
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        self.amplitudes /= nrm
        return self

    def tensor(self, other: DenseState) -> DenseState:
        """``self`` on the low qubits and ``other`` above them."""
        amps = np.kron(other.amplitudes, self.amplitudes)
        return DenseState(self.n_qubits + other.n_qubits, amps)

    def dump(self, threshold: float = 1e-12) -> str:
        """Text dump, one nonzero amplitude per line: ``index real imag``."""
        lines = []
        for idx in np.flatnonzero(np.abs(self.amplitudes) > threshold):
            a = self.amplitudes[idx]
            lines.append(f"{idx} {a.real:.15g} {a.imag:.15g}")
        return "\n".join(lines)


@dataclass
class MeasurementBranch:
    outcome: int
    probability: float
    post_state: DenseState | None

    @property
    def possible(self) -> bool:
        return self.probability >= IMPOSSIBLE


def check_capacity(n_qubits: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> None:
    if n_qubits > max_qubits:
        raise CapacityError(
            f"{n_qubits}-qubit dense state exceeds the {max_qubits}-qubit limit; "
            "use the tableau backend for Clifford circuits or smaller codes"
        )


@lru_cache(maxsize=8)
def _basis_index(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _check_qubit(state: DenseState, q: int) -> None:
    if not 0 <= q < state.n_qubits:
        raise IndexError(f"qubit {q} out of range for {state.n_qubits}-qubit state")


def _pair_view(amps: np.ndarray, n: int, q: int) -> np.ndarray:
    return amps.reshape(1 << (n - q - 1), 2, 1 << q)


def _two_view(amps: np.ndarray, n: int, lo: int, hi: int) -> np.ndarray:
    return amps.reshape(1 << (n - hi - 1), 2, 1 << (hi - lo - 1), 2, 1 << lo)


def gate_matrix(kind: GateKind) -> np.ndarray:
    """Matrix in the local basis where local qubit 0 is the low bit."""
    kind = GateKind(kind)
    if kind.arity == 1:
        return _ONE_QUBIT[kind].copy()
    target = {GateKind.CX: GateKind.X, GateKind.CY: GateKind.Y, GateKind.CZ: GateKind.Z}[kind]
    u = np.eye(4, dtype=complex)
    # control = local qubit 0 (low bit), target = local qubit 1
    t = _ONE_QUBIT[target]
    for a in range(2):
        for b in range(2):
            u[1 | (a << 1), 1 | (b << 1)] = t[a, b]
    return u


def _apply_1q(state: DenseState, u: np.ndarray, q: int) -> None:
    v = _pair_view(state.amplitudes, state.n_qubits, q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    v[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def apply_gate(state: DenseState, gate: CliffordGate) -> DenseState:
    """Apply ``gate`` in place and return ``state``."""
    for q in gate.qubits:
        _check_qubit(state, q)
    kind = gate.kind
    n = state.n_qubits
    if kind.arity == 1:
        q = gate.qubits[0]
        if kind is GateKind.Z:
            _pair_view(state.amplitudes, n, q)[:, 1, :] *= -1
        elif kind is GateKind.S:
            _pair_view(state.amplitudes, n, q)[:, 1, :] *= 1j
        elif kind is GateKind.S_DAG:
            _pair_view(state.amplitudes, n, q)[:, 1, :] *= -1j
        else:
            _apply_1q(state, _ONE_QUBIT[kind], q)
        return state
    c, t = gate.qubits
    lo, hi = min(c, t), max(c, t)
    v = _two_view(state.amplitudes, n, lo, hi)
    c_axis, t_axis = (1, 3) if c == hi else (3, 1)
    s0 = [slice(None)] * 5
    s1 = [slice(None)] * 5
    s0[c_axis] = s1[c_axis] = 1
    s0[t_axis], s1[t_axis] = 0, 1
    s0, s1 = tuple(s0), tuple(s1)
    if kind is GateKind.CZ:
        v[s1] *= -1
    elif kind is GateKind.CX:
        tmp = v[s0].copy()
        v[s0] = v[s1]
        v[s1] = tmp
    else:  # CY on the target: |0> -> i|1>, |1> -> -i|0>
        tmp = v[s0].copy()
        v[s0] = -1j * v[s1]
        v[s1] = 1j * tmp
    return state


def apply_unitary(
    state: DenseState, u: np.ndarray, qubits: Sequence[int], atol: float = 1e-9
) -> DenseState:
    """Apply a ``2^k x 2^k`` unitary on ``qubits`` (local qubit j -> ``qubits[j]``)."""
    u = np.asarray(u, dtype=complex)
    k = len(qubits)
    if u.shape != (1 << k, 1 << k):
        raise DimensionError(f"matrix shape {u.shape} does not match {k} qubits")
    if not np.allclose(u.conj().T @ u, np.eye(1 << k), atol=atol):
        raise ValueError("matrix is not unitary within tolerance")
    for q in qubits:
        _check_qubit(state, q)
    if len(set(qubits)) != k:
        raise ValueError("repeated qubit")
    n = state.n_qubits
    if k == 1:
        _apply_1q(state, u, qubits[0])
        return state
    psi = state.amplitudes.reshape((2,) * n)
    # tensor axis a holds qubit n-1-a; reshaped u axis a holds local qubit k-1-a
    ut = u.reshape((2,) * (2 * k))
    state_axes = [n - 1 - qubits[k - 1 - a] for a in range(k)]
    out = np.tensordot(ut, psi, axes=(list(range(k, 2 * k)), state_axes))
    out = np.moveaxis(out, list(range(k)), state_axes)
    state.amplitudes = np.ascontiguousarray(out).reshape(-1)
    return state


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense matrix of ``p`` (small n only; used as a test oracle)."""
    m = np.array([[1.0 + 0j]])
    for q in range(p.n_qubits):
        letter = p.letters[q]
        single = np.eye(2, dtype=complex) if letter == "I" else _ONE_QUBIT[GateKind(letter)]
        m = np.kron(single, m)
    return (1j ** p.phase_exp) * m


def pauli_action(amps: np.ndarray, p: PauliString) -> np.ndarray:
    """Return ``p @ amps`` for an amplitude vector (new array)."""
    n = p.n_qubits
    idx = _basis_index(n)
    # (X^x Z^z psi)[y] = (-1)^{|z & (y^x)|} psi[y^x]
    src = idx ^ p.x if p.x else idx
    out = amps[src]
    if p.z:
        sign = np.bitwise_count(src & p.z) & 1
        out = np.where(sign.astype(bool), -out, out)
    phase = 1j ** p.xz_phase
    if phase != 1:
        out = out * phase
    return out


def apply_pauli(state: DenseState, p: PauliString) -> DenseState:
    if p.n_qubits != state.n_qubits:
        raise DimensionError(f"{p.n_qubits}-qubit Pauli on {state.n_qubits}-qubit state")
    state.amplitudes = pauli_action(state.amplitudes, p)
    return state


def expectation(state: DenseState, p: PauliString) -> complex:
    if p.n_qubits != state.n_qubits:
        raise DimensionError("dimension mismatch")
    return complex(np.vdot(state.amplitudes, pauli_action(state.amplitudes, p)))


def _branch(outcome: int, amps: np.ndarray, n: int) -> MeasurementBranch:
    prob = float(np.vdot(amps, amps).real)
    if prob < IMPOSSIBLE:
        return MeasurementBranch(outcome, prob, None)
    return MeasurementBranch(outcome, prob, DenseState(n, amps / np.sqrt(prob)))


def measure_z(state: DenseState, qubit: int) -> tuple[MeasurementBranch, MeasurementBranch]:
    _check_qubit(state, qubit)
    n = state.n_qubits
    v = _pair_view(state.amplitudes, n, qubit)
    zero = np.zeros_like(state.amplitudes)
    one = np.zeros_like(state.amplitudes)
    _pair_view(zero, n, qubit)[:, 0, :] = v[:, 0, :]
    _pair_view(one, n, qubit)[:, 1, :] = v[:, 1, :]
    return _branch(0, zero, n), _branch(1, one, n)


def measure_pauli(state: DenseState, p: PauliString) -> tuple[MeasurementBranch, MeasurementBranch]:
    """Projective measurement of a Hermitian Pauli; outcome 1 means eigenvalue -1."""
    if not p.is_hermitian:
        raise ValueError(f"{p} is not Hermitian")
    if p.n_qubits != state.n_qubits:
        raise DimensionError("dimension mismatch")
    pa = pauli_action(state.amplitudes, p)
    plus = (state.amplitudes + pa) / 2
    minus = (state.amplitudes - pa) / 2
    return _branch(0, plus, state.n_qubits), _branch(1, minus, state.n_qubits)


def fidelity(a: DenseState, b: DenseState) -> float:
    if a.n_qubits != b.n_qubits:
        raise DimensionError("dimension mismatch")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def clifford_unitary(cmap: CliffordMap) -> np.ndarray:
    """A unitary (up to global phase) realising the conjugation action ``cmap``.

    The image of ``|0...0>`` is the joint +1 eigenvector of the images of the
    ``Z_q``; other columns follow by applying images of ``X_q``.
    """
    k = cmap.k
    dim = 1 << k
    col0 = None
    for start in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[start] = 1.0
        for zi in cmap.z_images:
            v = (v + pauli_action(v, zi)) / 2
        if np.linalg.norm(v) > 1e-6:
            col0 = v / np.linalg.norm(v)
            break
    if col0 is None:
        raise ValueError("Z images have no common +1 eigenvector")
    u = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        col = col0
        for j in range(k):
            if (b >> j) & 1:
                col = pauli_action(col, cmap.x_images[j])
        u[:, b] = col
    return u
