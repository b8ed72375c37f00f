import numpy as np
import pytest
from hypothesis import given, strategies as st

from ftgadgets.codes import steane
from ftgadgets.pauli import CliffordGate, CliffordMap, GateKind, PauliString, gate_map
from ftgadgets.statevector import (
    CapacityError,
    DenseState,
    apply_gate,
    apply_pauli,
    apply_unitary,
    clifford_unitary,
    expectation,
    fidelity,
    gate_matrix,
    measure_pauli,
    measure_z,
    pauli_matrix,
)

from conftest import paulis

INVERSE = {GateKind.S: GateKind.S_DAG, GateKind.S_DAG: GateKind.S}


def basis(n, b):
    s = DenseState.zeros(n)
    s.amplitudes[:] = 0
    s.amplitudes[b] = 1
    return s


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return DenseState(n, v / np.linalg.norm(v))


def test_gate_examples():
    s = apply_gate(DenseState.zeros(1), CliffordGate(GateKind.H, (0,)))
    assert np.allclose(s.amplitudes, [1 / np.sqrt(2)] * 2)
    s = apply_gate(s, CliffordGate(GateKind.S, (0,)))
    assert np.allclose(s.amplitudes, np.array([1, 1j]) / np.sqrt(2))
    s = apply_gate(basis(2, 3), CliffordGate(GateKind.CZ, (0, 1)))
    assert np.allclose(s.amplitudes, [0, 0, 0, -1])


def test_pauli_examples():
    s = apply_pauli(basis(3, 7), PauliString.from_text("ZZZ"))
    assert np.allclose(s.amplitudes[7], -1)
    s = apply_pauli(basis(2, 0), PauliString.from_text("XI"))
    assert np.allclose(s.amplitudes, [0, 1, 0, 0])  # qubit 0 is the low bit
    code = steane()
    zero = DenseState(7, code.codeword(0))
    out = apply_pauli(zero.copy(), PauliString.from_text("ZZZZZZZ"))
    assert np.allclose(out.amplitudes, zero.amplitudes)


def test_measurement_examples():
    s = 1 / np.sqrt(2)
    b0, b1 = measure_z(DenseState(1, np.array([s, -1j * s])), 0)
    assert np.isclose(b0.probability, 0.5) and np.isclose(b1.probability, 0.5)
    b0, b1 = measure_z(DenseState.zeros(1), 0)
    assert b0.probability == 1 and not b1.possible
    c, sn = np.cos(np.pi / 8), np.sin(np.pi / 8)
    b0, b1 = measure_z(DenseState(1, np.array([c, -1j * sn])), 0)
    assert np.isclose(b0.probability, 0.853553, atol=1e-6)
    assert np.isclose(b1.probability, 0.146447, atol=1e-6)


def test_fidelity_examples():
    a = random_state(3, 1)
    assert np.isclose(fidelity(a, a), 1)
    assert fidelity(basis(2, 0), basis(2, 3)) == 0
    b = DenseState(3, np.exp(0.7j) * a.amplitudes)
    assert np.isclose(fidelity(a, b), 1)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        DenseState.zeros(27)
    with pytest.raises(CapacityError):
        DenseState.zeros(5, max_qubits=4)


@given(st.sampled_from(list(GateKind)), st.integers(0, 10**6))
def test_gate_then_inverse_is_identity(kind, seed):
    n = 3
    qs = (2, 0) if kind.arity == 2 else (1,)
    s = random_state(n, seed)
    orig = s.amplitudes.copy()
    apply_gate(s, CliffordGate(kind, qs))
    inv = INVERSE.get(kind, kind)  # the rest are involutions
    apply_gate(s, CliffordGate(inv, qs))
    assert np.allclose(s.amplitudes, orig, atol=1e-9)


@given(paulis(max_n=3), st.integers(0, 10**6))
def test_apply_pauli_matches_matrix(p, seed):
    s = random_state(p.n_qubits, seed)
    want = pauli_matrix(p) @ s.amplitudes
    assert np.allclose(apply_pauli(s.copy(), p).amplitudes, want)
    via_unitary = apply_unitary(s.copy(), pauli_matrix(p), tuple(range(p.n_qubits)))
    assert np.allclose(via_unitary.amplitudes, want)


@given(st.sampled_from(list(GateKind)), st.integers(0, 10**6))
def test_apply_gate_matches_gate_matrix(kind, seed):
    qs = (0, 2) if kind.arity == 2 else (1,)
    s = random_state(3, seed)
    a = apply_gate(s.copy(), CliffordGate(kind, qs)).amplitudes
    b = apply_unitary(s.copy(), gate_matrix(kind), qs).amplitudes
    assert np.allclose(a, b)


@given(paulis(max_n=3).filter(lambda p: p.is_hermitian and not p.is_identity), st.integers(0, 10**6))
def test_measure_pauli_branches(p, seed):
    s = random_state(p.n_qubits, seed)
    b0, b1 = measure_pauli(s, p)
    assert np.isclose(b0.probability + b1.probability, 1)
    assert np.isclose(b0.probability - b1.probability, expectation(s, p).real)
    for b, sign in ((b0, 1), (b1, -1)):
        if b.possible:
            assert np.isclose(expectation(b.post_state, p).real, sign)


@pytest.mark.parametrize("kind", list(GateKind))
def test_clifford_unitary_realizes_map(kind):
    cmap = gate_map(kind)
    u = clifford_unitary(cmap)
    k = cmap.k
    for q in range(k):
        for p in (PauliString(k, 1 << q, 0), PauliString(k, 0, 1 << q)):
            img = cmap.apply(p, tuple(range(k)))
            assert np.allclose(u @ pauli_matrix(p) @ u.conj().T, pauli_matrix(img))
