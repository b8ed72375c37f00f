import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ftgadgets import gadgets
from ftgadgets.circuit import LocationKind
from ftgadgets.codes import concatenate, five_qubit, load_code, repetition, steane
from ftgadgets.gadgets import (
    GadgetConfig,
    GadgetError,
    GadgetKind,
    algebraic_identities,
    build,
    classical_correction_rule,
    logical_h_map,
    target_unitary,
    verify_logical_cz,
)
from ftgadgets.pauli import GateKind
from ftgadgets.statevector import clifford_unitary
from ftgadgets.verifier import logical_inputs, run_circuit_statevector

from conftest import FIXTURES

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1])


def proportional(a, b, tol=1e-9):
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    c = a[k] / b[k]
    return abs(abs(c) - 1) < tol and np.allclose(a, c * b, atol=tol)


def test_identities_hold():
    rows = algebraic_identities()
    assert all(ok for _, ok, _ in rows), rows
    assert "S^dag H S" in rows[-1][2]


def test_cz_counts_fig2():
    full = build(GadgetConfig("S", "fig2", five_qubit(), steane()))
    red = build(GadgetConfig("S", "fig2", five_qubit(), steane(), reduced_support=True))
    assert full.count_gates([GateKind.CZ]) == 35
    assert red.count_gates([GateKind.CZ]) == 15
    assert len(red.meta["support"]) >= 3


@pytest.mark.parametrize("data,anc", [(five_qubit(), steane()), (steane(), steane()), (repetition(3), five_qubit())])
@pytest.mark.parametrize("reduced", [False, True])
def test_coupling_count_is_n_times_support(data, anc, reduced):
    c = build(GadgetConfig("S", "fig2", data, anc, reduced_support=reduced))
    assert c.count_gates([GateKind.CZ]) == data.n * len(c.meta["support"])
    assert len(c.meta["support"]) >= anc.distance


def test_fig3_layout():
    c = build(GadgetConfig("S", "fig3", repetition(3), steane()))
    assert c.width - 3 == 21
    steps = {}
    for loc in c.locations:
        if loc.gate is not None and loc.gate.kind is GateKind.CZ:
            steps.setdefault(loc.timestep, []).append(loc.qubits)
    assert len(steps) == 7 and all(len(v) == 3 for v in steps.values())
    for pairs in steps.values():
        flat = [q for p in pairs for q in p]
        assert len(flat) == len(set(flat))


def test_fig3_full_scale_width():
    c = build(GadgetConfig("S", "fig3", steane(), steane(), interleave_ec=True))
    assert c.width == 56
    assert sum(1 for l in c.locations if l.kind == LocationKind.EC) == 7


def test_correction_rules_match_algebra():
    s_gate, h_gate, t_gate = (target_unitary(k) for k in "SHT")
    # S gadget leaves S (outcome 0) or S^dag (outcome 1)
    assert classical_correction_rule("S", 0) is None
    assert classical_correction_rule("S", 1) == "Z" and proportional(Z @ s_gate.conj().T, s_gate)
    # H gadget leaves (I -+ i s Y)/sqrt2
    for sign in (1, -1):
        for outcome in (0, 1):
            left = (I2 - 1j * (-1) ** outcome * sign * Y) / np.sqrt(2)
            corr = {"X": X, "Z": Z}[classical_correction_rule("H", outcome, sign)]
            assert proportional(corr @ left, h_gate)
    assert classical_correction_rule("T", 1) == "S_GADGET"
    assert proportional(s_gate @ t_gate.conj().T, t_gate)


def test_s_and_h_generate_the_clifford_group():
    def key(m):
        k = np.flatnonzero(np.abs(m.ravel()) > 1e-9)[0]
        m = m / (m.ravel()[k] / abs(m.ravel()[k]))
        return tuple(np.round(m.ravel(), 9))

    s_gate, h_gate = target_unitary("S"), target_unitary("H")
    seen = {key(I2): I2}
    frontier = [I2]
    while frontier:
        nxt = []
        for m in frontier:
            for g in (s_gate, h_gate):
                p = g @ m
                if key(p) not in seen:
                    seen[key(p)] = p
                    nxt.append(p)
        frontier = nxt
    assert len(seen) == 24


def _run_gadget(cfg, psi_data):
    """Data state after the gadget; every branch must leave the same state."""
    circ = build(cfg)
    n = cfg.data_code.n
    outs = []
    for leaf in run_circuit_statevector(circ, psi_data):
        m = leaf.amplitudes.reshape(-1, 1 << n)
        row = m[np.argmax(np.linalg.norm(m, axis=1))]
        outs.append(row / np.linalg.norm(row))
    for o in outs[1:]:
        assert abs(np.vdot(outs[0], o)) ** 2 > 1 - 1e-9
    return outs[0]


@given(st.lists(st.sampled_from("SH"), min_size=1, max_size=4), st.integers(0, 7))
def test_composed_gadgets_follow_logical_products(word, k):
    code = repetition(3)
    _, (a, b) = logical_inputs(8, 11)[6 + k]
    psi = a * code.codeword(0) + b * code.codeword(1)
    logical = np.array([a, b])
    for letter in word:
        psi = _run_gadget(GadgetConfig(letter, "fig1", code), psi)
        logical = target_unitary(letter) @ logical
    want = logical[0] * code.codeword(0) + logical[1] * code.codeword(1)
    assert abs(np.vdot(want, psi)) ** 2 > 1 - 1e-9


@pytest.mark.parametrize("code", [steane(), five_qubit(), repetition(3)], ids=lambda c: c.name)
def test_logical_h_map_is_logical_hadamard(code):
    u = clifford_unitary(logical_h_map(code))
    c0, c1 = code.codeword(0), code.codeword(1)
    for _, (a, b) in logical_inputs(4, 3):
        out = u @ (a * c0 + b * c1)
        ha, hb = target_unitary("H") @ np.array([a, b])
        assert abs(np.vdot(ha * c0 + hb * c1, out)) ** 2 > 1 - 1e-9


def test_steane_uses_transversal_h_and_513_uses_idealized():
    assert build(GadgetConfig("S", "fig2", five_qubit(), steane())).meta["logical_h"] == "transversal"
    c = build(GadgetConfig("S", "fig2", steane(), five_qubit()))
    assert c.meta["logical_h"] == "idealized"
    assert c.meta["non_ft_elements"]


def test_logical_cz_examples():
    assert verify_logical_cz(GadgetConfig("S", "fig2", repetition(3), steane()))
    assert verify_logical_cz(GadgetConfig("S", "fig2", five_qubit(), steane()))
    assert verify_logical_cz(GadgetConfig("S", "fig3", repetition(3), repetition(3)))


def test_logical_cz_detects_a_missing_coupling(monkeypatch):
    real = gadgets.coupling_circuit

    def broken(cfg, rounds=None):
        c = real(cfg, rounds)
        cz = [l for l in c.locations if l.gate is not None and l.gate.kind is GateKind.CZ]
        return c.with_locations([l for l in c.locations if l is not cz[-1]])

    monkeypatch.setattr(gadgets, "coupling_circuit", broken)
    assert not verify_logical_cz(GadgetConfig("S", "fig2", repetition(3), steane()))


def test_bad_configs_raise():
    with pytest.raises(GadgetError):
        build(GadgetConfig("S", "fig2", steane()))
    with pytest.raises(GadgetError):
        build(GadgetConfig("S", "fig1", steane(), interleave_ec=True))
    with pytest.raises(GadgetError):
        build(GadgetConfig("H", "fig1", repetition(4)))
    with pytest.raises(GadgetError):
        build(GadgetConfig("S", "fig1", repetition(4)))


def test_distance_mismatch_is_reported():
    with pytest.warns(UserWarning):
        c = build(GadgetConfig("S", "fig2", repetition(3), steane()))
    assert c.meta["warnings"]


def test_t_gadget_modes():
    chain = build(GadgetConfig("T", "fig1", repetition(3)))
    assert chain.width == 5 and not chain.postselect and len(chain.meta["records"]) == 2
    rus = build(GadgetConfig("T", "fig1", repetition(3), t_correction_mode="repeat_until_success"))
    assert rus.width == 4 and rus.postselect == ((0, 0),)


def test_generic_code_gadgets_build():
    code = load_code(FIXTURES / "perm9.json")
    for kind in "SHT":
        build(GadgetConfig(kind, "fig1", code)).check()
