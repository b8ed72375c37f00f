import numpy as np
import pytest
from hypothesis import given, strategies as st

from ftgadgets.circuit import Circuit, Location, LocationKind
from ftgadgets.codes import repetition, steane
from ftgadgets.faults import FaultEvent, FaultKind, FaultModel, enumerate_single_faults, inject
from ftgadgets.gadgets import GadgetConfig, build, coupling_circuit, measurement_subgadget
from ftgadgets.pauli import CliffordGate, GateKind, PauliString
from ftgadgets.statevector import pauli_action
from ftgadgets.tableau import (
    BackendUnsupported,
    MeasurementContradiction,
    PauliFrame,
    Tableau,
    frame_step,
    propagate_frame,
    run_tableau,
)
from ftgadgets.verifier import run_circuit_statevector


def P(t):
    return PauliString.from_text(t)


def same_group(a, b):
    t = Tableau.from_stabilizers(a)
    return all(t.expectation(s) == 1 for s in b)


def test_tableau_examples():
    t = Tableau.zero_state(1).apply_gate(CliffordGate(GateKind.H, (0,)))
    assert t.expectation(P("X")) == 1
    t = Tableau.zero_state(2).apply_gate(CliffordGate(GateKind.H, (0,)))
    t.apply_gate(CliffordGate(GateKind.CX, (0, 1)))
    assert t.expectation(P("XX")) == 1 and t.expectation(P("ZZ")) == 1
    code = steane()
    t = Tableau.zero_state(7).prepare_block(range(7), code.state_stabilizers("zero"))
    t.apply_pauli(code.logical_z)
    assert t.expectation(code.logical_z) == 1
    assert all(t.expectation(g) == 1 for g in code.generators)


def test_measure_examples():
    t = Tableau.zero_state(1)
    assert t.measure_z(0) == ("deterministic", 0)
    with pytest.raises(MeasurementContradiction):
        t.measure_z(0, forced_outcome=1)
    t = Tableau.zero_state(1).apply_gate(CliffordGate(GateKind.H, (0,)))
    assert t.measure_z(0, forced_outcome=1) == ("random", 1)
    assert t.expectation(P("Z")) == -1


def test_logical_measurement_of_minus_i_is_balanced():
    code = steane()
    sub = measurement_subgadget(code, range(7))
    t = Tableau.zero_state(7).prepare_block(range(7), code.state_stabilizers("minus_i"))
    leaves = run_tableau(sub, t)
    assert sorted((l.records[0], l.probability) for l in leaves) == [(0, 0.5), (1, 0.5)]
    amps = (code.codeword(0) - 1j * code.codeword(1)) / np.sqrt(2)
    sv = run_circuit_statevector(sub, amps)
    assert sorted((l.records[0], round(l.norm2, 12)) for l in sv) == [(0, 0.5), (1, 0.5)]


def test_logical_measurement_corrects_ancilla_error():
    code = steane()
    sub = measurement_subgadget(code, range(7))
    leaves = run_circuit_statevector(sub, pauli_action(code.codeword(0), P("IIIXIII")))
    assert [(l.records[0], round(l.norm2, 12)) for l in leaves] == [(0, 1.0)]


@st.composite
def clifford_circuits(draw):
    n = draw(st.integers(1, 5))
    locs = []
    rec = 0
    for i in range(draw(st.integers(1, 14))):
        if draw(st.integers(0, 4)) == 0:
            q = draw(st.integers(0, n - 1))
            locs.append(Location(i, i, LocationKind.MEASURE_Z, (q,), record=rec))
            rec += 1
            continue
        kinds = [k for k in GateKind if k.arity == 1 or n >= 2]
        kind = draw(st.sampled_from(kinds))
        qs = tuple(draw(st.permutations(range(n)))[: kind.arity])
        locs.append(Location(i, i, LocationKind.GATE, qs, gate=CliffordGate(kind, qs)))
    base = len(locs)
    for q in range(n):
        locs.append(Location(base + q, base + q, LocationKind.MEASURE_Z, (q,), record=rec + q))
    c = Circuit(n, locs, tuple(range(n)))
    c.check()
    return c


@given(clifford_circuits())
def test_tableau_and_statevector_agree(circ):
    tab = {}
    for leaf in run_tableau(circ, Tableau.zero_state(circ.width)):
        key = tuple(sorted(leaf.records.items()))
        tab[key] = tab.get(key, 0) + leaf.probability
    sv = {}
    for leaf in run_circuit_statevector(circ, np.array([1.0 + 0j])):
        key = tuple(sorted(leaf.records.items()))
        sv[key] = sv.get(key, 0) + leaf.norm2
    assert tab.keys() == sv.keys()
    for k in tab:
        assert abs(tab[k] - sv[k]) < 1e-9
        # every random stabilizer measurement splits the weight in half
        assert abs(np.log2(tab[k]) - round(np.log2(tab[k]))) < 1e-9


def test_fig1_ancilla_x_spreads_z_to_later_rounds():
    cfg = GadgetConfig("S", "fig1", steane())
    circ = coupling_circuit(cfg)
    cz = [l for l in circ.locations if l.gate is not None and l.gate.kind is GateKind.CZ]
    anc = 7
    for i, loc in enumerate(cz):
        # X entering just before round i: attach it after the previous location
        prev = circ.locations[circ.index_of(loc.id) - 1]
        f = propagate_frame(circ, FaultEvent(prev.id, (anc,), P("X")))
        data_z = [q for q in range(7) if (f.frame.z >> q) & 1]
        assert data_z == list(range(i, 7))
        assert (f.frame.x >> anc) & 1


def test_data_z_never_spreads_in_fig2():
    circ = build(GadgetConfig("S", "fig2", repetition(3), steane()))
    for f in enumerate_single_faults(circ, FaultModel(FaultKind.DEPHASING)):
        if f.measurement_flip or set(f.qubits) - set(circ.data_qubits) or f.pauli.weight != 1:
            continue
        fr = propagate_frame(circ, f)
        assert fr.frame == f.pauli.embed(f.qubits, circ.width).unsigned()
        assert not fr.classical_flips


def test_fig3_data_x_hits_one_qubit_per_block():
    cfg = GadgetConfig("S", "fig3", repetition(3), steane())
    circ = coupling_circuit(cfg)
    idle = next(l for l in circ.locations if l.kind == LocationKind.IDLE and l.qubits == (1,))
    f = propagate_frame(circ, FaultEvent(idle.id, (1,), P("X")))
    anc = circ.codes["ancilla"]
    want = {3 + anc.block(j)[1] for j in range(7)}
    assert {q for q in range(circ.width) if (f.frame.z >> q) & 1} == want


def test_identity_fault_leaves_empty_frame():
    circ = build(GadgetConfig("S", "fig1", repetition(3)))
    f = propagate_frame(circ, FaultEvent(0, (3,), P("I")))
    assert f.frame.is_identity and not f.classical_flips


def _frame_of_injected(circ):
    f = PauliFrame(PauliString(circ.width))
    for loc in circ.locations:
        frame_step(circ, loc, f)
    return f


@given(st.data())
def test_frames_compose_linearly(data):
    circ = build(GadgetConfig(data.draw(st.sampled_from("SH")), "fig1", steane()))
    faults = [f for f in enumerate_single_faults(circ, FaultModel()) if not f.measurement_flip]
    f1, f2 = data.draw(st.lists(st.sampled_from(faults), min_size=2, max_size=2, unique=True))
    a, b = propagate_frame(circ, f1), propagate_frame(circ, f2)
    # inject the later fault first so the earlier location id is unchanged
    first, second = sorted((f1, f2), key=lambda f: circ.index_of(f.location_id))
    both = inject(inject(circ, second), first)
    ab = _frame_of_injected(both)
    assert ab.frame == (a.frame * b.frame).unsigned()
    assert ab.classical_flips == a.classical_flips ^ b.classical_flips


def test_frame_backend_rejects_non_clifford():
    circ = build(GadgetConfig("T", "fig1", repetition(3)))
    with pytest.raises(BackendUnsupported):
        propagate_frame(circ, FaultEvent(0, (3,), P("Z")))
