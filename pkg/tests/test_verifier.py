import json
import random

import numpy as np
import pytest

from ftgadgets.codes import load_code, repetition, steane, five_qubit
from ftgadgets.faults import FaultEvent, FaultKind, FaultModel, enumerate_single_faults
from ftgadgets.gadgets import GadgetConfig, build
from ftgadgets.pauli import PauliString
from ftgadgets.tableau import BackendUnsupported
from ftgadgets.verifier import (
    REPORT_SCHEMA,
    Classification,
    FtCriterion,
    StatevectorEvaluator,
    choose_backend,
    cross_check,
    logical_inputs,
    make_evaluator,
    run_ideal,
    verify_ft,
)

from conftest import FIXTURES

SMALL = [
    GadgetConfig("S", "fig1", repetition(3)),
    GadgetConfig("H", "fig1", repetition(3)),
    GadgetConfig("T", "fig1", repetition(3)),
    GadgetConfig("S", "fig1", steane()),
    GadgetConfig("H", "fig2", repetition(3), repetition(3)),
    GadgetConfig("S", "fig3", repetition(3), repetition(3)),
    GadgetConfig("S", "fig3", repetition(3), repetition(3), interleave_ec=True),
]


def test_logical_inputs_are_seeded_and_normalized():
    a, b = logical_inputs(4, 11), logical_inputs(4, 11)
    assert [l for l, _ in a][:6] == ["zero", "one", "plus", "minus", "plus_i", "minus_i"]
    for (_, u), (_, v) in zip(a, b):
        assert np.array_equal(u, v)
        assert np.isclose(np.linalg.norm(u), 1)


@pytest.mark.parametrize("cfg", SMALL, ids=lambda c: c.describe())
def test_fault_free_run_is_correct(cfg):
    circ = build(cfg)
    backends = ["statevector"] + (["tableau"] if circ.is_clifford else [])
    for backend in backends:
        rec = make_evaluator(circ, cfg.kind, FtCriterion(), backend).evaluate(None)
        assert rec.classification is Classification.CORRECT, backend
        assert rec.logical == "I"


@pytest.mark.parametrize("cfg", SMALL, ids=lambda c: c.describe())
def test_run_ideal_has_unit_fidelity(cfg):
    rows = run_ideal(cfg, n_random=3, seed=1)
    assert rows
    assert min(r["fidelity"] for r in rows) > 1 - 1e-9
    # branch probabilities of each input sum to one
    by_input = {}
    for r in rows:
        by_input[r["input"]] = by_input.get(r["input"], 0) + r["probability"]
    assert all(np.isclose(p, 1) for p in by_input.values())


def test_t_gadget_branches_on_measurement():
    rows = run_ideal(GadgetConfig("T", "fig1", repetition(3)), n_random=0)
    assert len({json.dumps(r["records"], sort_keys=True) for r in rows}) > 1


def test_t_gadget_rejects_tableau():
    with pytest.raises(BackendUnsupported):
        verify_ft(SMALL[2], FaultModel(), backend="tableau")
    assert choose_backend(build(SMALL[2]), "auto") == "statevector"


def test_global_phase_does_not_change_classification():
    cfg = SMALL[3]
    circ = build(cfg)
    ev = StatevectorEvaluator(circ, cfg.kind, FtCriterion(), logical_inputs(2, 3))
    for f in enumerate_single_faults(circ, FaultModel(FaultKind.DEPOLARIZING))[::7]:
        if f.measurement_flip:
            continue
        signed = FaultEvent(f.location_id, f.qubits, -f.pauli)
        imag = FaultEvent(f.location_id, f.qubits, f.pauli.with_phase(1))
        want = ev.evaluate(f)
        for g in (signed, imag):
            got = ev.evaluate(g)
            assert got.classification is want.classification
            assert got.logical == want.logical and got.residual == want.residual


def test_totals_do_not_depend_on_fault_order():
    cfg = SMALL[4]
    faults = enumerate_single_faults(build(cfg), FaultModel(FaultKind.DEPOLARIZING))
    shuffled = list(faults)
    random.Random(5).shuffle(shuffled)
    a = verify_ft(cfg, FaultModel(FaultKind.DEPOLARIZING), faults=faults)
    b = verify_ft(cfg, FaultModel(FaultKind.DEPOLARIZING), faults=shuffled)
    assert a.totals == b.totals and a.verdict == b.verdict


def test_fig2_dephasing_passes():
    cfg = GadgetConfig("S", "fig2", five_qubit(), steane(), reduced_support=True)
    rep = verify_ft(cfg, FaultModel(FaultKind.DEPHASING))
    assert rep.passed
    assert rep.totals["correct"] == rep.n_faults


def test_fig1_steane_fails_with_ancilla_x():
    rep = verify_ft(SMALL[3], FaultModel(FaultKind.DEPOLARIZING), max_counterexamples=200)
    assert not rep.passed
    kinds = {ce["classification"] for ce in rep.counterexamples}
    assert "conjugate_gate" in kinds
    # an X on the first ancilla qubit right after preparation spreads Z over the data
    ce = next(c for c in rep.counterexamples if c["fault"] == {"location_id": 0, "qubits": [7], "pauli": "X"})
    assert ce["residual"].count("Z") >= 2


def test_fig3_without_ec_spreads_data_x():
    cfg = GadgetConfig("S", "fig3", steane(), steane())
    fault = FaultEvent(1, (0,), PauliString.from_text("X"))
    rep = verify_ft(cfg, FaultModel(FaultKind.DEPOLARIZING), faults=[fault])
    assert rep.backend == "tableau"
    assert rep.records[0].classification is Classification.CONJUGATE_GATE


def test_pauli_frame_tolerant_mode():
    cfg = SMALL[0]
    strict = verify_ft(cfg, FaultModel())
    loose = verify_ft(cfg, FaultModel(), FtCriterion(require_logical_exact=False))
    assert not strict.passed and loose.passed
    assert strict.totals == loose.totals


def test_residual_limit_override():
    cfg = SMALL[3]
    model = FaultModel(FaultKind.DEPOLARIZING)
    faults = enumerate_single_faults(build(cfg), model)
    a = verify_ft(cfg, model, faults=faults)
    b = verify_ft(cfg, model, FtCriterion(max_residual_weight=7), faults=faults)
    assert b.totals["residual_too_heavy"] == 0
    assert b.totals["correct"] == a.totals["correct"] + a.totals["residual_too_heavy"]


def test_generic_code_note():
    code = load_code(FIXTURES / "perm9.json")
    cfg = GadgetConfig("S", "fig1", code)
    circ = build(cfg)
    faults = enumerate_single_faults(circ, FaultModel())[:6]
    rep = verify_ft(cfg, FaultModel(), faults=faults)
    assert rep.backend == "statevector"
    assert any("idealized EC" in n for n in rep.notes)
    assert all(r.residual is None for r in rep.records)


@pytest.mark.parametrize("cfg", [SMALL[0], SMALL[1], SMALL[4]], ids=lambda c: c.describe())
def test_backends_agree(cfg):
    rep = cross_check(cfg, model=FaultModel(FaultKind.DEPOLARIZING), n_random=2)
    assert rep.all_agree and rep.n_faults > 0


def test_report_schema():
    rep = verify_ft(SMALL[0], FaultModel(), max_counterexamples=3)
    d = json.loads(rep.to_json())
    assert d["schema"] == REPORT_SCHEMA
    for key in ("config", "model", "criterion", "backend", "seed", "n_inputs", "n_faults",
                "totals", "counterexamples", "verdict", "ideal", "notes", "timestamp"):
        assert key in d
    assert len(d["counterexamples"]) == 3
    assert sum(d["totals"].values()) == d["n_faults"] == 28
    assert "timestamp" not in json.loads(rep.to_json(include_timestamp=False))
    assert rep.text().splitlines()[-1] == "verdict: FAIL"


def test_parallel_matches_serial():
    cfg = SMALL[4]
    model = FaultModel(FaultKind.DEPOLARIZING)
    a = verify_ft(cfg, model, workers=1)
    b = verify_ft(cfg, model, workers=2)
    assert a.to_json(False) == b.to_json(False)
